// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "redact/place.hpp"

namespace redact {

// A routed connection through the fabric's switch network. Track nodes are
// global (segment * channel_width + track); each carries the ordinal of the
// chosen source in the fabric's per-track chain.
struct RouteHop {
  int track_node;
  int source_ordinal;
};

struct RouteTree {
  NetIdx net;                                   // mapped-design net
  std::vector<RouteHop> hops;                   // tracks in use
  std::vector<std::pair<int, int>> pin_taps;    // (clb*I+q, feeding track node)
  std::vector<std::pair<int, int>> pad_taps;    // (pad id, feeding track node)
};

struct RoutingResult {
  std::vector<RouteTree> nets;
  int iterations = 0;
};

/// Maze (BFS shortest-path) routing in deterministic net order with bounded
/// rip-up-and-retry. Throws UnroutableError with a congestion summary after
/// the iteration limit.
RoutingResult route(const MappedDesign& d, const Placement& p, const Fabric& f,
                    uint64_t seed, int max_iterations = 50);

/// Exclusivity and connectivity checker: every track/pin used at most once,
/// every tree reaches all its sinks. Returns problems as strings (empty =
/// clean); used both in production flow and as a test oracle.
std::vector<std::string> check_routing(const MappedDesign& d, const Placement& p,
                                       const Fabric& f, const RoutingResult& r);

}  // namespace redact
