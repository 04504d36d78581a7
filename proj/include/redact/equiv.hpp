// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redact/netlist.hpp"
#include "redact/sim.hpp"

namespace redact {

// I/O correspondence between two netlists. Unmapped inputs of `b` are held
// at zero; unmapped outputs are ignored.
struct PortMap {
  std::vector<std::pair<std::string, std::string>> in_map;   // a port -> b port
  std::vector<std::pair<std::string, std::string>> out_map;  // a port -> b port

  static PortMap identity(const Netlist& a);
};

struct EquivalenceReport {
  bool equivalent = false;
  uint64_t vectors_checked = 0;
  std::string counterexample;  // empty when equivalent
};

/// Compares combinational behavior of `a` and `b` under the port map:
/// exhaustive when |a inputs| <= exhaustive_limit, otherwise n_random seeded
/// vectors. Netlists containing DFFs are compared on their combinational
/// cores with DFF states driven to the init values.
EquivalenceReport check_equivalence(const Netlist& a, const Netlist& b,
                                    const PortMap& pm, int exhaustive_limit,
                                    int n_random, uint64_t seed,
                                    SimMode mode_a = SimMode::Acyclic,
                                    SimMode mode_b = SimMode::FixedPoint);

}  // namespace redact
