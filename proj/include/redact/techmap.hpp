// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "redact/netlist.hpp"

namespace redact {

struct MappedDesign {
  Netlist lut_netlist;  // K-LUTs and DFFs only
  int num_inputs = 0;
  int num_outputs = 0;
  int lut_count = 0;
  int dff_count = 0;
};

/// Greedy K-feasible cone mapping: the netlist is decomposed to 2-input
/// gates, cones are collapsed bottom-up while their support stays within K,
/// and each cone root becomes a LUT. Every DFF ends up fed by a dedicated
/// LUT (an identity LUT is inserted when needed) so a LUT/DFF pair always
/// forms one fabric slot. With `verify`, the result is checked against the
/// source netlist (exhaustively up to 12 inputs, else 10000 random vectors).
MappedDesign tech_map(const Netlist& n, int k, bool verify = true);

}  // namespace redact
