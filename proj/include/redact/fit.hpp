// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "redact/bitgen.hpp"
#include "redact/equiv.hpp"

namespace redact {

struct FitReport {
  std::string module;
  int width = 0;
  double io_utilization = 0;   // used pads / total pads, percent
  double clb_utilization = 0;  // used CLBs / W^2, percent
  double lut_utilization = 0;  // LUTs / (W^2 * N), percent
  int bitstream_bits = 0;
  int lut_count = 0;
  int dff_count = 0;

  std::string csv_row() const;
  static std::string csv_header();
  std::string to_json() const;
};

struct FitAttempt {
  int width;
  bool ok;
  std::string failure;  // empty on success
};

struct FitResult {
  Fabric fabric;
  FitReport report;
  Bitstream bitstream;
  MappedDesign mapped;
  Placement placement;
  RoutingResult routing;
  std::vector<FitAttempt> attempts;
  PortMap port_map;  // module ports -> fabric pad ports
};

/// Smallest-fabric search: starting at the width implied by the I/O and LUT
/// capacity lower bounds, attempt pack/place/route and grow on failure. The
/// returned configuration is equivalence-checked against the module
/// (exhaustive up to 16 inputs, else 10000 random vectors) and the routing
/// exclusivity checker runs on every result. Throws GiveUpError past
/// max_width.
FitResult fit_search(const Netlist& module, const FabricParams& arch,
                     uint64_t seed, int max_width = 12);

/// Lower bound on the grid width from capacity constraints alone.
int fit_lower_bound(int pins, int luts, int dffs, const FabricParams& arch);

/// Port correspondence and equivalence check for an already-mapped design;
/// exposed for reuse by tests and the attack's post-verification.
PortMap fabric_port_map(const Netlist& module, const MappedDesign& mapped,
                        const Placement& placement, const Fabric& fabric);
EquivalenceReport verify_configuration(const Netlist& module, const PortMap& pm,
                                       const Netlist& configured_fabric,
                                       int exhaustive_limit = 16,
                                       int n_random = 10000, uint64_t seed = 1);

}  // namespace redact
