// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "redact/fabric.hpp"
#include "redact/techmap.hpp"

namespace redact {

// One fabric slot's worth of logic: a LUT, optionally with the DFF it feeds.
struct SlotUnit {
  CellIdx lut = -1;
  CellIdx dff = -1;  // -1 when the slot output is combinational
  NetIdx out_net = kNoNet;  // net consumers read (DFF output when paired)
};

struct Placement {
  std::vector<SlotUnit> units;
  std::vector<int> unit_clb;   // CLB index per unit
  std::vector<int> unit_slot;  // slot within the CLB
  std::vector<int> input_pad;  // per primary input position
  std::vector<int> output_pad; // per primary output position
  double wirelength = 0;       // final bounding-box cost
};

/// Greedy shared-net packing into CLBs followed by seeded simulated
/// annealing over CLB tiles and pad assignments (bounding-box wirelength).
/// Throws CapacityError naming the binding resource (IO, LUT or DFF).
Placement pack_place(const MappedDesign& d, const Fabric& f, uint64_t seed);

}  // namespace redact
