// SPDX-License-Identifier: Apache-2.0
#include "redact/bitgen.hpp"

#include <map>

namespace redact {

namespace {

void set_binary(Bitstream& b, const std::vector<int>& bit_ids, int value) {
  for (size_t i = 0; i < bit_ids.size(); ++i)
    b.bits[bit_ids[i]] = (value >> i) & 1;
}

}  // namespace

Bitstream emit_bitstream(const MappedDesign& d, const Placement& p,
                         const RoutingResult& r, const Fabric& f) {
  const Netlist& n = d.lut_netlist;
  const FabricParams& fp = f.params;
  const int Wch = fp.channel_width, I = fp.clb_inputs(), K = fp.lut_inputs;
  Bitstream b = make_bitstream(f);

  // Output pads face outward; everything else stays an input.
  for (size_t i = 0; i < n.outputs.size(); ++i)
    b.bits[f.pads[p.output_pad[i]].dir_bit] = 1;

  // Routing: track driver enables, pin selects, pad output selects.
  std::map<std::pair<int, NetIdx>, int> clb_net_pin;  // (clb, net) -> pin q
  for (const auto& tree : r.nets) {
    for (const auto& hop : tree.hops) {
      int seg = hop.track_node / Wch, t = hop.track_node % Wch;
      b.bits[f.segments[seg].sources[t][hop.source_ordinal].bit] = 1;
    }
    for (auto [pin, node] : tree.pin_taps) {
      int clb = pin / I, q = pin % I;
      set_binary(b, f.clbs[clb].pins[q].sel_bits, node % Wch);
      clb_net_pin[{clb, tree.net}] = q;
    }
    for (auto [pad, node] : tree.pad_taps)
      set_binary(b, f.pads[pad].outsel_bits, node % Wch);
  }

  // CLB logic: crossbar selects, truth tables, bypass bits.
  std::map<std::pair<int, NetIdx>, int> clb_net_slot;  // intra-CLB sources
  for (size_t u = 0; u < p.units.size(); ++u)
    clb_net_slot[{p.unit_clb[u], p.units[u].out_net}] = p.unit_slot[u];

  for (size_t u = 0; u < p.units.size(); ++u) {
    const SlotUnit& unit = p.units[u];
    const Cell& lut = n.cells[unit.lut];
    int clb = p.unit_clb[u], slot = p.unit_slot[u];
    const ClbInfo& ci = f.clbs[clb];
    int kk = static_cast<int>(lut.inputs.size());
    int nbx = static_cast<int>(ci.xbar_bits[slot].size()) / K;

    for (int j = 0; j < kk; ++j) {
      NetIdx x = lut.inputs[j];
      int source;
      if (auto it = clb_net_slot.find({clb, x}); it != clb_net_slot.end()) {
        source = I + it->second;
      } else if (auto it2 = clb_net_pin.find({clb, x});
                 it2 != clb_net_pin.end()) {
        source = it2->second;
      } else {
        throw Error("emit_bitstream: net '" + n.net_name(x) +
                    "' not available in CLB " + std::to_string(clb));
      }
      std::vector<int> pin_bits(ci.xbar_bits[slot].begin() + j * nbx,
                                ci.xbar_bits[slot].begin() + (j + 1) * nbx);
      set_binary(b, pin_bits, source);
    }

    // Truth table replicated over unused select pins, so the function is
    // independent of them.
    for (int m = 0; m < (1 << K); ++m)
      b.bits[ci.lut_bits[slot][m]] = lut.truth[m & ((1 << kk) - 1)];

    if (unit.dff >= 0) {
      if (n.cells[unit.dff].init != 0)
        throw Error("emit_bitstream: fabric slot FFs power up at 0, DFF '" +
                    n.cells[unit.dff].name + "' has init 1");
      b.bits[ci.bypass_bits[slot]] = 1;
    }
  }
  return b;
}

}  // namespace redact
