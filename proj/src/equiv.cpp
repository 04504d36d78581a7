// SPDX-License-Identifier: Apache-2.0
#include "redact/equiv.hpp"

#include <random>

namespace redact {

PortMap PortMap::identity(const Netlist& a) {
  PortMap pm;
  for (NetIdx n : a.inputs) pm.in_map.emplace_back(a.net_name(n), a.net_name(n));
  for (NetIdx n : a.outputs) pm.out_map.emplace_back(a.net_name(n), a.net_name(n));
  return pm;
}

EquivalenceReport check_equivalence(const Netlist& a, const Netlist& b,
                                    const PortMap& pm, int exhaustive_limit,
                                    int n_random, uint64_t seed, SimMode mode_a,
                                    SimMode mode_b) {
  Simulator sa(a), sb(b);

  auto port_pos = [](const Netlist& n, const std::vector<NetIdx>& list,
                     const std::string& name) {
    for (size_t i = 0; i < list.size(); ++i)
      if (n.net_name(list[i]) == name) return static_cast<int>(i);
    throw Error("equivalence: port '" + name + "' not found");
  };

  std::vector<std::pair<int, int>> in_pairs, out_pairs;
  for (const auto& [pa, pb] : pm.in_map)
    in_pairs.emplace_back(port_pos(a, a.inputs, pa), port_pos(b, b.inputs, pb));
  for (const auto& [pa, pb] : pm.out_map)
    out_pairs.emplace_back(port_pos(a, a.outputs, pa), port_pos(b, b.outputs, pb));

  size_t n_in = in_pairs.size();
  bool exhaustive = n_in <= static_cast<size_t>(exhaustive_limit);
  uint64_t total = exhaustive ? (uint64_t{1} << n_in)
                              : static_cast<uint64_t>(n_random);

  std::mt19937_64 rng(seed);
  std::vector<uint64_t> pia(a.inputs.size()), pib(b.inputs.size());
  std::vector<uint64_t> va, vb;
  auto sta = sa.initial_state_words();
  auto stb = sb.initial_state_words();

  EquivalenceReport rep;
  for (uint64_t base = 0; base < total; base += 64) {
    uint64_t lanes = std::min<uint64_t>(64, total - base);
    // Mapped input i of vector (base+l) goes to lane l.
    std::vector<uint64_t> bits(n_in, 0);
    for (uint64_t l = 0; l < lanes; ++l) {
      uint64_t vec = exhaustive ? base + l : rng();
      for (size_t i = 0; i < n_in; ++i)
        if ((vec >> i) & 1) bits[i] |= uint64_t{1} << l;
    }
    std::fill(pia.begin(), pia.end(), 0);
    std::fill(pib.begin(), pib.end(), 0);
    for (size_t i = 0; i < n_in; ++i) {
      pia[in_pairs[i].first] = bits[i];
      pib[in_pairs[i].second] = bits[i];
    }
    uint64_t ok_a = sa.eval(mode_a, pia, sta, va);
    uint64_t ok_b = sb.eval(mode_b, pib, stb, vb);
    uint64_t lane_mask = lanes == 64 ? ~uint64_t{0} : (uint64_t{1} << lanes) - 1;
    if ((ok_a & lane_mask) != lane_mask || (ok_b & lane_mask) != lane_mask) {
      rep.counterexample = "oscillation during equivalence check";
      return rep;
    }
    for (auto [oa, ob] : out_pairs) {
      uint64_t da = va[a.outputs[oa]], db = vb[b.outputs[ob]];
      uint64_t diff = (da ^ db) & lane_mask;
      if (diff) {
        int l = std::countr_zero(diff);
        std::string cex;
        for (size_t i = 0; i < n_in; ++i)
          cex += ((bits[i] >> l) & 1) ? '1' : '0';
        rep.counterexample = "output '" + a.net_name(a.outputs[oa]) +
                             "' differs on inputs " + cex;
        rep.vectors_checked = base + l;
        return rep;
      }
    }
    rep.vectors_checked = base + lanes;
  }
  rep.equivalent = true;
  return rep;
}

}  // namespace redact
