// SPDX-License-Identifier: Apache-2.0
#include "redact/techmap.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "redact/equiv.hpp"

namespace redact {

namespace {

// ---- decomposition into 2-input gates -----------------------------------

struct Decomposer {
  const Netlist& src;
  Netlist out;
  int tmp = 0;

  NetIdx fresh() { return out.add_net("_d" + std::to_string(tmp++)); }

  NetIdx gate(CellKind kind, std::vector<NetIdx> ins) {
    NetIdx o = fresh();
    out.add_cell(Cell{"_dc" + std::to_string(tmp), kind, std::move(ins), o,
                      {}, "", 0});
    return o;
  }

  void gate_into(NetIdx o, CellKind kind, std::vector<NetIdx> ins) {
    out.add_cell(Cell{"g_" + out.net_name(o), kind, std::move(ins), o, {}, "", 0});
  }

  // Shannon decomposition of a truth table over already-mapped input nets.
  NetIdx lut_value(const std::vector<uint8_t>& tt, const std::vector<NetIdx>& ins) {
    bool all0 = true, all1 = true;
    for (uint8_t t : tt) (t ? all0 : all1) = false;
    if (all0) return gate(CellKind::Const0, {});
    if (all1) return gate(CellKind::Const1, {});
    if (ins.size() == 1) {
      if (tt[0] == 0 && tt[1] == 1) return ins[0];
      return gate(CellKind::Not, {ins[0]});
    }
    size_t half = tt.size() / 2;
    std::vector<uint8_t> lo(tt.begin(), tt.begin() + half);
    std::vector<uint8_t> hi(tt.begin() + half, tt.end());
    std::vector<NetIdx> rest(ins.begin(), ins.end() - 1);
    NetIdx sel = ins.back();
    if (lo == hi) return lut_value(lo, rest);
    NetIdx a = lut_value(lo, rest);
    NetIdx b = lut_value(hi, rest);
    // mux(a, b, sel) out of 2-input gates.
    NetIdx ns = gate(CellKind::Not, {sel});
    NetIdx t0 = gate(CellKind::And2, {a, ns});
    NetIdx t1 = gate(CellKind::And2, {b, sel});
    return gate(CellKind::Or2, {t0, t1});
  }

  Netlist run() {
    out.name = src.name;
    for (const auto& net : src.nets) out.add_net(net.name);
    for (NetIdx pi : src.inputs) out.inputs.push_back(pi);
    for (const auto& c : src.cells) {
      switch (c.kind) {
        case CellKind::Dff:
          out.add_cell(c);
          break;
        case CellKind::InputBuf:
        case CellKind::OutputBuf:
          gate_into(c.output, CellKind::InputBuf, {c.inputs[0]});
          break;
        case CellKind::Const0:
        case CellKind::Const1:
        case CellKind::Not:
        case CellKind::And2:
        case CellKind::Or2:
        case CellKind::Xor2:
          gate_into(c.output, c.kind, c.inputs);
          break;
        case CellKind::Mux2: {
          NetIdx ns = gate(CellKind::Not, {c.inputs[2]});
          NetIdx t0 = gate(CellKind::And2, {c.inputs[0], ns});
          NetIdx t1 = gate(CellKind::And2, {c.inputs[1], c.inputs[2]});
          gate_into(c.output, CellKind::Or2, {t0, t1});
          break;
        }
        case CellKind::Lut: {
          if (c.inputs.empty()) {
            gate_into(c.output, c.truth[0] ? CellKind::Const1 : CellKind::Const0, {});
          } else {
            NetIdx v = lut_value(c.truth, c.inputs);
            gate_into(c.output, CellKind::InputBuf, {v});
          }
          break;
        }
      }
    }
    for (NetIdx po : src.outputs) out.add_output(po);
    return std::move(out);
  }
};

// ---- cone collapsing ------------------------------------------------------

struct Mapper {
  const Netlist& g;  // decomposed gate netlist
  int k;
  std::vector<int> drv;
  std::vector<std::vector<int>> cut;  // per net: sorted leaf nets; empty for const cones

  explicit Mapper(const Netlist& g_, int k_) : g(g_), k(k_) {}

  // Word-parallel cone evaluation: leaf i carries the standard pattern so
  // the root word is the truth table itself (|leaves| <= 6).
  std::vector<uint8_t> cone_truth(NetIdx root, const std::vector<int>& leaves) {
    static const uint64_t pattern[6] = {
        0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
        0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
    std::map<NetIdx, uint64_t> value;
    for (size_t i = 0; i < leaves.size(); ++i) value[leaves[i]] = pattern[i];
    uint64_t word = eval_net(root, value);
    size_t rows = size_t{1} << leaves.size();
    std::vector<uint8_t> tt(rows);
    for (size_t m = 0; m < rows; ++m) tt[m] = (word >> m) & 1;
    return tt;
  }

  uint64_t eval_net(NetIdx net, std::map<NetIdx, uint64_t>& value) {
    auto it = value.find(net);
    if (it != value.end()) return it->second;
    int d = drv[net];
    if (d < 0) throw Error("tech_map: cone leaf escaped support");
    const Cell& c = g.cells[d];
    uint64_t r = 0;
    switch (c.kind) {
      case CellKind::Const0: r = 0; break;
      case CellKind::Const1: r = ~uint64_t{0}; break;
      case CellKind::InputBuf:
      case CellKind::OutputBuf: r = eval_net(c.inputs[0], value); break;
      case CellKind::Not: r = ~eval_net(c.inputs[0], value); break;
      case CellKind::And2:
        r = eval_net(c.inputs[0], value) & eval_net(c.inputs[1], value);
        break;
      case CellKind::Or2:
        r = eval_net(c.inputs[0], value) | eval_net(c.inputs[1], value);
        break;
      case CellKind::Xor2:
        r = eval_net(c.inputs[0], value) ^ eval_net(c.inputs[1], value);
        break;
      default: throw Error("tech_map: unexpected cell in gate netlist");
    }
    value[net] = r;
    return r;
  }
};

}  // namespace

MappedDesign tech_map(const Netlist& n, int k, bool verify) {
  if (k < 2) throw Error("tech_map: K must be at least 2");
  require_integrity(n, "tech_map");

  Netlist gates = Decomposer{n, {}, 0}.run();
  Mapper m(gates, k);
  m.drv = gates.drivers();

  // Topological order over nets.
  std::vector<NetIdx> order;
  {
    std::vector<int> pending(gates.cells.size(), 0);
    std::vector<std::vector<int>> waiters(gates.nets.size());
    std::vector<NetIdx> ready;
    for (NetIdx net = 0; net < static_cast<NetIdx>(gates.nets.size()); ++net) {
      int d = m.drv[net];
      if (d < 0 || gates.cells[d].kind == CellKind::Dff) ready.push_back(net);
    }
    for (size_t ci = 0; ci < gates.cells.size(); ++ci) {
      const Cell& c = gates.cells[ci];
      if (c.kind == CellKind::Dff) continue;
      pending[ci] = static_cast<int>(c.inputs.size());
      for (NetIdx in : c.inputs) waiters[in].push_back(static_cast<int>(ci));
      if (c.inputs.empty()) ready.push_back(c.output);
    }
    std::vector<uint8_t> emitted(gates.nets.size(), 0);
    size_t head = 0;
    while (head < ready.size()) {
      NetIdx net = ready[head++];
      if (emitted[net]) continue;
      emitted[net] = 1;
      order.push_back(net);
      for (int ci : waiters[net])
        if (--pending[ci] == 0) ready.push_back(gates.cells[ci].output);
    }
    if (order.size() != gates.nets.size())
      throw CycleError("tech_map: combinational cycle in '" + n.name + "'");
  }

  // Greedy cuts: merge input cuts while the support stays within K.
  m.cut.resize(gates.nets.size());
  auto merged_size = [](const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0, count = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i] < b[j])) ++i;
      else if (i == a.size() || b[j] < a[i]) ++j;
      else ++i, ++j;
      ++count;
    }
    return count;
  };
  auto merge = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  };

  for (NetIdx net : order) {
    int d = m.drv[net];
    if (d < 0 || gates.cells[d].kind == CellKind::Dff) {
      m.cut[net] = {net};
      continue;
    }
    const Cell& c = gates.cells[d];
    if (c.inputs.empty()) {
      m.cut[net] = {};  // constant cone
      continue;
    }
    std::vector<int> acc = m.cut[c.inputs[0]];
    for (size_t i = 1; i < c.inputs.size(); ++i) {
      const auto& ci = m.cut[c.inputs[i]];
      if (merged_size(acc, ci) <= static_cast<size_t>(k)) {
        acc = merge(acc, ci);
      } else if (merged_size(acc, {c.inputs[i]}) <= static_cast<size_t>(k)) {
        acc = merge(acc, {c.inputs[i]});
      } else {
        acc = merge({c.inputs[0]}, {c.inputs[i]});
        for (size_t j = 1; j < i; ++j) acc = merge(acc, {c.inputs[j]});
      }
    }
    if (acc.size() > static_cast<size_t>(k))
      throw Error("tech_map: gate fan-in exceeds K after decomposition");
    m.cut[net] = std::move(acc);
  }

  // Root selection: primary outputs and DFF data nets, then every cone leaf.
  std::set<NetIdx> roots;
  std::vector<NetIdx> work;
  auto want_root = [&](NetIdx net) {
    int d = m.drv[net];
    if (d < 0) return;                                // PI
    if (gates.cells[d].kind == CellKind::Dff) return; // state output
    if (roots.insert(net).second) work.push_back(net);
  };
  for (NetIdx po : gates.outputs) want_root(po);
  for (const auto& c : gates.cells)
    if (c.kind == CellKind::Dff) want_root(c.inputs[0]);
  while (!work.empty()) {
    NetIdx net = work.back();
    work.pop_back();
    for (NetIdx leaf : m.cut[net]) want_root(leaf);
  }

  // Build the LUT netlist.
  Netlist out;
  out.name = n.name;
  for (const auto& net : gates.nets) out.add_net(net.name);
  for (NetIdx pi : gates.inputs) out.inputs.push_back(pi);
  int seq = 0;
  std::vector<NetIdx> root_list(roots.begin(), roots.end());
  std::sort(root_list.begin(), root_list.end());
  for (NetIdx root : root_list) {
    std::vector<int> leaves = m.cut[root];
    std::vector<uint8_t> tt = m.cone_truth(root, leaves);
    Cell lut;
    lut.name = "lut" + std::to_string(seq++) + "_" + gates.net_name(root);
    lut.kind = CellKind::Lut;
    for (int leaf : leaves) lut.inputs.push_back(leaf);
    lut.output = root;
    lut.truth = std::move(tt);
    out.add_cell(std::move(lut));
  }
  for (const auto& c : gates.cells)
    if (c.kind == CellKind::Dff) out.add_cell(c);
  for (NetIdx po : gates.outputs) out.add_output(po);

  // Give every DFF a dedicated feeding LUT so a slot pairing always exists.
  auto cons = out.consumers();
  auto drv2 = out.drivers();
  for (size_t ci = 0; ci < out.cells.size(); ++ci) {
    if (out.cells[ci].kind != CellKind::Dff) continue;
    NetIdx data = out.cells[ci].inputs[0];
    int d = drv2[data];
    bool dedicated = d >= 0 && out.cells[d].kind == CellKind::Lut &&
                     cons[data].size() == 1;
    if (dedicated)
      for (NetIdx po : out.outputs)
        if (po == data) dedicated = false;
    if (!dedicated) {
      NetIdx shadow = out.add_net("_ff" + std::to_string(seq));
      out.add_cell(Cell{"lutff" + std::to_string(seq++), CellKind::Lut,
                        {data}, shadow, {0, 1}, "", 0});
      out.cells[ci].inputs[0] = shadow;
    }
  }

  // Drop nets that ended up unused (interior gate nets).
  {
    std::vector<uint8_t> used(out.nets.size(), 0);
    for (NetIdx pi : out.inputs) used[pi] = 1;
    for (NetIdx po : out.outputs) used[po] = 1;
    for (const auto& c : out.cells) {
      used[c.output] = 1;
      for (NetIdx in : c.inputs) used[in] = 1;
    }
    Netlist clean;
    clean.name = out.name;
    std::vector<NetIdx> remap(out.nets.size(), kNoNet);
    for (size_t i = 0; i < out.nets.size(); ++i)
      if (used[i]) remap[i] = clean.add_net(out.nets[i].name);
    for (NetIdx pi : out.inputs) clean.inputs.push_back(remap[pi]);
    for (auto c : out.cells) {
      for (auto& in : c.inputs) in = remap[in];
      c.output = remap[c.output];
      clean.add_cell(std::move(c));
    }
    for (NetIdx po : out.outputs) clean.add_output(remap[po]);
    out = std::move(clean);
  }

  require_integrity(out, "tech_map");

  MappedDesign md;
  md.num_inputs = static_cast<int>(out.inputs.size());
  md.num_outputs = static_cast<int>(out.outputs.size());
  for (const auto& c : out.cells) {
    if (c.kind == CellKind::Lut) {
      if (c.inputs.size() > static_cast<size_t>(k))
        throw Error("tech_map: produced LUT wider than K");
      ++md.lut_count;
    } else if (c.kind == CellKind::Dff) {
      ++md.dff_count;
    }
  }
  md.lut_netlist = std::move(out);

  if (verify) {
    Netlist a = scan_cut(n);
    Netlist b = scan_cut(md.lut_netlist);
    PortMap pm = PortMap::identity(a);
    auto rep = check_equivalence(a, b, pm, 12, 10000, 0x7ec4);
    if (!rep.equivalent)
      throw Error("tech_map: mapped netlist diverges: " + rep.counterexample);
  }
  return md;
}

}  // namespace redact
