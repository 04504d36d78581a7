// SPDX-License-Identifier: Apache-2.0
#include "redact/tseitin.hpp"

namespace redact {

namespace {

// Encoded value: either a constant or a DIMACS literal.
struct Val {
  int c = -1;  // 0/1 constant, -1 when literal
  int l = 0;

  static Val constant(int v) { return Val{v, 0}; }
  static Val lit(int v) { return Val{-1, v}; }
  bool is_const() const { return c >= 0; }
};

struct Encoder {
  Cnf& cnf;
  bool fold;
  StructuralHash* hash = nullptr;

  Val inv(Val x) { return x.is_const() ? Val::constant(1 - x.c) : Val::lit(-x.l); }

  // Looks up / records a gate in the hash-consing table. op codes are local
  // to this encoder; commutative gates pass normalized (sorted) operands.
  bool lookup(int op, int a, int b, int c, Val& out) {
    if (!hash || !fold) return false;
    auto it = hash->table.find(StructuralHash::Key{op, a, b, c});
    if (it == hash->table.end()) return false;
    out = Val::lit(it->second);
    return true;
  }
  void remember(int op, int a, int b, int c, Val v) {
    if (hash && fold && !v.is_const())
      hash->table.emplace(StructuralHash::Key{op, a, b, c}, v.l);
  }

  // Materializes a literal even for constants (unit-claused fresh variable).
  int force_lit(Val x) {
    if (!x.is_const()) return x.l;
    int v = cnf.new_var();
    cnf.add_clause({x.c ? v : -v});
    return v;
  }

  Val gate_and(Val a, Val b) {
    if (fold) {
      if (a.c == 0 || b.c == 0) return Val::constant(0);
      if (a.c == 1) return b;
      if (b.c == 1) return a;
      if (a.l == b.l) return a;
      if (a.l == -b.l) return Val::constant(0);
    }
    int x = force_lit(a), y = force_lit(b);
    if (x > y) std::swap(x, y);
    Val out;
    if (lookup(1, x, y, 0, out)) return out;
    int o = cnf.new_var();
    cnf.add_clause({-x, -y, o});
    cnf.add_clause({x, -o});
    cnf.add_clause({y, -o});
    remember(1, x, y, 0, Val::lit(o));
    return Val::lit(o);
  }

  Val gate_or(Val a, Val b) {
    if (fold) {
      if (a.c == 1 || b.c == 1) return Val::constant(1);
      if (a.c == 0) return b;
      if (b.c == 0) return a;
      if (a.l == b.l) return a;
      if (a.l == -b.l) return Val::constant(1);
    }
    int x = force_lit(a), y = force_lit(b);
    if (x > y) std::swap(x, y);
    Val out;
    if (lookup(2, x, y, 0, out)) return out;
    int o = cnf.new_var();
    cnf.add_clause({x, y, -o});
    cnf.add_clause({-x, o});
    cnf.add_clause({-y, o});
    remember(2, x, y, 0, Val::lit(o));
    return Val::lit(o);
  }

  Val gate_xor(Val a, Val b) {
    if (fold) {
      if (a.is_const() && b.is_const()) return Val::constant(a.c ^ b.c);
      if (a.is_const()) return a.c ? inv(b) : b;
      if (b.is_const()) return b.c ? inv(a) : a;
      if (a.l == b.l) return Val::constant(0);
      if (a.l == -b.l) return Val::constant(1);
    }
    int x = force_lit(a), y = force_lit(b);
    if (x > y) std::swap(x, y);
    Val out;
    if (lookup(3, x, y, 0, out)) return out;
    int o = cnf.new_var();
    cnf.add_clause({-x, -y, -o});
    cnf.add_clause({x, y, -o});
    cnf.add_clause({-x, y, o});
    cnf.add_clause({x, -y, o});
    remember(3, x, y, 0, Val::lit(o));
    return Val::lit(o);
  }

  Val gate_mux(Val a, Val b, Val s) {
    if (fold) {
      if (s.c == 0) return a;
      if (s.c == 1) return b;
      if (a.is_const() && b.is_const()) {
        if (a.c == b.c) return Val::constant(a.c);
        return a.c == 0 ? s : inv(s);
      }
      if (!a.is_const() && !b.is_const() && a.l == b.l) return a;
      if (a.c == 0) return gate_and(s, b);
      if (a.c == 1) return gate_or(inv(s), b);
      if (b.c == 0) return gate_and(inv(s), a);
      if (b.c == 1) return gate_or(s, a);
    }
    int x = force_lit(a), y = force_lit(b), se = force_lit(s);
    Val out;
    if (lookup(4, x, y, se, out)) return out;
    int o = cnf.new_var();
    cnf.add_clause({se, -x, o});
    cnf.add_clause({se, x, -o});
    cnf.add_clause({-se, -y, o});
    cnf.add_clause({-se, y, -o});
    // Redundant but propagation-friendly.
    cnf.add_clause({-x, -y, o});
    cnf.add_clause({x, y, -o});
    remember(4, x, y, se, Val::lit(o));
    return Val::lit(o);
  }

  Val gate_lut(std::vector<uint8_t> tt, std::vector<Val> in) {
    if (fold) {
      // Cofactor constant inputs away.
      for (size_t i = in.size(); i-- > 0;) {
        if (!in[i].is_const()) continue;
        std::vector<uint8_t> next(tt.size() / 2);
        for (size_t m = 0; m < next.size(); ++m) {
          size_t low = m & ((size_t{1} << i) - 1);
          size_t high = (m >> i) << (i + 1);
          next[m] = tt[high | (static_cast<size_t>(in[i].c) << i) | low];
        }
        tt = std::move(next);
        in.erase(in.begin() + i);
      }
      bool all0 = true, all1 = true;
      for (uint8_t t : tt) (t ? all0 : all1) = false;
      if (all0) return Val::constant(0);
      if (all1) return Val::constant(1);
      if (in.size() == 1) return tt[1] ? in[0] : inv(in[0]);
    }
    size_t k = in.size();
    std::vector<int> lits(k);
    for (size_t i = 0; i < k; ++i) lits[i] = force_lit(in[i]);
    int o = cnf.new_var();
    std::vector<int> clause(k + 1);
    for (size_t m = 0; m < tt.size(); ++m) {
      for (size_t i = 0; i < k; ++i)
        clause[i] = ((m >> i) & 1) ? -lits[i] : lits[i];
      clause[k] = tt[m] ? o : -o;
      cnf.add_clause(clause);
    }
    return Val::lit(o);
  }
};

// Fresh-variable copy of a value when folding is off, so every net owns a
// distinct variable (textbook shape; keeps clause counting predictable).
Val rebind(Encoder& enc, Val v) {
  if (enc.fold) return v;
  if (v.is_const()) {
    int x = enc.cnf.new_var();
    enc.cnf.add_clause({v.c ? x : -x});
    return Val::lit(x);
  }
  if (v.l > 0) return v;  // already a plain variable
  int x = enc.cnf.new_var();
  enc.cnf.add_clause({-x, v.l});
  enc.cnf.add_clause({x, -v.l});
  return Val::lit(x);
}

}  // namespace

EncodedCircuit tseitin_encode_into(Cnf& cnf, const Netlist& n,
                                   const InputBinding& binding, bool fold,
                                   StructuralHash* hash) {
  for (const auto& c : n.cells)
    if (c.kind == CellKind::Dff)
      throw Error("tseitin: netlist '" + n.name + "' contains DFF '" + c.name +
                  "'; cut state first");

  // Kahn order over the cell graph. Overridden nets carry no dependency:
  // their consumers read the binding, which is what renders a cyclic keyed
  // netlist encodable frame by frame.
  auto drv = n.drivers();
  auto overridden = [&](NetIdx net) {
    return binding.net_lits.count(net) || binding.net_values.count(net);
  };
  std::vector<int> pending(n.cells.size(), 0);
  std::vector<std::vector<int>> net_to_cell(n.nets.size());
  std::vector<int> order;
  for (size_t i = 0; i < n.cells.size(); ++i) {
    int deps = 0;
    for (NetIdx in : n.cells[i].inputs) {
      if (overridden(in)) continue;
      if (drv[in] >= 0) {
        ++deps;
        net_to_cell[in].push_back(static_cast<int>(i));
      }
    }
    pending[i] = deps;
    if (deps == 0) order.push_back(static_cast<int>(i));
  }
  for (size_t head = 0; head < order.size(); ++head) {
    for (int j : net_to_cell[n.cells[order[head]].output])
      if (--pending[j] == 0) order.push_back(j);
  }
  if (order.size() != n.cells.size())
    throw CycleError("tseitin: combinational cycle in '" + n.name + "'");

  Encoder enc{cnf, fold, hash};
  std::vector<Val> val(n.nets.size());

  for (NetIdx pi : n.inputs) {
    const std::string& name = n.net_name(pi);
    if (auto it = binding.values.find(name); it != binding.values.end())
      val[pi] = fold ? Val::constant(it->second)
                     : rebind(enc, Val::constant(it->second));
    else if (auto it2 = binding.lits.find(name); it2 != binding.lits.end())
      val[pi] = Val::lit(it2->second);
    else
      val[pi] = Val::lit(cnf.new_var());
  }

  // Consumer-side values: overrides shadow the driver-computed value.
  auto consumed = [&](NetIdx net) -> Val {
    if (auto it = binding.net_values.find(net); it != binding.net_values.end())
      return fold ? Val::constant(it->second)
                  : Val::lit(0);  // resolved below for non-folding mode
    if (auto it = binding.net_lits.find(net); it != binding.net_lits.end())
      return Val::lit(it->second);
    return val[net];
  };
  if (!fold && !(binding.net_values.empty() && binding.net_lits.empty()))
    throw Error("tseitin: net overrides require folding mode");

  for (int ci : order) {
    const Cell& c = n.cells[ci];
    std::vector<Val> in(c.inputs.size());
    for (size_t i = 0; i < c.inputs.size(); ++i) in[i] = consumed(c.inputs[i]);
    Val out;
    switch (c.kind) {
      case CellKind::Const0: out = rebind(enc, Val::constant(0)); break;
      case CellKind::Const1: out = rebind(enc, Val::constant(1)); break;
      case CellKind::InputBuf:
      case CellKind::OutputBuf: out = rebind(enc, in[0]); break;
      case CellKind::Not: out = rebind(enc, enc.inv(in[0])); break;
      case CellKind::And2: out = enc.gate_and(in[0], in[1]); break;
      case CellKind::Or2: out = enc.gate_or(in[0], in[1]); break;
      case CellKind::Xor2: out = enc.gate_xor(in[0], in[1]); break;
      case CellKind::Mux2: out = enc.gate_mux(in[0], in[1], in[2]); break;
      case CellKind::Lut: out = enc.gate_lut(c.truth, in); break;
      case CellKind::Dff: break;  // unreachable
    }
    val[c.output] = out;
  }

  EncodedCircuit ec;
  ec.net_lit.assign(n.nets.size(), 0);
  ec.net_const.assign(n.nets.size(), -1);
  for (size_t i = 0; i < n.nets.size(); ++i) {
    if (val[i].is_const())
      ec.net_const[i] = static_cast<int8_t>(val[i].c);
    else
      ec.net_lit[i] = val[i].l;
  }
  return ec;
}

Cnf tseitin_encode(const Netlist& n) {
  Cnf cnf;
  EncodedCircuit ec = tseitin_encode_into(cnf, n, InputBinding{}, /*fold=*/false);
  for (NetIdx pi : n.inputs) cnf.input_vars[n.net_name(pi)] = ec.net_lit[pi];
  for (NetIdx po : n.outputs) cnf.output_vars[n.net_name(po)] = ec.net_lit[po];
  return cnf;
}

}  // namespace redact
