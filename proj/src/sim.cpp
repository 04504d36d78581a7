// SPDX-License-Identifier: Apache-2.0
#include "redact/sim.hpp"

#include <algorithm>
#include <cassert>

namespace redact {

Simulator::Simulator(const Netlist& n) : netlist_(&n) {
  for (size_t ci = 0; ci < n.cells.size(); ++ci) {
    if (n.cells[ci].kind == CellKind::Dff)
      dff_cells_.push_back(static_cast<CellIdx>(ci));
    else
      comb_cells_.push_back(static_cast<CellIdx>(ci));
  }

  // Kahn levelization of the combinational graph. DFF outputs, primary
  // inputs and constants are sources; DFF data pins are sinks.
  auto drv = n.drivers();
  std::vector<int> pending(comb_cells_.size(), 0);
  std::vector<int> comb_of_cell(n.cells.size(), -1);
  for (size_t i = 0; i < comb_cells_.size(); ++i)
    comb_of_cell[comb_cells_[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> net_to_comb(n.nets.size());
  std::vector<int> ready;
  for (size_t i = 0; i < comb_cells_.size(); ++i) {
    const Cell& c = n.cells[comb_cells_[i]];
    int deps = 0;
    for (NetIdx in : c.inputs) {
      if (in < 0) continue;
      int d = drv[in];
      if (d >= 0 && n.cells[d].kind != CellKind::Dff && comb_of_cell[d] >= 0) {
        ++deps;
        net_to_comb[in].push_back(static_cast<int>(i));
      }
    }
    pending[i] = deps;
    if (deps == 0) ready.push_back(static_cast<int>(i));
  }
  size_t head = 0;
  while (head < ready.size()) {
    int i = ready[head++];
    topo_cells_.push_back(comb_cells_[i]);
    NetIdx out = n.cells[comb_cells_[i]].output;
    if (out >= 0)
      for (int j : net_to_comb[out])
        if (--pending[j] == 0) ready.push_back(j);
  }
  acyclic_ok_ = topo_cells_.size() == comb_cells_.size();
  if (!acyclic_ok_) topo_cells_.clear();
}

void Simulator::eval_cell(const Cell& c, const std::vector<uint64_t>& in,
                          std::vector<uint64_t>& out) const {
  auto val = [&](size_t pin) { return in[c.inputs[pin]]; };
  uint64_t r = 0;
  switch (c.kind) {
    case CellKind::InputBuf:
    case CellKind::OutputBuf: r = val(0); break;
    case CellKind::Not: r = ~val(0); break;
    case CellKind::And2: r = val(0) & val(1); break;
    case CellKind::Or2: r = val(0) | val(1); break;
    case CellKind::Xor2: r = val(0) ^ val(1); break;
    case CellKind::Mux2: {
      uint64_t s = val(2);
      r = (s & val(1)) | (~s & val(0));
      break;
    }
    case CellKind::Const0: r = 0; break;
    case CellKind::Const1: r = ~uint64_t{0}; break;
    case CellKind::Lut: {
      size_t k = c.inputs.size();
      for (size_t m = 0; m < c.truth.size(); ++m) {
        if (!c.truth[m]) continue;
        uint64_t term = ~uint64_t{0};
        for (size_t j = 0; j < k; ++j)
          term &= (m >> j) & 1 ? val(j) : ~val(j);
        r |= term;
      }
      break;
    }
    case CellKind::Dff: return;  // state-driven, handled by the caller
  }
  out[c.output] = r;
}

uint64_t Simulator::eval(SimMode mode, std::span<const uint64_t> pi_words,
                         std::span<const uint64_t> state_words,
                         std::vector<uint64_t>& net_values,
                         size_t max_sweeps) const {
  const Netlist& n = *netlist_;
  assert(pi_words.size() == n.inputs.size());
  assert(state_words.size() == dff_cells_.size());

  net_values.assign(n.nets.size(), 0);
  auto apply_sources = [&](std::vector<uint64_t>& v) {
    for (size_t i = 0; i < n.inputs.size(); ++i) v[n.inputs[i]] = pi_words[i];
    for (size_t i = 0; i < dff_cells_.size(); ++i) {
      NetIdx out = n.cells[dff_cells_[i]].output;
      if (out >= 0) v[out] = state_words[i];
    }
  };
  apply_sources(net_values);

  if (mode == SimMode::Acyclic) {
    if (!acyclic_ok_)
      throw CycleError("combinational cycle in netlist '" + n.name + "'");
    for (CellIdx ci : topo_cells_) eval_cell(n.cells[ci], net_values, net_values);
    return ~uint64_t{0};
  }

  // Jacobi relaxation from all-zero. A lane is unstable iff it still changed
  // during the final sweep.
  std::vector<uint64_t> next = net_values;
  if (max_sweeps == 0) max_sweeps = std::max<size_t>(n.nets.size(), 1);
  uint64_t changed = 0;
  for (size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (CellIdx ci : comb_cells_) eval_cell(n.cells[ci], net_values, next);
    changed = 0;
    for (size_t i = 0; i < next.size(); ++i) changed |= net_values[i] ^ next[i];
    net_values.swap(next);
    if (changed == 0) return ~uint64_t{0};
  }
  return ~changed;
}

std::vector<uint64_t> Simulator::output_words(
    const std::vector<uint64_t>& net_values) const {
  std::vector<uint64_t> out;
  out.reserve(netlist_->outputs.size());
  for (NetIdx po : netlist_->outputs) out.push_back(net_values[po]);
  return out;
}

std::vector<uint64_t> Simulator::next_state_words(
    const std::vector<uint64_t>& net_values, const std::string& clock,
    std::span<const uint64_t> state_words) const {
  std::vector<uint64_t> next(state_words.begin(), state_words.end());
  for (size_t i = 0; i < dff_cells_.size(); ++i) {
    const Cell& c = netlist_->cells[dff_cells_[i]];
    if (c.clock == clock) next[i] = net_values[c.inputs[0]];
  }
  return next;
}

std::vector<uint64_t> Simulator::initial_state_words() const {
  std::vector<uint64_t> st(dff_cells_.size(), 0);
  for (size_t i = 0; i < dff_cells_.size(); ++i)
    if (netlist_->cells[dff_cells_[i]].init) st[i] = ~uint64_t{0};
  return st;
}

namespace {

std::vector<uint64_t> pack_inputs(const Netlist& n, const SimVector& v) {
  std::vector<uint64_t> pi(n.inputs.size(), 0);
  size_t matched = 0;
  for (size_t i = 0; i < n.inputs.size(); ++i) {
    auto it = v.inputs.find(n.net_name(n.inputs[i]));
    if (it == v.inputs.end())
      throw Error("simulate: missing value for input '" +
                  n.net_name(n.inputs[i]) + "'");
    pi[i] = it->second ? ~uint64_t{0} : 0;
    ++matched;
  }
  if (matched != v.inputs.size())
    throw Error("simulate: vector assigns unknown inputs");
  return pi;
}

std::vector<uint64_t> pack_states(const Simulator& sim, const SimVector& v) {
  const Netlist& n = sim.netlist();
  auto st = sim.initial_state_words();
  size_t used = 0;
  for (size_t i = 0; i < sim.dff_cells().size(); ++i) {
    auto it = v.dff_state.find(n.cells[sim.dff_cells()[i]].name);
    if (it != v.dff_state.end()) {
      st[i] = it->second ? ~uint64_t{0} : 0;
      ++used;
    }
  }
  if (used != v.dff_state.size())
    throw Error("simulate: vector assigns unknown DFF state");
  return st;
}

}  // namespace

SimResult simulate(const Netlist& n, const SimVector& v, SimMode mode) {
  Simulator sim(n);
  auto pi = pack_inputs(n, v);
  auto st = pack_states(sim, v);
  std::vector<uint64_t> vals;
  uint64_t stable = sim.eval(mode, pi, st, vals);
  if (mode == SimMode::FixedPoint && !(stable & 1))
    throw OscillationError("netlist '" + n.name +
                           "' did not stabilize within |nets| sweeps");
  SimResult res;
  res.stabilized = (stable & 1) != 0;
  for (NetIdx po : n.outputs)
    res.outputs.emplace_back(n.net_name(po), (vals[po] & 1) != 0);
  return res;
}

std::vector<SeqTraceStep> simulate_sequential(
    const Netlist& n, const std::string& clock,
    const std::vector<SimVector>& stimulus) {
  Simulator sim(n);
  std::vector<uint64_t> state = sim.initial_state_words();
  std::vector<SeqTraceStep> trace;
  SimMode mode = sim.combinational_acyclic() ? SimMode::Acyclic : SimMode::FixedPoint;
  std::vector<uint64_t> vals;
  for (const SimVector& step : stimulus) {
    auto pi = pack_inputs(n, step);
    if (!step.dff_state.empty())
      throw Error("simulate_sequential: stimulus may not override DFF state");
    uint64_t stable = sim.eval(mode, pi, state, vals);
    if (!(stable & 1))
      throw OscillationError("netlist '" + n.name + "' oscillates in cycle " +
                             std::to_string(trace.size()));
    SeqTraceStep t;
    for (NetIdx po : n.outputs)
      t.outputs.emplace_back(n.net_name(po), (vals[po] & 1) != 0);
    state = sim.next_state_words(vals, clock, state);
    for (size_t i = 0; i < sim.dff_cells().size(); ++i)
      t.dff_states.emplace_back(n.cells[sim.dff_cells()[i]].name,
                                (state[i] & 1) != 0);
    trace.push_back(std::move(t));
  }
  return trace;
}

}  // namespace redact
