// SPDX-License-Identifier: Apache-2.0
// Key exposure, combinational loop analysis and IcySAT-style unrolling.
#include "redact/attack.hpp"

#include <algorithm>

namespace redact {

KeyedNetlist expose_keys(const Fabric& f) {
  const Netlist& n = f.netlist;
  NetIdx head = n.find_net("scan_in_head");
  if (head == kNoNet)
    throw BrokenChainError("fabric netlist has no scan_in_head");
  auto consumers = n.consumers();

  // Depth-first walk along data pins: at each net, the next chain element is
  // the unique prog_clk DFF reading it, or a buffer towards scan_out_tail.
  std::vector<CellIdx> chain;
  std::vector<uint8_t> on_chain(n.cells.size(), 0);
  NetIdx cur = head;
  bool reached_tail = false;
  while (true) {
    CellIdx next_dff = -1;
    int dff_count = 0;
    for (CellIdx ci : consumers[cur]) {
      const Cell& c = n.cells[ci];
      if (c.kind == CellKind::Dff && c.clock == kProgClk && c.inputs[0] == cur) {
        ++dff_count;
        next_dff = ci;
      }
    }
    if (dff_count > 1)
      throw BrokenChainError("net '" + n.net_name(cur) +
                             "' feeds several config DFF data pins");
    if (next_dff >= 0) {
      chain.push_back(next_dff);
      on_chain[next_dff] = 1;
      cur = n.cells[next_dff].output;
      continue;
    }
    // Follow buffers toward the tail.
    CellIdx buf = -1;
    for (CellIdx ci : consumers[cur]) {
      const Cell& c = n.cells[ci];
      if ((c.kind == CellKind::InputBuf || c.kind == CellKind::OutputBuf))
        buf = ci;
    }
    if (buf >= 0 && n.net_name(n.cells[buf].output) == "scan_out_tail") {
      reached_tail = true;
      break;
    }
    if (buf >= 0) {
      cur = n.cells[buf].output;
      continue;
    }
    break;
  }
  if (!reached_tail)
    throw BrokenChainError("scan_in_head does not reach scan_out_tail");

  int total_cfg = 0;
  for (const auto& c : n.cells)
    if (c.kind == CellKind::Dff && c.clock == kProgClk) ++total_cfg;
  if (static_cast<int>(chain.size()) != total_cfg)
    throw BrokenChainError("chain visits " + std::to_string(chain.size()) +
                           " config DFFs, fabric has " +
                           std::to_string(total_cfg));

  // Bit provenance: chain order must equal bit-map order.
  std::vector<int> bit_of_cell(n.cells.size(), -1);
  for (size_t i = 0; i < f.config_dffs.size(); ++i)
    bit_of_cell[f.config_dffs[i]] = static_cast<int>(i);

  KeyedNetlist kn;
  Netlist& out = kn.netlist;
  out.name = n.name + "_keyed";

  NetIdx tail_net = n.find_net("scan_out_tail");
  std::vector<NetIdx> remap(n.nets.size(), kNoNet);
  std::vector<std::string> new_name(n.nets.size());
  for (size_t i = 0; i < n.nets.size(); ++i) new_name[i] = n.nets[i].name;
  for (size_t i = 0; i < chain.size(); ++i) {
    int bit = bit_of_cell[chain[i]];
    if (bit < 0)
      throw BrokenChainError("chain DFF not in the fabric's bit map");
    new_name[n.cells[chain[i]].output] = "key_" + std::to_string(i);
    kn.key_order.push_back(f.bit_map[bit]);
  }
  for (NetIdx i = 0; i < static_cast<NetIdx>(n.nets.size()); ++i) {
    if (i == head || i == tail_net) continue;  // chain-only wiring
    remap[i] = out.add_net(new_name[i]);
  }
  for (NetIdx pi : n.inputs)
    if (pi != head) out.inputs.push_back(remap[pi]);
  for (size_t i = 0; i < chain.size(); ++i)
    out.inputs.push_back(remap[n.cells[chain[i]].output]);
  for (size_t ci = 0; ci < n.cells.size(); ++ci) {
    const Cell& c = n.cells[ci];
    if (on_chain[ci]) continue;
    if (c.kind == CellKind::OutputBuf && c.output == tail_net) continue;
    Cell copy = c;
    for (auto& in : copy.inputs) in = remap[in];
    copy.output = remap[copy.output];
    out.add_cell(std::move(copy));
  }
  for (NetIdx po : n.outputs)
    if (po != tail_net) out.add_output(remap[po]);

  require_integrity(out, "expose_keys");
  return kn;
}

// ---------------------------------------------------------------------------
// Feedback set
// ---------------------------------------------------------------------------

namespace {

// Iterative Tarjan SCC over the net graph (consumer edges of removed nets
// are masked out).
struct SccFinder {
  const std::vector<std::vector<int32_t>>& adj;
  const std::vector<uint8_t>& removed;
  std::vector<int> index, low, scc_id;
  std::vector<uint8_t> on_stack;
  std::vector<int> stack;
  int counter = 0, scc_count = 0;

  SccFinder(const std::vector<std::vector<int32_t>>& adj_,
            const std::vector<uint8_t>& removed_)
      : adj(adj_), removed(removed_) {
    int n = static_cast<int>(adj.size());
    index.assign(n, -1);
    low.assign(n, 0);
    scc_id.assign(n, -1);
    on_stack.assign(n, 0);
    for (int v = 0; v < n; ++v)
      if (index[v] < 0 && !removed[v]) run(v);
  }

  void run(int root) {
    struct Frame {
      int v;
      size_t edge;
    };
    std::vector<Frame> frames{{root, 0}};
    while (!frames.empty()) {
      Frame& fr = frames.back();
      int v = fr.v;
      if (fr.edge == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (fr.edge < adj[v].size()) {
        int w = adj[v][fr.edge++];
        if (removed[w]) continue;
        if (index[w] < 0) {
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          scc_id[w] = scc_count;
          if (w == v) break;
        }
        ++scc_count;
      }
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
};

std::vector<std::vector<int32_t>> net_adjacency(const Netlist& n) {
  std::vector<std::vector<int32_t>> adj(n.nets.size());
  for (const auto& c : n.cells) {
    if (c.kind == CellKind::Dff) continue;
    for (NetIdx in : c.inputs) adj[in].push_back(c.output);
  }
  return adj;
}

}  // namespace

FeedbackSet find_feedback_set(const Netlist& n) {
  auto adj = net_adjacency(n);

  std::vector<uint8_t> removed(n.nets.size(), 0);
  FeedbackSet fs;
  while (true) {
    SccFinder scc(adj, removed);
    std::vector<int> size(scc.scc_count, 0);
    std::vector<uint8_t> cyclic(scc.scc_count, 0);
    for (NetIdx v = 0; v < static_cast<NetIdx>(n.nets.size()); ++v) {
      if (removed[v] || scc.scc_id[v] < 0) continue;
      ++size[scc.scc_id[v]];
      for (int32_t w : adj[v])
        if (w == v) cyclic[scc.scc_id[v]] = 1;
    }
    // Score nets by fan-in x fan-out restricted to their SCC, so heavily
    // connected hubs go first; ties break to the lowest net id.
    std::vector<int32_t> indeg(n.nets.size(), 0), outdeg(n.nets.size(), 0);
    for (NetIdx v = 0; v < static_cast<NetIdx>(n.nets.size()); ++v) {
      if (removed[v] || scc.scc_id[v] < 0) continue;
      int id = scc.scc_id[v];
      if (size[id] < 2 && !cyclic[id]) continue;
      for (int32_t w : adj[v]) {
        if (removed[w] || scc.scc_id[w] != id) continue;
        ++outdeg[v];
        ++indeg[w];
      }
    }
    std::vector<int> best(scc.scc_count, -1);
    for (NetIdx v = 0; v < static_cast<NetIdx>(n.nets.size()); ++v) {
      if (removed[v] || scc.scc_id[v] < 0) continue;
      int id = scc.scc_id[v];
      if (size[id] < 2 && !cyclic[id]) continue;
      int& b = best[id];
      int64_t sv = static_cast<int64_t>(indeg[v]) * outdeg[v];
      if (b < 0 || sv > static_cast<int64_t>(indeg[b]) * outdeg[b]) b = v;
    }
    bool any = false;
    for (int id = 0; id < scc.scc_count; ++id) {
      if (best[id] < 0) continue;
      removed[best[id]] = 1;
      fs.nets.push_back(best[id]);
      any = true;
    }
    if (!any) break;
  }
  std::sort(fs.nets.begin(), fs.nets.end());
  if (!acyclic_after_cut(n, fs.nets))
    throw Error("find_feedback_set: verification failed");
  return fs;
}

bool acyclic_after_cut(const Netlist& n, const std::vector<NetIdx>& cut) {
  std::vector<uint8_t> is_cut(n.nets.size(), 0);
  for (NetIdx c : cut) is_cut[c] = 1;
  auto drv = n.drivers();
  std::vector<int> pending(n.cells.size(), 0);
  std::vector<std::vector<int>> waiters(n.nets.size());
  std::vector<int> ready;
  size_t comb = 0;
  for (size_t ci = 0; ci < n.cells.size(); ++ci) {
    const Cell& c = n.cells[ci];
    if (c.kind == CellKind::Dff) continue;
    ++comb;
    int deps = 0;
    for (NetIdx in : c.inputs) {
      if (is_cut[in]) continue;
      int d = drv[in];
      if (d >= 0 && n.cells[d].kind != CellKind::Dff) {
        ++deps;
        waiters[in].push_back(static_cast<int>(ci));
      }
    }
    pending[ci] = deps;
    if (deps == 0) ready.push_back(static_cast<int>(ci));
  }
  size_t head = 0, done = 0;
  while (head < ready.size()) {
    int ci = ready[head++];
    ++done;
    for (int w : waiters[n.cells[ci].output])
      if (--pending[w] == 0) ready.push_back(w);
  }
  return done == comb;
}

// ---------------------------------------------------------------------------
// Unrolling
// ---------------------------------------------------------------------------

UnrollResult unroll(const Netlist& kn, const FeedbackSet& fs,
                    bool stability_constraint) {
  for (const auto& c : kn.cells)
    if (c.kind == CellKind::Dff)
      throw Error("unroll: netlist contains DFFs; cut state first");

  UnrollResult res;
  res.unroll_factor = static_cast<int>(fs.nets.size());
  if (fs.nets.empty()) {
    res.netlist = kn;
    return res;
  }
  if (!acyclic_after_cut(kn, fs.nets))
    throw Error("unroll: feedback set does not break all cycles");

  int U = res.unroll_factor;
  std::vector<uint8_t> is_cut(kn.nets.size(), 0);
  for (NetIdx c : fs.nets) is_cut[c] = 1;
  std::vector<uint8_t> is_pi(kn.nets.size(), 0);
  for (NetIdx pi : kn.inputs) is_pi[pi] = 1;

  Netlist out;
  out.name = kn.name + "_unrolled";
  for (NetIdx pi : kn.inputs) out.add_input(kn.net_name(pi));

  // Frame-0 pseudo-inputs for cut-net consumers.
  std::vector<NetIdx> fb0(kn.nets.size(), kNoNet);
  for (NetIdx c : fs.nets) {
    fb0[c] = out.add_input("fb0_" + kn.net_name(c));
    res.frame0_inputs.push_back("fb0_" + kn.net_name(c));
  }

  // Per-frame net copies (primary inputs stay shared).
  auto frame_net = [&](int j, NetIdx x) {
    return out.add_net("f" + std::to_string(j) + "_" + kn.net_name(x));
  };
  std::vector<std::vector<NetIdx>> fnet(U + 1,
                                        std::vector<NetIdx>(kn.nets.size(), kNoNet));
  for (int j = 0; j <= U; ++j) {
    for (NetIdx x = 0; x < static_cast<NetIdx>(kn.nets.size()); ++x)
      if (!is_pi[x]) fnet[j][x] = frame_net(j, x);
    for (const auto& c : kn.cells) {
      Cell copy = c;
      copy.name = "f" + std::to_string(j) + "_" + c.name;
      for (auto& in : copy.inputs) {
        if (is_pi[in]) continue;  // shared
        if (is_cut[in])
          in = j == 0 ? fb0[in] : fnet[j - 1][in];
        else
          in = fnet[j][in];
      }
      copy.output = fnet[j][copy.output];
      out.add_cell(std::move(copy));
    }
  }
  for (NetIdx po : kn.outputs)
    out.add_output(is_pi[po] ? po : fnet[U][po]);

  if (stability_constraint) {
    // __stable = AND over cut nets of (frame U == frame U-1).
    std::vector<NetIdx> eqs;
    for (NetIdx c : fs.nets) {
      NetIdx x = fnet[U][c], y = fnet[U - 1][c];
      NetIdx ne = out.add_net("stab_x_" + kn.net_name(c));
      out.add_cell(Cell{"g_" + out.net_name(ne), CellKind::Xor2, {x, y}, ne,
                        {}, "", 0});
      NetIdx eq = out.add_net("stab_eq_" + kn.net_name(c));
      out.add_cell(Cell{"g_" + out.net_name(eq), CellKind::Not, {ne}, eq,
                        {}, "", 0});
      eqs.push_back(eq);
    }
    int seq = 0;
    while (eqs.size() > 1) {
      std::vector<NetIdx> next;
      for (size_t i = 0; i + 1 < eqs.size(); i += 2) {
        NetIdx a = out.add_net("stab_and_" + std::to_string(seq++));
        out.add_cell(Cell{"g_" + out.net_name(a), CellKind::And2,
                          {eqs[i], eqs[i + 1]}, a, {}, "", 0});
        next.push_back(a);
      }
      if (eqs.size() % 2) next.push_back(eqs.back());
      eqs = std::move(next);
    }
    NetIdx stable = out.add_net("__stable");
    out.add_cell(Cell{"g___stable", CellKind::InputBuf, {eqs[0]}, stable,
                      {}, "", 0});
    out.add_output(stable);
    res.stable_output = "__stable";
  }

  require_integrity(out, "unroll");
  res.netlist = std::move(out);
  return res;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

FabricOracle::FabricOracle(const Fabric& f, const Bitstream& oracle_bits) {
  Netlist configured = load_bitstream(f, oracle_bits, LoadMethod::Direct);
  comb_ = scan_cut(configured, kUserClk);
  sim_ = std::make_unique<Simulator>(comb_);
  for (NetIdx pi : comb_.inputs) in_names_.push_back(comb_.net_name(pi));
  for (NetIdx po : comb_.outputs) out_names_.push_back(comb_.net_name(po));
}

std::vector<uint8_t> FabricOracle::query(const std::vector<uint8_t>& inputs) const {
  if (inputs.size() != in_names_.size())
    throw Error("oracle: input arity mismatch");
  std::vector<uint64_t> pi(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) pi[i] = inputs[i] ? ~uint64_t{0} : 0;
  std::vector<uint64_t> vals;
  uint64_t stable =
      sim_->eval(SimMode::FixedPoint, pi, sim_->initial_state_words(), vals);
  if (!(stable & 1))
    throw OscillationError("oracle fabric does not settle on this input");
  std::vector<uint8_t> out;
  out.reserve(comb_.outputs.size());
  for (NetIdx po : comb_.outputs) out.push_back(vals[po] & 1);
  return out;
}

const char* attack_outcome_name(AttackOutcome o) {
  switch (o) {
    case AttackOutcome::KeyFound: return "KeyFound";
    case AttackOutcome::Timeout: return "TO";
    case AttackOutcome::Inconsistent: return "Inconsistent";
  }
  return "?";
}

}  // namespace redact
