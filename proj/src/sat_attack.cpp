// SPDX-License-Identifier: Apache-2.0
// Oracle-guided miter attack: DIP loop over frame-encoded key copies.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "redact/attack.hpp"
#include "redact/dimacs.hpp"
#include "redact/equiv.hpp"
#include "redact/solver.hpp"
#include "redact/tseitin.hpp"

namespace redact {

namespace {

using Clock = std::chrono::steady_clock;

struct TimeoutSignal {
  std::string reason;
};

// Literal-or-constant value of an encoded net.
struct LC {
  int c = -1;
  int l = 0;
  bool is_const() const { return c >= 0; }
  static LC of(const EncodedCircuit& ec, NetIdx net) {
    LC v;
    if (ec.is_const(net)) {
      v.c = ec.net_const[net];
    } else {
      v.l = ec.lit_of(net);
    }
    return v;
  }
};

struct MiterContext {
  const Fabric& fabric;
  const AttackOptions& opt;
  MiterContext(const Fabric& f_, const AttackOptions& o_)
      : fabric(f_), opt(o_) {}
  Netlist kc;  // scan-cut keyed netlist (possibly cyclic)
  std::vector<BitInfo> key_order;
  FeedbackSet fs;
  int num_keys = 0;

  Cnf db;  // the emitted CNF, source of truth for stats
  Solver solver;
  size_t pushed_clauses = 0;
  StructuralHash hash;

  std::vector<std::string> data_inputs;  // kc inputs minus keys, in order
  std::vector<int> data_vars;
  std::vector<int> key1, key2;
  int diff_var = 0;

  std::optional<Clock::time_point> deadline;
  Clock::time_point t0 = Clock::now();

  void check_budget(int dips) {
    if (deadline && Clock::now() >= *deadline)
      throw TimeoutSignal{"wall clock budget exhausted"};
    if (opt.max_dips > 0 && dips >= opt.max_dips)
      throw TimeoutSignal{"iteration cap reached"};
    if (db.num_clauses() > opt.max_clauses)
      throw TimeoutSignal{"cnf size cap reached"};
  }

  void sync_solver() {
    if (!opt.external_solver.empty()) return;
    solver.ensure_vars(db.num_vars);
    for (size_t i = pushed_clauses; i < db.num_clauses(); ++i) {
      auto c = db.clause(i);
      solver.add_clause(std::span<const int>(
          reinterpret_cast<const int*>(c.data()), c.size()));
    }
    pushed_clauses = db.num_clauses();
  }

  SolveResult do_solve(std::span<const int> assumptions) {
    if (!opt.external_solver.empty()) {
      double remaining = -1;
      if (deadline)
        remaining = std::chrono::duration<double>(*deadline - Clock::now()).count();
      return solve_external(db, assumptions, opt.external_solver,
                            remaining);
    }
    sync_solver();
    SolveBudget budget;
    budget.deadline = deadline;
    return solver.solve(assumptions, budget);
  }

  void assert_equal(LC a, LC b) {
    if (a.is_const() && b.is_const()) {
      if (a.c != b.c) {
        int z = db.new_var();
        db.add_clause({z});
        db.add_clause({-z});
      }
      return;
    }
    if (a.is_const()) std::swap(a, b);
    if (b.is_const()) {
      db.add_clause({b.c ? a.l : -a.l});
      return;
    }
    if (a.l == b.l) return;
    db.add_clause({-a.l, b.l});
    db.add_clause({a.l, -b.l});
  }

  // Encodes U+1 frames of the keyed core for one key copy. Inputs are either
  // the shared variables or a fixed DIP; frame-0 cut values are fresh free
  // variables. Returns the frame-U output values.
  std::vector<LC> encode_copy(const std::vector<int>& key_lits,
                              const std::vector<uint8_t>* fixed_inputs,
                              int dips) {
    InputBinding base;
    for (size_t i = 0; i < data_inputs.size(); ++i) {
      if (fixed_inputs)
        base.values[data_inputs[i]] = (*fixed_inputs)[i];
      else
        base.lits[data_inputs[i]] = data_vars[i];
    }
    for (int i = 0; i < num_keys; ++i)
      base.lits["key_" + std::to_string(i)] = key_lits[i];

    int U = static_cast<int>(fs.nets.size());
    EncodedCircuit prev;
    for (int j = 0; j <= U; ++j) {
      InputBinding bind = base;
      for (NetIdx c : fs.nets) {
        if (j == 0) {
          if (opt.frame0_free)
            bind.net_lits[c] = db.new_var();
          else
            bind.net_values[c] = 0;
        } else if (prev.is_const(c)) {
          bind.net_values[c] = prev.net_const[c];
        } else {
          bind.net_lits[c] = prev.lit_of(c);
        }
      }
      EncodedCircuit ec = tseitin_encode_into(db, kc, bind, true, &hash);
      if (j == U && U > 0 && opt.stability_constraint)
        for (NetIdx c : fs.nets) assert_equal(LC::of(ec, c), LC::of(prev, c));
      prev = std::move(ec);
      check_budget(dips);
    }
    std::vector<LC> outs;
    for (NetIdx po : kc.outputs) outs.push_back(LC::of(prev, po));
    return outs;
  }
};

}  // namespace

AttackResult sat_attack(const Fabric& f, const Bitstream& oracle_bits,
                        const KnownBits& known, const AttackOptions& opt) {
  AttackResult result;
  AttackStats& stats = result.stats;
  auto t0 = Clock::now();
  auto finish = [&](AttackOutcome outcome, const std::string& note) {
    stats.outcome = outcome;
    stats.note = note;
    stats.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  };

  MiterContext ctx(f, opt);
  ctx.t0 = t0;
  if (opt.timeout_seconds > 0)
    ctx.deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(opt.timeout_seconds));

  try {
    // Pipeline: expose -> scan-cut -> feedback set -> frame-encoded miter.
    KeyedNetlist kn = expose_keys(f);
    ctx.key_order = kn.key_order;
    ctx.num_keys = static_cast<int>(kn.key_order.size());
    ctx.kc = scan_cut(kn.netlist, kUserClk);
    ctx.check_budget(0);
    ctx.fs = find_feedback_set(ctx.kc);
    stats.unroll_factor = static_cast<int>(ctx.fs.nets.size());
    stats.key_size = ctx.num_keys - static_cast<int>(known.bits.size());
    stats.bitstream_bits = f.num_bits();
    ctx.check_budget(0);

    for (NetIdx pi : ctx.kc.inputs) {
      const std::string& name = ctx.kc.net_name(pi);
      if (name.rfind("key_", 0) == 0) continue;
      ctx.data_inputs.push_back(name);
    }
    for (size_t i = 0; i < ctx.data_inputs.size(); ++i)
      ctx.data_vars.push_back(ctx.db.new_var());
    for (int i = 0; i < ctx.num_keys; ++i) {
      ctx.key1.push_back(ctx.db.new_var());
      ctx.key2.push_back(ctx.db.new_var());
    }
    for (auto [idx, val] : known.bits) {
      if (idx < 0 || idx >= ctx.num_keys)
        throw Error("sat_attack: known bit index out of range");
      ctx.db.add_clause({val ? ctx.key1[idx] : -ctx.key1[idx]});
      ctx.db.add_clause({val ? ctx.key2[idx] : -ctx.key2[idx]});
    }

    auto out1 = ctx.encode_copy(ctx.key1, nullptr, 0);
    auto out2 = ctx.encode_copy(ctx.key2, nullptr, 0);

    // diff -> some output pair differs.
    ctx.diff_var = ctx.db.new_var();
    std::vector<int> diff_clause{-ctx.diff_var};
    for (size_t o = 0; o < out1.size(); ++o) {
      LC a = out1[o], b = out2[o];
      if (a.is_const() && b.is_const()) continue;  // identical copies
      int x;
      if (a.is_const() || b.is_const()) {
        LC lit = a.is_const() ? b : a;
        int cval = a.is_const() ? a.c : b.c;
        x = cval ? -lit.l : lit.l;  // differs iff lit != cval
      } else if (a.l == b.l) {
        continue;
      } else {
        x = ctx.db.new_var();
        ctx.db.add_clause({-a.l, -b.l, -x});
        ctx.db.add_clause({a.l, b.l, -x});
        ctx.db.add_clause({-a.l, b.l, x});
        ctx.db.add_clause({a.l, -b.l, x});
      }
      diff_clause.push_back(x);
    }
    ctx.db.add_clause(diff_clause);

    // Annotations for DIMACS consumers.
    for (size_t i = 0; i < ctx.data_inputs.size(); ++i)
      ctx.db.input_vars[ctx.data_inputs[i]] = ctx.data_vars[i];
    for (int i = 0; i < ctx.num_keys; ++i)
      ctx.db.key_vars["key_" + std::to_string(i)] = ctx.key1[i];

    // Oracle with port correspondence.
    FabricOracle oracle(f, oracle_bits);
    std::vector<int> oracle_in_pos(oracle.input_names().size(), -1);
    for (size_t i = 0; i < oracle.input_names().size(); ++i)
      for (size_t j = 0; j < ctx.data_inputs.size(); ++j)
        if (oracle.input_names()[i] == ctx.data_inputs[j])
          oracle_in_pos[i] = static_cast<int>(j);
    std::vector<int> out_pos(ctx.kc.outputs.size(), -1);
    for (size_t o = 0; o < ctx.kc.outputs.size(); ++o) {
      const std::string& name = ctx.kc.net_name(ctx.kc.outputs[o]);
      for (size_t i = 0; i < oracle.output_names().size(); ++i)
        if (oracle.output_names()[i] == name) out_pos[o] = static_cast<int>(i);
      if (out_pos[o] < 0)
        throw Error("sat_attack: oracle lacks output '" + name + "'");
    }

    // DIP loop.
    std::set<std::vector<uint8_t>> seen_dips;
    std::vector<int> assume{ctx.diff_var};
    while (true) {
      ctx.check_budget(stats.dip_count);
      SolveResult res = ctx.do_solve(assume);
      stats.clause_count = ctx.db.num_clauses();
      stats.variable_count = ctx.db.num_vars;
      if (res.status == SolveStatus::Unknown)
        throw TimeoutSignal{"solver budget exhausted in DIP search"};
      if (res.status == SolveStatus::Unsat) break;

      std::vector<uint8_t> dip(ctx.data_inputs.size());
      for (size_t i = 0; i < dip.size(); ++i)
        dip[i] = res.model[ctx.data_vars[i]];
      if (!seen_dips.insert(dip).second)
        return finish(AttackOutcome::Inconsistent,
                      "distinguishing input recurred (live-lock)");

      std::vector<uint8_t> oracle_in(oracle.input_names().size(), 0);
      for (size_t i = 0; i < oracle_in.size(); ++i)
        if (oracle_in_pos[i] >= 0) oracle_in[i] = dip[oracle_in_pos[i]];
      std::vector<uint8_t> oracle_out;
      try {
        oracle_out = oracle.query(oracle_in);
      } catch (const OscillationError& e) {
        return finish(AttackOutcome::Inconsistent,
                      std::string("oracle unstable: ") + e.what());
      }

      // Pin both key copies to the oracle's answer on this DIP.
      for (auto* keys : {&ctx.key1, &ctx.key2}) {
        auto outs = ctx.encode_copy(*keys, &dip, stats.dip_count);
        for (size_t o = 0; o < outs.size(); ++o) {
          LC want;
          want.c = oracle_out[out_pos[o]];
          ctx.assert_equal(outs[o], want);
        }
      }
      ++stats.dip_count;
    }

    // Key extraction: any assignment satisfying the accumulated constraints.
    SolveResult res = ctx.do_solve({});
    stats.clause_count = ctx.db.num_clauses();
    stats.variable_count = ctx.db.num_vars;
    if (res.status == SolveStatus::Unknown)
      throw TimeoutSignal{"solver budget exhausted in key extraction"};
    if (res.status == SolveStatus::Unsat)
      return finish(AttackOutcome::Inconsistent,
                    "constraints unsatisfiable; no key exists");

    result.key.assign(ctx.num_keys, 0);
    for (int i = 0; i < ctx.num_keys; ++i)
      result.key[i] = res.model[ctx.key1[i]];
    for (auto [idx, val] : known.bits) result.key[idx] = val;

    // Post-verification: the recovered key, loaded into the real fabric,
    // must match the oracle exhaustively (<= 16 inputs) or on random vectors.
    Bitstream candidate;
    candidate.bits = result.key;
    candidate.fabric_fingerprint = f.params.fingerprint();
    Netlist cand_comb =
        scan_cut(load_bitstream(f, candidate, LoadMethod::Direct), kUserClk);
    PortMap pm;
    for (const auto& name : oracle.input_names())
      pm.in_map.emplace_back(name, name);
    for (const auto& name : oracle.output_names())
      pm.out_map.emplace_back(name, name);
    auto equiv = check_equivalence(
        oracle.netlist(), cand_comb, pm, 16,
        static_cast<int>(opt.verify_random_vectors), 0x5eed,
        SimMode::FixedPoint, SimMode::FixedPoint);
    if (!equiv.equivalent)
      return finish(AttackOutcome::Inconsistent,
                    "post-verification failed: " + equiv.counterexample);
    return finish(AttackOutcome::KeyFound, "");
  } catch (const TimeoutSignal& t) {
    stats.clause_count = ctx.db.num_clauses();
    stats.variable_count = ctx.db.num_vars;
    return finish(AttackOutcome::Timeout, t.reason);
  }
}

AttackResult category_attack(const Fabric& f, const Bitstream& oracle_bits,
                             BitCategory category, const AttackOptions& opt) {
  KnownBits known;
  for (const auto& b : f.bit_map)
    if (b.category != category) known.bits[b.index] = oracle_bits.bits[b.index];
  return sat_attack(f, oracle_bits, known, opt);
}

std::vector<SweepRow> sweep_known_bits(const Fabric& f,
                                       const Bitstream& oracle_bits,
                                       const std::vector<double>& fractions,
                                       int trials, uint64_t seed,
                                       const AttackOptions& opt) {
  std::vector<SweepRow> rows;
  int B = f.num_bits();
  for (size_t fi = 0; fi < fractions.size(); ++fi) {
    for (int trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng(seed ^ (fi * 1000003 + trial * 7919 + 1));
      std::vector<int> order(B);
      for (int i = 0; i < B; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      int count = static_cast<int>(fractions[fi] * B);
      KnownBits known;
      for (int i = 0; i < count; ++i)
        known.bits[order[i]] = oracle_bits.bits[order[i]];
      AttackResult res = sat_attack(f, oracle_bits, known, opt);
      rows.push_back(SweepRow{fractions[fi], trial, count, res.stats});
    }
  }
  return rows;
}

std::string AttackStats::csv_header() {
  return "fabric,circuit,unroll_factor,bitstream,clauses,time_s,variables,"
         "dips,key_size,outcome";
}

std::string AttackStats::csv_row(const std::string& fabric,
                                 const std::string& circuit) const {
  return fmt::format("{},{},{},{},{},{:.3f},{},{},{},{}", fabric, circuit,
                     unroll_factor, bitstream_bits, clause_count, seconds,
                     variable_count, dip_count, key_size,
                     attack_outcome_name(outcome));
}

std::string AttackStats::to_json(const std::string& fabric,
                                 const std::string& circuit) const {
  return fmt::format(
      "{{\"fabric\": \"{}\", \"circuit\": \"{}\", \"unroll_factor\": {}, "
      "\"bitstream\": {}, \"clauses\": {}, \"time_s\": {:.3f}, "
      "\"variables\": {}, \"dips\": {}, \"key_size\": {}, "
      "\"outcome\": \"{}\", \"note\": \"{}\"}}",
      fabric, circuit, unroll_factor, bitstream_bits, clause_count, seconds,
      variable_count, dip_count, key_size, attack_outcome_name(outcome), note);
}

}  // namespace redact
