// SPDX-License-Identifier: Apache-2.0
#include "redact/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace redact {

namespace {

using CRef = uint32_t;
constexpr CRef kRefUndef = 0xFFFFFFFFu;
// Reasons: kRefUndef = decision/none; top bit set = binary reason carrying
// the other literal; otherwise an arena clause reference.
constexpr uint32_t kBinaryReason = 0x80000000u;

constexpr int8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline int var_of(int lit) { return lit >> 1; }
inline int neg(int lit) { return lit ^ 1; }
inline int mk_lit(int var, bool sign) { return 2 * var + (sign ? 1 : 0); }
inline int encode(int ext) {
  int v = ext < 0 ? -ext : ext;
  return mk_lit(v - 1, ext < 0);
}

// Watcher: blocker literal short-circuits clause inspection; binary clauses
// live entirely in the watch lists.
struct Watch {
  uint32_t ref;  // kBinaryReason|lit for binaries, else clause ref
  int32_t blocker;
  bool is_binary() const { return ref & kBinaryReason; }
  int other_lit() const { return static_cast<int>(ref & ~kBinaryReason); }
};

class VarHeap {
 public:
  void grow(int n) { pos_.resize(n, -1); }
  bool contains(int v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }
  void insert(int v, const std::vector<double>& act) {
    if (contains(v)) return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v], act);
  }
  void increased(int v, const std::vector<double>& act) {
    if (contains(v)) up(pos_[v], act);
  }
  int pop(const std::vector<double>& act) {
    int v = heap_[0];
    pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      pos_[heap_[0]] = 0;
      down(0, act);
    }
    return v;
  }

 private:
  void up(int i, const std::vector<double>& act) {
    int v = heap_[i];
    while (i > 0) {
      int p = (i - 1) >> 1;
      if (act[heap_[p]] >= act[v]) break;
      heap_[i] = heap_[p];
      pos_[heap_[i]] = i;
      i = p;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  void down(int i, const std::vector<double>& act) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int c = 2 * i + 1;
      if (c >= n) break;
      if (c + 1 < n && act[heap_[c + 1]] > act[heap_[c]]) ++c;
      if (act[heap_[c]] <= act[v]) break;
      heap_[i] = heap_[c];
      pos_[heap_[i]] = i;
      i = c;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  std::vector<int> heap_;
  std::vector<int> pos_;
};

double luby(double y, int i) {
  int size, seq;
  for (size = 1, seq = 0; size < i + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    seq--;
    i %= size;
  }
  return std::pow(y, seq);
}

}  // namespace

struct Solver::Impl {
  // Clause arena: [size][flags][activity bits][lits...]; binaries never
  // reach the arena.
  std::vector<int32_t> arena;
  std::vector<CRef> problem_clauses;
  std::vector<CRef> learnt_clauses;
  std::vector<std::vector<Watch>> watches;

  std::vector<int8_t> assign;
  std::vector<int32_t> level;
  std::vector<uint32_t> reason;
  std::vector<double> activity;
  std::vector<uint8_t> polarity;
  std::vector<uint8_t> seen;
  VarHeap order;

  std::vector<int> trail;
  std::vector<int> trail_lim;
  size_t qhead = 0;

  int nvars = 0;
  bool ok = true;
  int root_level = 0;
  double var_inc = 1.0, cla_inc = 1.0;
  double var_decay = 0.85;  // ramps towards 0.95
  static constexpr double kClaDecay = 1.0 / 0.999;

  // Glucose-style restart state: exponential moving averages of learnt LBD.
  double lbd_fast = 0, lbd_slow = 0;
  uint64_t conflicts_since_restart = 0;
  uint64_t reduce_counter = 0;
  uint64_t next_reduce = 2000;

  SolverStats stats;
  uint64_t total_conflicts = 0;
  uint64_t num_binary = 0;

  std::vector<int> clause_buf;
  std::vector<int> learnt_buf;
  std::vector<int> min_stack;
  std::vector<int> min_clear;
  std::vector<uint64_t> level_seen_stamp;
  uint64_t stamp = 0;

  int32_t& csize(CRef c) { return arena[c]; }
  int32_t& cflags(CRef c) { return arena[c + 1]; }
  float& cact(CRef c) { return reinterpret_cast<float&>(arena[c + 2]); }
  int32_t& clbd(CRef c) { return arena[c + 3]; }
  int32_t* clits(CRef c) { return &arena[c + 4]; }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  int8_t value_lit(int lit) const {
    int8_t a = assign[var_of(lit)];
    if (a == kUndef) return kUndef;
    return (lit & 1) ? static_cast<int8_t>(a ^ 1) : a;
  }

  void ensure(int n) {
    if (n <= nvars) return;
    assign.resize(n, kUndef);
    level.resize(n, 0);
    reason.resize(n, kRefUndef);
    activity.resize(n, 0.0);
    polarity.resize(n, 1);
    seen.resize(n, 0);
    watches.resize(2 * n);
    level_seen_stamp.resize(n + 1, 0);
    order.grow(n);
    for (int v = nvars; v < n; ++v) order.insert(v, activity);
    nvars = n;
  }

  void bump_var(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    order.increased(v, activity);
  }
  void bump_clause(CRef c) {
    cact(c) += static_cast<float>(cla_inc);
    if (cact(c) > 1e20f) {
      for (CRef lc : learnt_clauses) cact(lc) *= 1e-20f;
      cla_inc *= 1e-20;
    }
  }

  bool enqueue(int lit, uint32_t from) {
    int v = var_of(lit);
    if (assign[v] != kUndef) return value_lit(lit) == kTrue;
    assign[v] = (lit & 1) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(lit);
    return true;
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl) return;
    int limit = trail_lim[lvl];
    for (int i = static_cast<int>(trail.size()) - 1; i >= limit; --i) {
      int v = var_of(trail[i]);
      polarity[v] = (trail[i] & 1) ? 1 : 0;
      assign[v] = kUndef;
      reason[v] = kRefUndef;
      if (!order.contains(v)) order.insert(v, activity);
    }
    trail.resize(limit);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  // Conflict descriptor: binary (two lits) or clause reference.
  struct Conflict {
    bool none = true;
    bool binary = false;
    int l0 = 0, l1 = 0;
    CRef ref = kRefUndef;
  };

  Conflict propagate() {
    Conflict confl;
    while (qhead < trail.size()) {
      int p = trail[qhead++];
      ++stats.propagations;
      int false_lit = neg(p);
      auto& wl = watches[false_lit];
      size_t rd = 0, wr = 0;
      size_t n = wl.size();
      while (rd < n) {
        Watch w = wl[rd];
        if (value_lit(w.blocker) == kTrue) {
          wl[wr++] = wl[rd++];
          continue;
        }
        if (w.is_binary()) {
          int other = w.other_lit();
          if (!enqueue(other, kBinaryReason | static_cast<uint32_t>(false_lit))) {
            // Conflict between false_lit's clause {other, ~p}; keep rest.
            while (rd < n) wl[wr++] = wl[rd++];
            wl.resize(wr);
            confl.none = false;
            confl.binary = true;
            confl.l0 = other;
            confl.l1 = false_lit;
            qhead = trail.size();
            return confl;
          }
          wl[wr++] = wl[rd++];
          continue;
        }
        CRef c = w.ref;
        int32_t* lits = clits(c);
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        if (value_lit(lits[0]) == kTrue) {
          wl[wr++] = {c, lits[0]};
          ++rd;
          continue;
        }
        int sz = csize(c);
        bool moved = false;
        for (int k = 2; k < sz; ++k) {
          if (value_lit(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches[lits[1]].push_back({c, lits[0]});
            moved = true;
            ++rd;
            break;
          }
        }
        if (moved) continue;
        wl[wr++] = {c, lits[0]};
        ++rd;
        if (!enqueue(lits[0], c)) {
          while (rd < n) wl[wr++] = wl[rd++];
          wl.resize(wr);
          confl.none = false;
          confl.ref = c;
          qhead = trail.size();
          return confl;
        }
      }
      wl.resize(wr);
    }
    return confl;
  }

  void analyze(const Conflict& confl, std::vector<int>& out_learnt,
               int& out_level) {
    out_learnt.clear();
    out_learnt.push_back(-1);
    int path = 0;
    int idx = static_cast<int>(trail.size()) - 1;
    int asserting = -1;

    auto process = [&](int q) {
      int v = var_of(q);
      if (!seen[v] && level[v] > 0) {
        seen[v] = 1;
        bump_var(v);
        if (level[v] == decision_level())
          ++path;
        else
          out_learnt.push_back(q);
      }
    };

    if (confl.binary) {
      process(confl.l0);
      process(confl.l1);
    } else {
      if (cflags(confl.ref) & 1) bump_clause(confl.ref);
      int sz = csize(confl.ref);
      const int32_t* lits = clits(confl.ref);
      for (int k = 0; k < sz; ++k) process(lits[k]);
    }

    for (;;) {
      while (!seen[var_of(trail[idx])]) --idx;
      asserting = trail[idx--];
      seen[var_of(asserting)] = 0;
      if (--path == 0) break;
      uint32_t r = reason[var_of(asserting)];
      if (r == kRefUndef) continue;
      if (r & kBinaryReason) {
        process(static_cast<int>(r & ~kBinaryReason));
      } else {
        if (cflags(r) & 1) bump_clause(r);
        int sz = csize(r);
        const int32_t* lits = clits(r);
        for (int k = 0; k < sz; ++k)
          if (lits[k] != asserting) process(lits[k]);
      }
    }
    out_learnt[0] = neg(asserting);

    // Recursive self-subsumption: a literal is redundant when its whole
    // reason tree stays within the clause's decision levels and seen set.
    uint32_t level_mask = 0;
    for (size_t i = 1; i < out_learnt.size(); ++i)
      level_mask |= 1u << (level[var_of(out_learnt[i])] & 31);
    std::vector<int> to_clear = out_learnt;
    size_t wr = 1;
    for (size_t i = 1; i < out_learnt.size(); ++i) {
      int v = var_of(out_learnt[i]);
      if (reason[v] == kRefUndef || !lit_redundant(v, level_mask, to_clear))
        out_learnt[wr++] = out_learnt[i];
    }
    out_learnt.resize(wr);
    for (size_t i = 1; i < to_clear.size(); ++i) seen[var_of(to_clear[i])] = 0;

    if (out_learnt.size() == 1) {
      out_level = 0;
    } else {
      size_t max_i = 1;
      for (size_t i = 2; i < out_learnt.size(); ++i)
        if (level[var_of(out_learnt[i])] > level[var_of(out_learnt[max_i])])
          max_i = i;
      std::swap(out_learnt[1], out_learnt[max_i]);
      out_level = level[var_of(out_learnt[1])];
    }
  }

  // Depth-first redundancy check over the implication graph.
  bool lit_redundant(int v0, uint32_t level_mask, std::vector<int>& to_clear) {
    min_stack.clear();
    min_stack.push_back(v0);
    size_t top = to_clear.size();
    while (!min_stack.empty()) {
      int v = min_stack.back();
      min_stack.pop_back();
      uint32_t r = reason[v];
      if (r == kRefUndef) {
        for (size_t i = top; i < to_clear.size(); ++i)
          seen[var_of(to_clear[i])] = 0;
        to_clear.resize(top);
        return false;
      }
      auto visit = [&](int q) {
        int u = var_of(q);
        if (u == v || seen[u] || level[u] == 0) return true;
        if (reason[u] != kRefUndef && ((1u << (level[u] & 31)) & level_mask)) {
          seen[u] = 1;
          min_stack.push_back(u);
          to_clear.push_back(q);
          return true;
        }
        return false;
      };
      bool ok_here = true;
      if (r & kBinaryReason) {
        ok_here = visit(static_cast<int>(r & ~kBinaryReason));
      } else {
        int sz = csize(r);
        const int32_t* lits = clits(r);
        for (int k = 0; k < sz && ok_here; ++k)
          ok_here = visit(lits[k]);
      }
      if (!ok_here) {
        for (size_t i = top; i < to_clear.size(); ++i)
          seen[var_of(to_clear[i])] = 0;
        to_clear.resize(top);
        return false;
      }
    }
    return true;
  }

  int compute_lbd(const std::vector<int>& lits) {
    ++stamp;
    int lbd = 0;
    for (int l : lits) {
      int lv = level[var_of(l)];
      if (lv > 0 && level_seen_stamp[lv] != stamp) {
        level_seen_stamp[lv] = stamp;
        ++lbd;
      }
    }
    return lbd;
  }

  void add_binary_watch(int l0, int l1) {
    watches[l0].push_back({kBinaryReason | static_cast<uint32_t>(l1), l1});
    watches[l1].push_back({kBinaryReason | static_cast<uint32_t>(l0), l0});
    ++num_binary;
  }

  CRef alloc_clause(std::span<const int> lits, bool learnt) {
    CRef c = static_cast<CRef>(arena.size());
    arena.push_back(static_cast<int32_t>(lits.size()));
    arena.push_back(learnt ? 1 : 0);
    arena.push_back(0);
    arena.push_back(0);  // LBD
    for (int l : lits) arena.push_back(l);
    (learnt ? learnt_clauses : problem_clauses).push_back(c);
    watches[lits[0]].push_back({c, lits[1]});
    watches[lits[1]].push_back({c, lits[0]});
    return c;
  }

  void record_learnt(const std::vector<int>& lits, int lbd) {
    if (lits.size() == 1) {
      enqueue(lits[0], kRefUndef);
      return;
    }
    if (lits.size() == 2) {
      add_binary_watch(lits[0], lits[1]);
      enqueue(lits[0], kBinaryReason | static_cast<uint32_t>(lits[1]));
      return;
    }
    CRef c = alloc_clause(lits, true);
    clbd(c) = lbd;
    bump_clause(c);
    enqueue(lits[0], c);
  }

  void reduce_learnts() {
    // Keep glue clauses (LBD <= 2) unconditionally; drop the worse half of
    // the rest, high LBD first, low activity first within equal LBD.
    std::vector<CRef> sorted;
    for (CRef c : learnt_clauses)
      if (clbd(c) > 2) sorted.push_back(c);
    std::stable_sort(sorted.begin(), sorted.end(), [&](CRef a, CRef b) {
      if (clbd(a) != clbd(b)) return clbd(a) > clbd(b);
      return cact(a) < cact(b);
    });
    size_t target = sorted.size() / 2;
    size_t removed = 0;
    for (CRef c : sorted) {
      if (removed >= target) break;
      int v = var_of(clits(c)[0]);
      if (assign[v] != kUndef && reason[v] == c) continue;  // locked
      cflags(c) |= 2;
      ++removed;
    }
    if (removed == 0) return;
    for (auto& wl : watches)
      wl.erase(std::remove_if(wl.begin(), wl.end(),
                              [&](const Watch& w) {
                                return !w.is_binary() && (cflags(w.ref) & 2);
                              }),
               wl.end());
    learnt_clauses.erase(
        std::remove_if(learnt_clauses.begin(), learnt_clauses.end(),
                       [&](CRef c) { return cflags(c) & 2; }),
        learnt_clauses.end());
  }

  void add_clause(std::span<const int> ext) {
    if (!ok) return;
    backtrack(0);
    clause_buf.clear();
    for (int e : ext) clause_buf.push_back(encode(e));
    std::sort(clause_buf.begin(), clause_buf.end());
    size_t wr = 0;
    for (size_t i = 0; i < clause_buf.size(); ++i) {
      int l = clause_buf[i];
      if (wr > 0 && l == clause_buf[wr - 1]) continue;
      if (wr > 0 && l == neg(clause_buf[wr - 1])) return;  // tautology
      int8_t v = value_lit(l);
      if (v == kTrue) return;
      if (v == kFalse) continue;
      clause_buf[wr++] = l;
    }
    clause_buf.resize(wr);
    if (clause_buf.empty()) {
      ok = false;
      return;
    }
    if (clause_buf.size() == 1) {
      if (!enqueue(clause_buf[0], kRefUndef) || !propagate().none) ok = false;
      return;
    }
    if (clause_buf.size() == 2) {
      add_binary_watch(clause_buf[0], clause_buf[1]);
      return;
    }
    alloc_clause(clause_buf, false);
  }

  enum class SearchOut { Sat, Unsat, Budget };

  SearchOut search(int64_t conflict_budget, const SolveBudget& budget,
                   std::vector<uint8_t>& model) {
    int64_t conflicts = 0;
    conflicts_since_restart = 0;
    for (;;) {
      Conflict confl = propagate();
      if (!confl.none) {
        ++conflicts;
        ++stats.conflicts;
        ++total_conflicts;
        ++conflicts_since_restart;
        if (decision_level() <= root_level) return SearchOut::Unsat;
        int back_level;
        analyze(confl, learnt_buf, back_level);
        backtrack(std::max(back_level, root_level));
        int lbd = compute_lbd(learnt_buf);
        record_learnt(learnt_buf, lbd);
        // Restart steering: fast/slow moving averages of learnt quality.
        lbd_fast += (lbd - lbd_fast) / 32.0;
        lbd_slow += (lbd - lbd_slow) / 4096.0;
        if (var_decay < 0.95 && (total_conflicts % 5000) == 0)
          var_decay += 0.01;
        var_inc *= 1.0 / var_decay;
        cla_inc *= kClaDecay;
        if (total_conflicts >= next_reduce) {
          ++reduce_counter;
          next_reduce = total_conflicts + 2000 + 300 * reduce_counter;
          reduce_learnts();
        }
        if ((stats.conflicts & 1023) == 0 && budget.deadline &&
            std::chrono::steady_clock::now() >= *budget.deadline)
          return SearchOut::Budget;
        if (conflicts_since_restart >= 50 && lbd_fast > lbd_slow * 1.25) {
          backtrack(root_level);
          lbd_fast = lbd_slow;
          conflicts_since_restart = 0;
        }
      } else {
        if (conflicts >= conflict_budget) {
          backtrack(root_level);
          return SearchOut::Budget;
        }
        int next = -1;
        while (!order.empty()) {
          int v = order.pop(activity);
          if (assign[v] == kUndef) {
            next = v;
            break;
          }
        }
        if (next == -1) {
          model.assign(nvars + 1, 0);
          for (int v = 0; v < nvars; ++v)
            model[v + 1] = assign[v] == kTrue ? 1 : 0;
          backtrack(root_level);
          return SearchOut::Sat;
        }
        ++stats.decisions;
        if ((stats.decisions & 8191) == 0 && budget.deadline &&
            std::chrono::steady_clock::now() >= *budget.deadline) {
          backtrack(root_level);
          return SearchOut::Budget;
        }
        trail_lim.push_back(static_cast<int>(trail.size()));
        enqueue(mk_lit(next, polarity[next]), kRefUndef);
      }
    }
  }

  SolveResult solve(std::span<const int> assumptions, const SolveBudget& budget) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    auto finish = [&](SolveStatus st) {
      backtrack(0);
      root_level = 0;
      res.status = st;
      res.stats = stats;
      res.stats.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      return res;
    };

    if (!ok) return finish(SolveStatus::Unsat);
    backtrack(0);
    if (!propagate().none) {
      ok = false;
      return finish(SolveStatus::Unsat);
    }

    root_level = 0;
    for (int ext : assumptions) {
      int l = encode(ext);
      if (value_lit(l) == kFalse) return finish(SolveStatus::Unsat);
      trail_lim.push_back(static_cast<int>(trail.size()));
      root_level = decision_level();
      if (!enqueue(l, kRefUndef) || !propagate().none)
        return finish(SolveStatus::Unsat);
    }

    int64_t remaining =
        budget.max_conflicts < 0 ? INT64_MAX : budget.max_conflicts;
    for (int iter = 0;; ++iter) {
      int64_t step = remaining;
      SearchOut out = search(step, budget, res.model);
      if (out == SearchOut::Sat) {
        for (CRef c : problem_clauses) {
          int sz = csize(c);
          const int32_t* lits = clits(c);
          bool sat = false;
          for (int k = 0; k < sz && !sat; ++k) {
            int v = var_of(lits[k]);
            sat = (res.model[v + 1] != 0) == ((lits[k] & 1) == 0);
          }
          if (!sat) throw Error("solver: model verification failed");
        }
        // Binary clauses are verified through their watch lists.
        for (int lit = 0; lit < 2 * nvars; ++lit) {
          for (const Watch& w : watches[lit]) {
            if (!w.is_binary()) continue;
            bool a = (res.model[var_of(lit) + 1] != 0) == ((lit & 1) == 0);
            int other = w.other_lit();
            bool b = (res.model[var_of(other) + 1] != 0) == ((other & 1) == 0);
            if (!a && !b) throw Error("solver: model verification failed");
          }
        }
        for (int ext : assumptions) {
          int v = ext < 0 ? -ext : ext;
          if ((res.model[v] != 0) != (ext > 0))
            throw Error("solver: model contradicts assumption");
        }
        return finish(SolveStatus::Sat);
      }
      if (out == SearchOut::Unsat) return finish(SolveStatus::Unsat);
      remaining -= step;
      if (remaining <= 0 || (budget.deadline &&
                             std::chrono::steady_clock::now() >= *budget.deadline))
        return finish(SolveStatus::Unknown);
    }
  }
};

Solver::Solver() : impl_(new Impl) {}
Solver::~Solver() { delete impl_; }

int Solver::new_var() {
  impl_->ensure(impl_->nvars + 1);
  return impl_->nvars;
}
int Solver::num_vars() const { return impl_->nvars; }
void Solver::ensure_vars(int n) { impl_->ensure(n); }

void Solver::add_clause(std::span<const int> lits) {
  for (int l : lits) {
    int v = l < 0 ? -l : l;
    if (l == 0) throw Error("solver: literal 0");
    impl_->ensure(v);
  }
  impl_->add_clause(lits);
}

void Solver::add_cnf(const Cnf& cnf) {
  impl_->ensure(cnf.num_vars);
  for (size_t i = 0; i < cnf.num_clauses(); ++i) {
    auto c = cnf.clause(i);
    impl_->add_clause(
        std::span<const int>(reinterpret_cast<const int*>(c.data()), c.size()));
  }
}

SolveResult Solver::solve(std::span<const int> assumptions,
                          const SolveBudget& budget) {
  return impl_->solve(assumptions, budget);
}

uint64_t Solver::total_conflicts() const { return impl_->total_conflicts; }

SolveResult solve(const Cnf& cnf, std::span<const int> assumptions,
                  const SolveBudget& budget) {
  Solver s;
  s.add_cnf(cnf);
  return s.solve(assumptions, budget);
}

}  // namespace redact
