// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "redact/cnf.hpp"

namespace redact {

enum class SolveStatus { Sat, Unsat, Unknown };

struct SolverStats {
  uint64_t decisions = 0;
  uint64_t conflicts = 0;
  uint64_t propagations = 0;
  double seconds = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  // model[v] for v in 1..num_vars (entry 0 unused); valid when Sat. Every
  // returned model is re-checked against the clause database.
  std::vector<uint8_t> model;
  SolverStats stats;
};

struct SolveBudget {
  int64_t max_conflicts = -1;  // <0: unlimited
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Conflict-driven clause-learning solver: two-literal watches, VSIDS
// branching, phase saving, Luby restarts, 1UIP learning with clause
// minimization. Incremental: clauses may be added between solve calls and
// solving under assumptions is supported. Fully deterministic.
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  int new_var();
  int num_vars() const;
  void ensure_vars(int n);

  /// Clause over DIMACS literals. Adding a falsified empty clause makes the
  /// instance permanently Unsat.
  void add_clause(std::span<const int> lits);
  void add_clause(std::initializer_list<int> lits) {
    add_clause(std::span<const int>(lits.begin(), lits.size()));
  }
  void add_cnf(const Cnf& cnf);

  SolveResult solve(std::span<const int> assumptions = {},
                    const SolveBudget& budget = {});

  uint64_t total_conflicts() const;

 private:
  struct Impl;
  Impl* impl_;
};

/// One-shot convenience wrapper.
SolveResult solve(const Cnf& cnf, std::span<const int> assumptions = {},
                  const SolveBudget& budget = {});

}  // namespace redact
