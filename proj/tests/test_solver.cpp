#include <doctest.h>

#include <random>

#include "redact/dimacs.hpp"
#include "redact/solver.hpp"

using namespace redact;

namespace {

// Brute-force oracle: enumerates all assignments with clause bit masks.
// Returns SAT status plus (for SAT) one witness.
struct BruteResult {
  bool sat;
};

BruteResult brute_force(const Cnf& cnf) {
  int n = cnf.num_vars;
  std::vector<uint32_t> pos(cnf.num_clauses(), 0), negm(cnf.num_clauses(), 0);
  for (size_t i = 0; i < cnf.num_clauses(); ++i) {
    for (int l : cnf.clause(i)) {
      int v = (l < 0 ? -l : l) - 1;
      if (l > 0)
        pos[i] |= uint32_t{1} << v;
      else
        negm[i] |= uint32_t{1} << v;
    }
  }
  for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
    bool ok = true;
    for (size_t i = 0; i < cnf.num_clauses(); ++i) {
      if ((pos[i] & a) == 0 && (negm[i] & ~a) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) return {true};
  }
  return {false};
}

Cnf random_3cnf(int vars, int clauses, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Cnf cnf;
  cnf.num_vars = vars;
  std::uniform_int_distribution<int> pick(1, vars);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < clauses; ++i) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    while (b == a) b = pick(rng);
    while (c == a || c == b) c = pick(rng);
    cnf.add_clause({coin(rng) ? a : -a, coin(rng) ? b : -b, coin(rng) ? c : -c});
  }
  return cnf;
}

}  // namespace

TEST_CASE("x and not-x is UNSAT") {
  Cnf cnf;
  int x = cnf.new_var();
  cnf.add_clause({x});
  cnf.add_clause({-x});
  CHECK(solve(cnf).status == SolveStatus::Unsat);
}

TEST_CASE("assumptions constrain the model") {
  Cnf cnf;
  int x = cnf.new_var();
  int y = cnf.new_var();
  cnf.add_clause({x, y});
  std::vector<int> assume{-x};
  auto res = solve(cnf, assume);
  REQUIRE(res.status == SolveStatus::Sat);
  CHECK(res.model[x] == 0);
  CHECK(res.model[y] == 1);

  std::vector<int> both{-x, -y};
  CHECK(solve(cnf, both).status == SolveStatus::Unsat);
}

TEST_CASE("random 3-CNFs agree with brute-force enumeration") {
  // Clause/variable ratios straddling the satisfiability threshold.
  int checked = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    int vars = 16;
    int clauses = static_cast<int>(vars * (3.0 + (seed % 5) * 0.6));
    Cnf cnf = random_3cnf(vars, clauses, seed * 7919 + 3);
    auto res = solve(cnf);
    REQUIRE(res.status != SolveStatus::Unknown);
    bool sat = res.status == SolveStatus::Sat;
    CHECK(sat == brute_force(cnf).sat);
    if (sat) {
      CHECK(cnf.satisfied_by(res.model));
    }
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("incremental use: clauses added between solves") {
  Solver s;
  s.ensure_vars(3);
  s.add_clause({1, 2});
  auto r1 = s.solve();
  REQUIRE(r1.status == SolveStatus::Sat);
  s.add_clause({-1});
  s.add_clause({-2, 3});
  auto r2 = s.solve();
  REQUIRE(r2.status == SolveStatus::Sat);
  CHECK(r2.model[1] == 0);
  CHECK(r2.model[2] == 1);
  CHECK(r2.model[3] == 1);
  s.add_clause({-3});
  CHECK(s.solve().status == SolveStatus::Unsat);
}

TEST_CASE("solver determinism") {
  auto run = [] {
    Cnf cnf = random_3cnf(20, 60, 42);
    return solve(cnf);
  };
  auto a = run();
  auto b = run();
  REQUIRE(a.status == b.status);
  CHECK(a.model == b.model);
  CHECK(a.stats.decisions == b.stats.decisions);
  CHECK(a.stats.conflicts == b.stats.conflicts);
}

TEST_CASE("conflict budget yields Unknown") {
  // A hard pigeonhole-ish instance with a 1-conflict budget.
  Cnf cnf = random_3cnf(40, 220, 7);
  SolveBudget budget;
  budget.max_conflicts = 1;
  auto res = solve(cnf, {}, budget);
  CHECK(res.status == SolveStatus::Unknown);
}

TEST_CASE("dimacs emission") {
  Cnf cnf;
  int x = cnf.new_var();
  cnf.add_clause({x});
  std::string text = write_dimacs(cnf);
  CHECK(text == "p cnf 1 1\n1 0\n");
}

TEST_CASE("solver output parsing") {
  auto sat = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2 0\n", 2);
  REQUIRE(sat.status == SolveStatus::Sat);
  CHECK(sat.model[1] == 1);
  CHECK(sat.model[2] == 0);

  auto unsat = parse_solver_output("s UNSATISFIABLE\n", 2);
  CHECK(unsat.status == SolveStatus::Unsat);

  CHECK_THROWS_AS(parse_solver_output("v 1 0\n", 2), ParseError);
  // Truncated v block: no terminating 0.
  CHECK_THROWS_AS(parse_solver_output("s SATISFIABLE\nv 1 -2\n", 2), ParseError);
}

TEST_CASE("cnf rejects malformed clauses") {
  Cnf cnf;
  CHECK_THROWS_AS(cnf.add_clause(std::initializer_list<int>{}), Error);
  CHECK_THROWS_AS(cnf.add_clause({1}), Error);  // var not allocated
}
