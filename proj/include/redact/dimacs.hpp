// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "redact/cnf.hpp"
#include "redact/solver.hpp"

namespace redact {

/// Standard `p cnf V C` emission.
std::string write_dimacs(const Cnf& cnf);
void write_dimacs_file(const Cnf& cnf, const std::string& path);

/// Parses SAT-competition style output: an `s SATISFIABLE|UNSATISFIABLE|
/// UNKNOWN` line plus `v` value lines for SAT results. Throws ParseError on
/// malformed or truncated output (e.g. a `v` block without terminating 0).
SolveResult parse_solver_output(const std::string& text, int num_vars);

/// Environment variable naming the external solver executable.
inline const char* kSolverEnvVar = "REDACT_SAT_SOLVER";

/// Runs `solver_path <dimacs file>` on the CNF plus `assumptions` frozen as
/// unit clauses, and parses its output. timeout_s <= 0 means no limit.
/// Throws SolverMissingError when the executable cannot be started.
SolveResult solve_external(const Cnf& cnf, std::span<const int> assumptions,
                           const std::string& solver_path, double timeout_s);

}  // namespace redact
