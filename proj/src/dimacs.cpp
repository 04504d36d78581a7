// SPDX-License-Identifier: Apache-2.0
#include "redact/dimacs.hpp"

#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace redact {

std::string write_dimacs(const Cnf& cnf) {
  std::string out;
  out.reserve(cnf.lits.size() * 4 + 64);
  out += "p cnf " + std::to_string(cnf.num_vars) + " " +
         std::to_string(cnf.num_clauses()) + "\n";
  char buf[16];
  for (size_t i = 0; i < cnf.num_clauses(); ++i) {
    for (int l : cnf.clause(i)) {
      int n = snprintf(buf, sizeof buf, "%d ", l);
      out.append(buf, n);
    }
    out += "0\n";
  }
  return out;
}

void write_dimacs_file(const Cnf& cnf, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << write_dimacs(cnf);
}

SolveResult parse_solver_output(const std::string& text, int num_vars) {
  SolveResult res;
  std::istringstream in(text);
  std::string line;
  bool saw_status = false;
  std::vector<int> values;
  bool values_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 's') {
      std::istringstream ls(line.substr(1));
      std::string status;
      ls >> status;
      if (status == "SATISFIABLE")
        res.status = SolveStatus::Sat;
      else if (status == "UNSATISFIABLE")
        res.status = SolveStatus::Unsat;
      else if (status == "UNKNOWN" || status == "INDETERMINATE")
        res.status = SolveStatus::Unknown;
      else
        throw ParseError(0, "solver output: unknown status '" + status + "'");
      saw_status = true;
    } else if (line[0] == 'v') {
      std::istringstream ls(line.substr(1));
      int lit;
      while (ls >> lit) {
        if (lit == 0) {
          values_done = true;
          break;
        }
        values.push_back(lit);
      }
      if (!ls.eof() && !values_done)
        throw ParseError(0, "solver output: malformed v line");
    }
    // 'c' comment lines and anything else are ignored.
  }
  if (!saw_status) throw ParseError(0, "solver output: missing s line");
  if (res.status == SolveStatus::Sat) {
    if (!values_done)
      throw ParseError(0, "solver output: v lines not terminated by 0");
    res.model.assign(num_vars + 1, 0);
    for (int lit : values) {
      int v = lit < 0 ? -lit : lit;
      if (v > num_vars)
        throw ParseError(0, "solver output: literal outside variable range");
      res.model[v] = lit > 0 ? 1 : 0;
    }
  }
  return res;
}

SolveResult solve_external(const Cnf& cnf, std::span<const int> assumptions,
                           const std::string& solver_path, double timeout_s) {
  if (solver_path.empty())
    throw SolverMissingError("no external solver configured (set " +
                             std::string(kSolverEnvVar) + ")");
  struct stat st;
  if (stat(solver_path.c_str(), &st) != 0)
    throw SolverMissingError("external solver '" + solver_path + "' not found");

  // DIMACS has no assumption syntax; freeze them as unit clauses in the
  // emitted file.
  std::string path = "/tmp/redact_" + std::to_string(getpid()) + "_" +
                     std::to_string(reinterpret_cast<uintptr_t>(&cnf) & 0xffff) +
                     ".cnf";
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "p cnf " << cnf.num_vars << " "
      << cnf.num_clauses() + assumptions.size() << "\n";
    for (size_t i = 0; i < cnf.num_clauses(); ++i) {
      for (int l : cnf.clause(i)) f << l << " ";
      f << "0\n";
    }
    for (int a : assumptions) f << a << " 0\n";
  }

  std::string cmd;
  if (timeout_s > 0)
    cmd = "timeout " + std::to_string(static_cast<long>(timeout_s) + 1) + " ";
  cmd += "'" + solver_path + "' '" + path + "' 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    unlink(path.c_str());
    throw SolverMissingError("cannot execute '" + solver_path + "'");
  }
  std::string output;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    output.append(buf.data(), got);
  int rc = pclose(pipe);
  unlink(path.c_str());

  if (rc == 124 << 8) {  // timeout(1)
    SolveResult res;
    res.status = SolveStatus::Unknown;
    return res;
  }
  return parse_solver_output(output, cnf.num_vars);
}

}  // namespace redact
