// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "redact/errors.hpp"

namespace redact {

// Clause database in DIMACS literal convention: variables 1..num_vars,
// negative literal = negated variable. Clauses are stored flattened.
struct Cnf {
  int num_vars = 0;
  std::vector<int32_t> lits;
  std::vector<uint32_t> clause_end;  // running end offset per clause

  // Annotations: circuit roles of selected variables.
  std::unordered_map<std::string, int> key_vars;
  std::unordered_map<std::string, int> input_vars;
  std::unordered_map<std::string, int> output_vars;

  int new_var() { return ++num_vars; }

  void add_clause(std::span<const int> c) {
    if (c.empty()) throw Error("cnf: empty clause at construction");
    for (int l : c) {
      int v = l < 0 ? -l : l;
      if (l == 0 || v > num_vars) throw Error("cnf: literal out of range");
      lits.push_back(l);
    }
    clause_end.push_back(static_cast<uint32_t>(lits.size()));
  }
  void add_clause(std::initializer_list<int> c) {
    add_clause(std::span<const int>(c.begin(), c.size()));
  }

  size_t num_clauses() const { return clause_end.size(); }

  std::span<const int32_t> clause(size_t i) const {
    uint32_t begin = i == 0 ? 0 : clause_end[i - 1];
    return {lits.data() + begin, clause_end[i] - begin};
  }

  /// True when `assignment` (indexed by variable, entry 0 unused) satisfies
  /// every clause.
  bool satisfied_by(std::span<const uint8_t> assignment) const {
    for (size_t i = 0; i < num_clauses(); ++i) {
      bool ok = false;
      for (int l : clause(i)) {
        int v = l < 0 ? -l : l;
        if ((assignment[v] != 0) == (l > 0)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace redact
