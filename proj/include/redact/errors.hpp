// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace redact {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// JSON document does not match the netlist/fabric schema.
struct SchemaError : Error {
  using Error::Error;
};

/// Acyclic evaluation requested on a cyclic combinational graph.
struct CycleError : Error {
  using Error::Error;
};

/// Fixed-point relaxation did not settle within the iteration bound.
struct OscillationError : Error {
  using Error::Error;
};

struct LengthMismatchError : Error {
  using Error::Error;
};

struct FingerprintMismatchError : Error {
  using Error::Error;
};

/// Design does not fit the fabric; `resource` names the binding limit.
struct CapacityError : Error {
  std::string resource;  // "IO", "LUT" or "DFF"
  CapacityError(std::string resource_, const std::string& msg)
      : Error(msg), resource(std::move(resource_)) {}
};

struct UnroutableError : Error {
  using Error::Error;
};

/// Configuration scan chain is cut or bypasses a config flip-flop.
struct BrokenChainError : Error {
  using Error::Error;
};

/// Fabric size search exhausted the maximum grid width.
struct GiveUpError : Error {
  using Error::Error;
};

struct SolverMissingError : Error {
  using Error::Error;
};

}  // namespace redact
