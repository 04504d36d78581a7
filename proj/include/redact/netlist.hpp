// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "redact/errors.hpp"

namespace redact {

// Gate-level netlist IR. Fabrics, redaction modules and attack circuits all
// use this one representation. Netlists are built once and treated as
// immutable afterwards; simulation and analysis never mutate them.

enum class CellKind : uint8_t {
  InputBuf,
  OutputBuf,
  Lut,
  Mux2,
  Dff,
  Const0,
  Const1,
  Not,
  And2,
  Or2,
  Xor2,
};

const char* cell_kind_name(CellKind k);
CellKind cell_kind_from_name(const std::string& s);

using NetIdx = int32_t;
using CellIdx = int32_t;
constexpr NetIdx kNoNet = -1;

inline const std::string kUserClk = "user_clk";
inline const std::string kProgClk = "prog_clk";

struct Net {
  std::string name;
};

struct Cell {
  std::string name;
  CellKind kind = CellKind::Const0;
  // Pin order: LUT inputs are truth-table index bits, pin 0 least significant.
  // MUX2 pins are {a, b, sel} with out = sel ? b : a. DFF has a single data pin.
  std::vector<NetIdx> inputs;
  NetIdx output = kNoNet;
  std::vector<uint8_t> truth;  // LUT only; 2^k entries of 0/1, LSB-first
  std::string clock;           // DFF only
  uint8_t init = 0;            // DFF only: power-on / configured state

  int lut_width() const { return static_cast<int>(inputs.size()); }
};

class Netlist {
 public:
  std::string name;
  std::vector<Cell> cells;
  std::vector<Net> nets;
  std::vector<NetIdx> inputs;   // primary input ports; port name == net name
  std::vector<NetIdx> outputs;  // primary output ports referencing nets

  NetIdx add_net(const std::string& n);
  NetIdx find_net(const std::string& n) const;  // kNoNet when absent
  NetIdx require_net(const std::string& n) const;
  CellIdx add_cell(Cell c);
  CellIdx find_cell(const std::string& n) const;  // -1 when absent
  NetIdx add_input(const std::string& port);
  void add_output(NetIdx n);

  const std::string& net_name(NetIdx n) const { return nets[n].name; }

  /// Clock identifiers; always contains user_clk and prog_clk.
  std::set<std::string> clock_domains() const;

  // Driver of each net: cell index, or -2 for primary inputs, -1 undriven.
  // Computed on demand and cached.
  static constexpr int kDriverPi = -2;
  static constexpr int kDriverNone = -1;
  std::vector<int> drivers() const;
  std::vector<std::vector<CellIdx>> consumers() const;

 private:
  std::unordered_map<std::string, NetIdx> net_index_;
  std::unordered_map<std::string, CellIdx> cell_index_;
};

struct Violation {
  enum class Kind {
    MultipleDriver,
    NoDriver,
    DanglingInput,
    UnknownNet,
    DuplicateId,
    BadCell,  // malformed pins / truth table / clock
  };
  Kind kind;
  std::string subject;  // offending cell or net identifier
  std::string message;
};

const char* violation_kind_name(Violation::Kind k);

/// Empty result iff all structural invariants hold.
std::vector<Violation> check_integrity(const Netlist& n);

/// Throws Error when check_integrity reports anything.
void require_integrity(const Netlist& n, const std::string& context);

/// Full-scan view: every DFF in `clock` is cut; its output net becomes a
/// pseudo primary input (keeping its name) and its data pin is exposed as a
/// pseudo output `next_<net>`. DFFs in other domains (e.g. configuration
/// state on prog_clk) are left in place.
Netlist scan_cut(const Netlist& n, const std::string& clock = kUserClk);

}  // namespace redact
