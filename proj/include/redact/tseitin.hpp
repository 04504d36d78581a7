// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <unordered_map>

#include "redact/cnf.hpp"
#include "redact/netlist.hpp"

namespace redact {

// Per-net encoding state after lowering a netlist into a Cnf. A net is
// either a DIMACS literal (possibly negative) or a folded constant.
struct EncodedCircuit {
  std::vector<int> net_lit;       // 0 when the net folded to a constant
  std::vector<int8_t> net_const;  // -1 unknown, else 0/1

  int lit_of(NetIdx n) const { return net_lit[n]; }
  bool is_const(NetIdx n) const { return net_const[n] >= 0; }
};

// Values or literals imposed on primary inputs before encoding. Inputs not
// mentioned receive fresh variables. Net overrides redirect the *consumers*
// of a net to a given literal/constant while the net's driver is still
// encoded (used to stitch unroll frames together).
struct InputBinding {
  std::unordered_map<std::string, int> lits;     // port -> existing literal
  std::unordered_map<std::string, int> values;   // port -> 0/1
  std::unordered_map<NetIdx, int> net_lits;
  std::unordered_map<NetIdx, int> net_values;
};

// Hash-consing table shared across encode calls on one Cnf: structurally
// identical gates (same kind and input literals) reuse one output literal.
class StructuralHash {
 public:
  struct Key {
    int op, a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = 1469598103934665603ull;
      for (int v : {k.op, k.a, k.b, k.c}) {
        h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
        h *= 1099511628211ull;
      }
      return static_cast<size_t>(h);
    }
  };
  std::unordered_map<Key, int, KeyHash> table;
};

/// Gate-wise CNF lowering of an acyclic combinational netlist into `cnf`.
/// With `fold` set, constants propagate and buffers/inverters become literal
/// aliases instead of fresh variables. Throws CycleError on cycles and
/// Error when the netlist still contains DFFs.
EncodedCircuit tseitin_encode_into(Cnf& cnf, const Netlist& n,
                                   const InputBinding& binding, bool fold,
                                   StructuralHash* hash = nullptr);

/// Textbook encoding: one variable per net, no folding. Fills the Cnf
/// input/output annotation maps.
Cnf tseitin_encode(const Netlist& n);

}  // namespace redact
