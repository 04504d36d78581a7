// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>

#include "redact/fabric.hpp"
#include "redact/sim.hpp"

namespace redact {

// Fabric netlist with configuration state exposed as key inputs key_0 ..
// key_{B-1} (scan-chain discovery order == bitstream order). Chain-only
// wiring (scan head/tail and the chain flip-flops) is removed.
struct KeyedNetlist {
  Netlist netlist;
  std::vector<BitInfo> key_order;
};

/// Walks the scan chain from scan_in_head to scan_out_tail and rebuilds the
/// netlist with each prog_clk DFF replaced by a key input. Throws
/// BrokenChainError when the chain is cut or skips a config DFF.
KeyedNetlist expose_keys(const Fabric& f);

struct FeedbackSet {
  std::vector<NetIdx> nets;  // ascending net indices of the cut set
};

/// SCC-based heuristic: repeatedly remove the highest (fan-in x fan-out)
/// net of each non-trivial SCC until the combinational graph is acyclic.
/// The result is verified by topological sort.
FeedbackSet find_feedback_set(const Netlist& n);

/// True when cutting the consumer edges of `cut` leaves the combinational
/// graph acyclic (test oracle and internal sanity check).
bool acyclic_after_cut(const Netlist& n, const std::vector<NetIdx>& cut);

struct UnrollResult {
  Netlist netlist;  // acyclic; frame U drives the primary outputs
  int unroll_factor = 0;
  std::vector<std::string> frame0_inputs;  // free pseudo-inputs of frame 0
  std::string stable_output;  // PO that is 1 iff the last two frames agree
};

/// IcySAT-style unrolling: U+1 copies of the combinational core where copy j
/// reads copy j-1's cut-net values and copy 0 reads fresh pseudo-inputs.
/// Keys and primary inputs are shared. With the stability constraint mode, a
/// `__stable` output asserts that copy U reproduces copy U-1's cut values.
UnrollResult unroll(const Netlist& kn, const FeedbackSet& fs,
                    bool stability_constraint = true);

// Simulation oracle over a configured fabric: full scan access, i.e. inputs
// are pads plus user-domain FF states, outputs are pads plus next-states.
class FabricOracle {
 public:
  FabricOracle(const Fabric& f, const Bitstream& oracle_bits);
  const Netlist& netlist() const { return comb_; }
  /// Values keyed by port name; throws OscillationError if the configured
  /// fabric fails to settle on this input.
  std::vector<uint8_t> query(const std::vector<uint8_t>& inputs) const;
  const std::vector<std::string>& input_names() const { return in_names_; }
  const std::vector<std::string>& output_names() const { return out_names_; }

 private:
  Netlist comb_;
  std::unique_ptr<Simulator> sim_;
  std::vector<std::string> in_names_;
  std::vector<std::string> out_names_;
};

enum class AttackOutcome { KeyFound, Timeout, Inconsistent };
const char* attack_outcome_name(AttackOutcome o);

struct AttackStats {
  AttackOutcome outcome = AttackOutcome::Timeout;
  int dip_count = 0;
  double seconds = 0;
  uint64_t clause_count = 0;
  uint64_t variable_count = 0;
  int unroll_factor = 0;
  int key_size = 0;        // unknown key bits
  int bitstream_bits = 0;  // full configuration length B
  std::string note;

  std::string csv_row(const std::string& fabric, const std::string& circuit) const;
  static std::string csv_header();
  std::string to_json(const std::string& fabric, const std::string& circuit) const;
};

struct KnownBits {
  std::map<int, uint8_t> bits;  // key index -> value
};

struct AttackOptions {
  double timeout_seconds = 0;        // 0 = unlimited
  int max_dips = 0;                  // 0 = unlimited
  uint64_t max_clauses = 50'000'000; // CNF growth guardrail
  bool stability_constraint = true;
  // Frame-0 cut values: false (default) evaluates the deterministic iterate
  // from all-zero, matching the simulation oracle. true leaves them free,
  // which admits any fixed point and live-locks on multi-stable keys; kept
  // as an experimental mode.
  bool frame0_free = false;
  std::string external_solver;       // DIMACS subprocess; empty = internal
  uint64_t verify_random_vectors = 10000;
};

struct AttackResult {
  std::vector<uint8_t> key;  // full key (known bits merged) when KeyFound
  AttackStats stats;
};

/// Classic oracle-guided DIP loop on the miter of two key copies. Known bits
/// enter as unit constraints on both copies. A returned key is post-verified
/// against the oracle (exhaustive up to 16 inputs); outcome is KeyFound only
/// if that check passes.
AttackResult sat_attack(const Fabric& f, const Bitstream& oracle_bits,
                        const KnownBits& known, const AttackOptions& opt);

/// Partial attack recovering one bitstream category, all other bits known.
AttackResult category_attack(const Fabric& f, const Bitstream& oracle_bits,
                             BitCategory category, const AttackOptions& opt);

struct SweepRow {
  double fraction;  // fraction of key bits known
  int trial;
  int known_bits;
  AttackStats stats;
};

/// Known-bits sweep: for each fraction and trial, fixes a seeded-random
/// subset of the key and attacks the rest. Per-cell timeouts are recorded
/// and the sweep continues.
std::vector<SweepRow> sweep_known_bits(const Fabric& f,
                                       const Bitstream& oracle_bits,
                                       const std::vector<double>& fractions,
                                       int trials, uint64_t seed,
                                       const AttackOptions& opt);

}  // namespace redact
