// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "redact/netlist.hpp"

namespace redact {

struct SimVector {
  std::unordered_map<std::string, bool> inputs;     // must cover every PI
  std::unordered_map<std::string, bool> dff_state;  // optional; default: cell init
};

enum class SimMode { Acyclic, FixedPoint };

struct SimResult {
  std::vector<std::pair<std::string, bool>> outputs;  // primary output order
  bool stabilized = true;
};

// Word-parallel evaluator: each bit lane of a uint64_t word is one
// independent input vector, so a single pass simulates up to 64 vectors.
// Fixed-point mode does synchronous (Jacobi) sweeps from an all-zero net
// assignment, bounded by |nets| sweeps.
class Simulator {
 public:
  explicit Simulator(const Netlist& n);

  const Netlist& netlist() const { return *netlist_; }
  size_t num_inputs() const { return netlist_->inputs.size(); }
  size_t num_dffs() const { return dff_cells_.size(); }
  const std::vector<CellIdx>& dff_cells() const { return dff_cells_; }
  bool combinational_acyclic() const { return acyclic_ok_; }

  /// Evaluates the combinational part. pi_words follow netlist input order,
  /// state_words follow dff_cells() order. Returns the lane mask that reached
  /// a fixed point (all-ones in acyclic mode). Throws CycleError when acyclic
  /// mode is requested on a cyclic graph. max_sweeps of 0 means the default
  /// bound of |nets| relaxation sweeps.
  uint64_t eval(SimMode mode, std::span<const uint64_t> pi_words,
                std::span<const uint64_t> state_words,
                std::vector<uint64_t>& net_values, size_t max_sweeps = 0) const;

  std::vector<uint64_t> output_words(const std::vector<uint64_t>& net_values) const;

  /// Next DFF states after a rising edge on `clock`; other domains hold.
  std::vector<uint64_t> next_state_words(const std::vector<uint64_t>& net_values,
                                         const std::string& clock,
                                         std::span<const uint64_t> state_words) const;

  std::vector<uint64_t> initial_state_words() const;

 private:
  void eval_cell(const Cell& c, const std::vector<uint64_t>& in,
                 std::vector<uint64_t>& out) const;

  const Netlist* netlist_;
  std::vector<CellIdx> dff_cells_;
  std::vector<CellIdx> comb_cells_;  // original order, DFFs excluded
  std::vector<CellIdx> topo_cells_;  // valid iff acyclic_ok_
  bool acyclic_ok_ = false;
};

/// One-shot evaluation of a single vector. Throws OscillationError when
/// fixed-point mode fails to settle and CycleError for cycles in acyclic mode.
SimResult simulate(const Netlist& n, const SimVector& v, SimMode mode);

struct SeqTraceStep {
  std::vector<std::pair<std::string, bool>> outputs;     // before the edge
  std::vector<std::pair<std::string, bool>> dff_states;  // after the edge
};

/// Cycle-accurate simulation: per step, outputs are sampled with the step's
/// inputs applied, then DFFs on `clock` latch their data pins.
std::vector<SeqTraceStep> simulate_sequential(const Netlist& n,
                                              const std::string& clock,
                                              const std::vector<SimVector>& stimulus);

}  // namespace redact
