#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "redact/blif.hpp"
#include "redact/sim.hpp"
#include "redact/solver.hpp"
#include "redact/tseitin.hpp"

using namespace redact;

TEST_CASE("single AND2 encodes to 3 clauses and 3 variables") {
  Netlist n;
  n.name = "and";
  NetIdx a = n.add_input("a");
  NetIdx b = n.add_input("b");
  NetIdx o = n.add_net("o");
  n.add_cell(Cell{"g", CellKind::And2, {a, b}, o, {}, "", 0});
  n.add_output(o);
  Cnf cnf = tseitin_encode(n);
  CHECK(cnf.num_vars == 3);
  CHECK(cnf.num_clauses() == 3);
  CHECK(cnf.input_vars.size() == 2);
  CHECK(cnf.output_vars.size() == 1);
}

TEST_CASE("NOT gate encodes to 2 clauses") {
  Netlist n;
  n.name = "not";
  NetIdx a = n.add_input("a");
  NetIdx o = n.add_net("o");
  n.add_cell(Cell{"g", CellKind::Not, {a}, o, {}, "", 0});
  n.add_output(o);
  Cnf cnf = tseitin_encode(n);
  CHECK(cnf.num_clauses() == 2);
}

TEST_CASE("cyclic netlist is rejected") {
  Netlist n = parse_blif(fixtures::kNotRingBlif);
  CHECK_THROWS_AS(tseitin_encode(n), CycleError);
}

namespace {

// Assignment-checking oracle: a total assignment satisfies the CNF iff every
// net variable equals the simulated value implied by the assignment's inputs.
void check_equisatisfiable(const Netlist& n, int rounds, uint64_t seed) {
  Cnf cnf2;
  EncodedCircuit nets = tseitin_encode_into(cnf2, n, InputBinding{}, false);

  Simulator sim(n);
  std::mt19937_64 rng(seed);
  std::vector<uint64_t> pi(n.inputs.size());
  std::vector<uint64_t> vals;

  // The CNF must hold exactly when every net variable equals the value
  // simulation derives from the assignment's own input part.
  auto consistent = [&](const std::vector<uint8_t>& assign) {
    for (size_t i = 0; i < pi.size(); ++i)
      pi[i] = assign[nets.net_lit[n.inputs[i]]] ? ~uint64_t{0} : 0;
    sim.eval(SimMode::Acyclic, pi, {}, vals);
    for (size_t net = 0; net < n.nets.size(); ++net) {
      int lit = nets.net_lit[net];
      if (lit > 0 && assign[lit] != (vals[net] & 1)) return false;
    }
    return true;
  };

  for (int round = 0; round < rounds; ++round) {
    std::vector<uint8_t> assign(cnf2.num_vars + 1, 0);
    if (round % 2 == 0) {
      // Fully random total assignment.
      for (int v = 1; v <= cnf2.num_vars; ++v) assign[v] = rng() & 1;
    } else {
      // Simulation-consistent assignment with one random variable flipped.
      uint64_t bits = rng();
      for (size_t i = 0; i < pi.size(); ++i)
        pi[i] = (bits >> i) & 1 ? ~uint64_t{0} : 0;
      sim.eval(SimMode::Acyclic, pi, {}, vals);
      for (size_t net = 0; net < n.nets.size(); ++net) {
        int lit = nets.net_lit[net];
        if (lit > 0) assign[lit] = vals[net] & 1;
      }
      std::uniform_int_distribution<int> pick(1, cnf2.num_vars);
      assign[pick(rng)] ^= 1;
    }
    CHECK(cnf2.satisfied_by(assign) == consistent(assign));
  }
}

}  // namespace

TEST_CASE("encoding is equisatisfiable with the circuit") {
  check_equisatisfiable(parse_blif(fixtures::kAdd2Blif), 100, 11);
  check_equisatisfiable(parse_blif(fixtures::kMul2Blif), 100, 12);
}

TEST_CASE("folded encoding agrees with textbook encoding modulo satisfiability") {
  Netlist n = parse_blif(fixtures::kAdd2Blif);
  Cnf plain = tseitin_encode(n);

  // Same circuit, folding on, inputs constrained to a fixed vector. The
  // output literals must force exactly the simulated values.
  for (unsigned bits = 0; bits < 16; ++bits) {
    Cnf folded;
    InputBinding binding;
    for (size_t i = 0; i < n.inputs.size(); ++i)
      binding.values[n.net_name(n.inputs[i])] = static_cast<int>((bits >> i) & 1);
    EncodedCircuit ec = tseitin_encode_into(folded, n, binding, true);

    SimVector v;
    for (size_t i = 0; i < n.inputs.size(); ++i)
      v.inputs[n.net_name(n.inputs[i])] = (bits >> i) & 1;
    auto sim_out = simulate(n, v, SimMode::Acyclic);

    for (size_t oi = 0; oi < n.outputs.size(); ++oi) {
      NetIdx net = n.outputs[oi];
      bool want = sim_out.outputs[oi].second;
      if (ec.is_const(net)) {
        CHECK(static_cast<bool>(ec.net_const[net]) == want);
      } else {
        Solver s;
        s.ensure_vars(folded.num_vars);
        s.add_cnf(folded);
        int lit = ec.lit_of(net);
        std::vector<int> assume{want ? -lit : lit};
        CHECK(s.solve(assume).status == SolveStatus::Unsat);
      }
    }
  }
}

TEST_CASE("constant inputs fold the cone away") {
  Netlist n = parse_blif(fixtures::kAdd2Blif);
  Cnf folded;
  InputBinding binding;
  for (NetIdx pi : n.inputs) binding.values[n.net_name(pi)] = 0;
  tseitin_encode_into(folded, n, binding, true);
  CHECK(folded.num_clauses() == 0);
}
