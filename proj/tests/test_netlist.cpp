#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "redact/blif.hpp"
#include "redact/equiv.hpp"
#include "redact/netlist.hpp"
#include "redact/netlist_json.hpp"
#include "redact/sim.hpp"

using namespace redact;

namespace {

SimVector vec(const Netlist& n, unsigned bits) {
  SimVector v;
  for (size_t i = 0; i < n.inputs.size(); ++i)
    v.inputs[n.net_name(n.inputs[i])] = (bits >> i) & 1;
  return v;
}

unsigned outputs_as_uint(const SimResult& r) {
  unsigned out = 0;
  for (size_t i = 0; i < r.outputs.size(); ++i)
    if (r.outputs[i].second) out |= 1u << i;
  return out;
}

// Structural diff oracle: sorted (name, kind, pins) triples must match and
// port lists must be identical.
bool structurally_equal(const Netlist& a, const Netlist& b) {
  auto dump = [](const Netlist& n) {
    std::vector<std::string> rows;
    for (const auto& c : n.cells) {
      std::string row = c.name + "|" + cell_kind_name(c.kind) + "|";
      for (NetIdx in : c.inputs) row += n.net_name(in) + ",";
      row += "->" + n.net_name(c.output) + "|" + c.clock + "|" +
             std::to_string(c.init) + "|";
      for (uint8_t t : c.truth) row += t ? '1' : '0';
      rows.push_back(row);
    }
    std::vector<std::string> nets;
    for (const auto& net : n.nets) nets.push_back(net.name);
    std::sort(rows.begin(), rows.end());
    std::sort(nets.begin(), nets.end());
    std::string ports;
    for (NetIdx i : n.inputs) ports += "i:" + n.net_name(i) + ";";
    for (NetIdx o : n.outputs) ports += "o:" + n.net_name(o) + ";";
    std::string all = n.name + "\n" + ports + "\n";
    for (auto& r : rows) all += r + "\n";
    for (auto& s : nets) all += s + "\n";
    return all;
  };
  return dump(a) == dump(b);
}

}  // namespace

TEST_CASE("blif AND cover becomes a 2-LUT") {
  Netlist n = parse_blif(".model t\n.inputs a b\n.outputs o\n.names a b o\n11 1\n.end\n");
  REQUIRE(n.cells.size() == 1);
  const Cell& c = n.cells[0];
  CHECK(c.kind == CellKind::Lut);
  CHECK(c.truth == std::vector<uint8_t>{0, 0, 0, 1});
}

TEST_CASE("blif identity cover becomes a 1-LUT") {
  Netlist n = parse_blif(".model t\n.inputs a\n.outputs o\n.names a o\n1 1\n.end\n");
  REQUIRE(n.cells.size() == 1);
  CHECK(n.cells[0].truth == std::vector<uint8_t>{0, 1});
}

TEST_CASE("blif 2-bit adder has 4 inputs and 3 outputs") {
  Netlist n = parse_blif(fixtures::kAdd2Blif);
  CHECK(n.inputs.size() == 4);
  CHECK(n.outputs.size() == 3);
}

TEST_CASE("blif error reporting") {
  CHECK_THROWS_AS(parse_blif(".model t\n.wires a\n.end\n"), ParseError);
  CHECK_THROWS_AS(parse_blif(".model t\n.inputs a\n.outputs o\n.names a o\n2 1\n.end\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_blif(".model t\n.inputs a\n.outputs o\n.end\n"), ParseError);
  // 17-input .names is out of the supported subset.
  std::string many = ".model t\n.inputs";
  std::string sigs;
  for (int i = 0; i < 17; ++i) sigs += " x" + std::to_string(i);
  many += sigs + "\n.outputs o\n.names" + sigs + " o\n";
  many += std::string(17, '1') + " 1\n.end\n";
  CHECK_THROWS_AS(parse_blif(many), ParseError);
}

TEST_CASE("check_integrity accepts a well-formed gate") {
  Netlist n = parse_blif(".model t\n.inputs a b\n.outputs o\n.names a b o\n11 1\n.end\n");
  CHECK(check_integrity(n).empty());
}

TEST_CASE("check_integrity flags seeded faults") {
  // Two drivers on one net.
  Netlist n;
  n.name = "bad";
  NetIdx a = n.add_input("a");
  NetIdx o = n.add_net("o");
  n.add_cell(Cell{"g1", CellKind::Not, {a}, o, {}, "", 0});
  n.add_cell(Cell{"g2", CellKind::Not, {a}, o, {}, "", 0});
  n.add_output(o);
  auto v = check_integrity(n);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::MultipleDriver);
  CHECK(v[0].subject == "o");

  // Dangling input pin.
  Netlist m;
  m.name = "bad2";
  NetIdx mo = m.add_net("o");
  m.add_cell(Cell{"g", CellKind::Not, {kNoNet}, mo, {}, "", 0});
  m.add_output(mo);
  auto vm = check_integrity(m);
  CHECK(std::any_of(vm.begin(), vm.end(), [](const Violation& x) {
    return x.kind == Violation::Kind::DanglingInput;
  }));

  // Duplicate identifiers.
  Netlist d;
  d.name = "bad3";
  NetIdx da = d.add_input("a");
  NetIdx dq = d.add_net("q");
  NetIdx dr = d.add_net("r");
  d.add_cell(Cell{"g", CellKind::Not, {da}, dq, {}, "", 0});
  d.add_cell(Cell{"g", CellKind::Not, {da}, dr, {}, "", 0});
  d.add_output(dq);
  d.add_output(dr);
  auto vd = check_integrity(d);
  CHECK(std::any_of(vd.begin(), vd.end(), [](const Violation& x) {
    return x.kind == Violation::Kind::DuplicateId;
  }));

  // Undriven net.
  Netlist u;
  u.name = "bad4";
  NetIdx ux = u.add_net("x");
  u.add_output(ux);
  auto vu = check_integrity(u);
  REQUIRE(vu.size() == 1);
  CHECK(vu[0].kind == Violation::Kind::NoDriver);
}

TEST_CASE("json round-trip is lossless") {
  SUBCASE("empty netlist") {
    Netlist n;
    n.name = "empty";
    Netlist m = read_netlist(write_netlist(n));
    CHECK(m.cells.empty());
    CHECK(structurally_equal(n, m));
  }
  SUBCASE("adder") {
    Netlist n = parse_blif(fixtures::kAdd2Blif);
    Netlist m = read_netlist(write_netlist(n));
    CHECK(structurally_equal(n, m));
    CHECK(write_netlist(n) == write_netlist(m));
  }
  SUBCASE("shift register keeps clock and init") {
    Netlist n = parse_blif(fixtures::kShift3Blif);
    Netlist m = read_netlist(write_netlist(n));
    CHECK(structurally_equal(n, m));
  }
}

TEST_CASE("json read rejects integrity violations") {
  const char* dangling = R"({
 "name": "bad",
 "inputs": ["a"],
 "outputs": ["o"],
 "nets": ["a", "o"],
 "cells": [{"name": "g", "kind": "AND2", "inputs": ["a"], "output": "o"}]
})";
  CHECK_THROWS_AS(read_netlist(dangling), SchemaError);
  CHECK_THROWS_AS(read_netlist("{\"name\": 1}"), SchemaError);
  CHECK_THROWS_AS(read_netlist("not json"), SchemaError);
}

TEST_CASE("simulate XOR2") {
  Netlist n;
  n.name = "xor";
  NetIdx a = n.add_input("a");
  NetIdx b = n.add_input("b");
  NetIdx o = n.add_net("o");
  n.add_cell(Cell{"g", CellKind::Xor2, {a, b}, o, {}, "", 0});
  n.add_output(o);
  SimVector v;
  v.inputs = {{"a", true}, {"b", false}};
  CHECK(simulate(n, v, SimMode::Acyclic).outputs[0].second == true);
  CHECK(simulate(n, v, SimMode::FixedPoint).outputs[0].second == true);
}

TEST_CASE("simulate 2-bit adder matches the arithmetic oracle exhaustively") {
  Netlist n = parse_blif(fixtures::kAdd2Blif);
  for (unsigned bits = 0; bits < 16; ++bits) {
    unsigned a = bits & 3, b = (bits >> 2) & 3;
    SimResult r = simulate(n, vec(n, bits), SimMode::Acyclic);
    CHECK(outputs_as_uint(r) == fixtures::add_oracle(a, b));
  }
}

TEST_CASE("simulate is pure") {
  Netlist n = parse_blif(fixtures::kAdd2Blif);
  auto r1 = simulate(n, vec(n, 9), SimMode::FixedPoint);
  auto r2 = simulate(n, vec(n, 9), SimMode::FixedPoint);
  CHECK(r1.outputs == r2.outputs);
}

TEST_CASE("acyclic and fixed-point modes agree on acyclic netlists") {
  for (const char* blif : {fixtures::kAdd2Blif, fixtures::kAdd1Blif, fixtures::kMul2Blif}) {
    Netlist n = parse_blif(blif);
    auto rep = check_equivalence(n, n, PortMap::identity(n), 12, 1000, 1,
                                 SimMode::Acyclic, SimMode::FixedPoint);
    CHECK(rep.equivalent);
  }
}

TEST_CASE("two-inverter ring raises OscillationError") {
  Netlist n = parse_blif(fixtures::kNotRingBlif);
  SimVector v;
  CHECK_THROWS_AS(simulate(n, v, SimMode::FixedPoint), OscillationError);
  CHECK_THROWS_AS(simulate(n, v, SimMode::Acyclic), CycleError);
}

TEST_CASE("sequential shift register") {
  Netlist n = parse_blif(fixtures::kShift3Blif);
  std::vector<SimVector> stim;
  for (bool bit : {true, false, true}) {
    SimVector v;
    v.inputs["din"] = bit;
    stim.push_back(v);
  }
  auto trace = simulate_sequential(n, kUserClk, stim);
  REQUIRE(trace.size() == 3);
  // After three cycles the chain holds (q0,q1,q2) = (1,0,1).
  auto& last = trace.back().dff_states;
  auto state_of = [&](const std::string& q) {
    for (auto& [name, val] : last)
      if (name.find(q) != std::string::npos) return val;
    FAIL("state not found");
    return false;
  };
  CHECK(state_of("q0") == true);
  CHECK(state_of("q1") == false);
  CHECK(state_of("q2") == true);
}

TEST_CASE("sequential with empty stimulus leaves states unchanged") {
  Netlist n = parse_blif(fixtures::kShift3Blif);
  auto trace = simulate_sequential(n, kUserClk, {});
  CHECK(trace.empty());
}

TEST_CASE("2-bit multiplier fixture matches the oracle") {
  Netlist n = parse_blif(fixtures::kMul2Blif);
  for (unsigned bits = 0; bits < 16; ++bits) {
    unsigned a = bits & 3, b = (bits >> 2) & 3;
    SimResult r = simulate(n, vec(n, bits), SimMode::Acyclic);
    CHECK(outputs_as_uint(r) == fixtures::mul_oracle(a, b));
  }
}
