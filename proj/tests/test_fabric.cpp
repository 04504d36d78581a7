#include <doctest.h>

#include <random>
#include <set>

#include "redact/fabric.hpp"
#include "redact/netlist_json.hpp"
#include "redact/sim.hpp"

using namespace redact;

namespace {

// Independent closed-form resource count, derived from the documented
// architecture only (no generator code involved).
CategoryCounts closed_form_counts(const FabricParams& p) {
  int W = p.width, N = p.luts_per_clb, K = p.lut_inputs, C = p.channel_width;
  int ppt = p.pads_per_io_tile, I = N + K;
  auto clog2 = [](int v) {
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
  };
  int nb = clog2(C), nbx = clog2(I + N);

  CategoryCounts cc;
  cc.io = 4 * W * ppt;

  // Connection blocks: pad output muxes + CLB input pin muxes.
  long routing = 4L * W * ppt * nb + 1L * W * W * I * nb;
  // Switch blocks: per segment-track, one enable per incoming turn at each
  // endpoint. deg(i,j) counts segments incident to switch block (i,j).
  auto deg = [&](int i, int j) {
    return (i > 0 ? 1 : 0) + (i < W ? 1 : 0) + (j > 0 ? 1 : 0) + (j < W ? 1 : 0);
  };
  long turns = 0;
  for (int j = 0; j <= W; ++j)
    for (int i = 0; i < W; ++i)
      turns += (deg(i, j) - 1) + (deg(i + 1, j) - 1);
  for (int i = 0; i <= W; ++i)
    for (int j = 0; j < W; ++j)
      turns += (deg(i, j) - 1) + (deg(i, j + 1) - 1);
  routing += turns * C;
  // Each CLB slot taps its south and east channel on one track.
  routing += 2L * W * W * N;
  // Each pad taps every track of its adjacent segment.
  routing += 4L * W * ppt * C;
  cc.routing = static_cast<int>(routing);

  cc.logic = W * W * (N * K * nbx + N * (1 << K) + (p.ff_bypass ? N : 0));
  return cc;
}

Bitstream random_bitstream(const Fabric& f, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bitstream b = make_bitstream(f);
  for (auto& bit : b.bits) bit = rng() & 1;
  return b;
}

}  // namespace

TEST_CASE("micro fabric bit count matches the closed-form formula") {
  FabricParams p = FabricParams::micro(2);
  Fabric f = generate_fabric(p);
  CategoryCounts want = closed_form_counts(p);
  CategoryCounts got = bit_categories(f);
  CHECK(got.io == want.io);
  CHECK(got.routing == want.routing);
  CHECK(got.logic == want.logic);
  CHECK(f.num_bits() == want.total());
  // Config DFF count equals the bit map size.
  int dffs = 0;
  for (const auto& c : f.netlist.cells)
    if (c.kind == CellKind::Dff && c.clock == kProgClk) ++dffs;
  CHECK(dffs == f.num_bits());
  // Frozen value for the micro 2x2 architecture.
  CHECK(f.num_bits() == 360);
}

TEST_CASE("default 3x3 architecture has 12 I/O direction bits") {
  FabricParams p;  // defaults: N=8, K=4
  p.width = 3;
  Fabric f = generate_fabric(p);
  CHECK(bit_categories(f).io == 12);
  CHECK(closed_form_counts(p).total() == f.num_bits());
  CHECK(check_integrity(f.netlist).empty());
}

TEST_CASE("1x1 fabric is valid and has four I/O tiles") {
  Fabric f = generate_fabric(FabricParams::micro(1));
  CHECK(f.num_pads() == 4);
  CHECK(check_integrity(f.netlist).empty());
  std::set<std::pair<int, int>> tiles;
  for (const auto& pad : f.pads) tiles.insert({pad.gx, pad.gy});
  CHECK(tiles.size() == 4);
}

TEST_CASE("IO count scales with the perimeter") {
  FabricParams p = FabricParams::micro(4);
  Fabric f = generate_fabric(p);
  CHECK(bit_categories(f).io == 16);
}

TEST_CASE("bit categories partition the index space") {
  for (int w : {1, 2}) {
    Fabric f = generate_fabric(FabricParams::micro(w));
    std::set<int> seen;
    for (const auto& b : f.bit_map) {
      CHECK(b.index == static_cast<int>(seen.size()));
      seen.insert(b.index);
    }
    CHECK(static_cast<int>(seen.size()) == f.num_bits());
    CategoryCounts c = bit_categories(f);
    CHECK(c.total() == f.num_bits());
  }
}

TEST_CASE("scan chain threads every config DFF in bit-map order") {
  Fabric f = generate_fabric(FabricParams::micro(2));
  const Netlist& n = f.netlist;
  // Walk data-input links starting at scan_in_head.
  NetIdx cur = n.find_net("scan_in_head");
  REQUIRE(cur != kNoNet);
  auto consumers = n.consumers();
  size_t visited = 0;
  while (true) {
    CellIdx next_dff = -1;
    for (CellIdx ci : consumers[cur]) {
      const Cell& c = n.cells[ci];
      if (c.kind == CellKind::Dff && c.clock == kProgClk &&
          c.inputs[0] == cur) {
        CHECK(next_dff == -1);  // single chain successor
        next_dff = ci;
      }
    }
    if (next_dff == -1) break;
    CHECK(next_dff == f.config_dffs[visited]);
    cur = n.cells[next_dff].output;
    ++visited;
  }
  CHECK(visited == static_cast<size_t>(f.num_bits()));
  // The tail must feed scan_out_tail through a buffer.
  bool tail_found = false;
  for (CellIdx ci : consumers[cur]) {
    const Cell& c = n.cells[ci];
    if (c.kind == CellKind::OutputBuf &&
        n.net_name(c.output) == "scan_out_tail")
      tail_found = true;
  }
  CHECK(tail_found);
}

TEST_CASE("generation is deterministic") {
  FabricParams p = FabricParams::micro(2);
  Fabric a = generate_fabric(p);
  Fabric b = generate_fabric(p);
  CHECK(write_netlist(a.netlist) == write_netlist(b.netlist));
  CHECK(write_fabric(a) == write_fabric(b));
}

TEST_CASE("bit count grows strictly with grid width") {
  int prev = 0;
  for (int w : {1, 2, 3, 4, 5}) {
    Fabric f = generate_fabric(FabricParams::micro(w));
    CHECK(f.num_bits() > prev);
    prev = f.num_bits();
  }
}

TEST_CASE("all-zero bitstream configures a constant fabric") {
  Fabric f = generate_fabric(FabricParams::micro(2));
  Netlist cfg = load_bitstream(f, make_bitstream(f), LoadMethod::Direct);
  for (CellIdx ci : f.config_dffs) CHECK(cfg.cells[ci].init == 0);

  Simulator sim(cfg);
  std::vector<uint64_t> pi(cfg.inputs.size());
  std::vector<uint64_t> vals;
  std::mt19937_64 rng(5);
  for (int round = 0; round < 4; ++round) {
    for (auto& w : pi) w = rng();
    uint64_t stable = sim.eval(SimMode::FixedPoint, pi, sim.initial_state_words(), vals);
    CHECK(stable == ~uint64_t{0});
    for (const auto& pad : f.pads) CHECK(vals[pad.out_net] == 0);
  }
}

TEST_CASE("serial shift and direct load agree for random bitstreams") {
  for (int w : {1, 2}) {
    Fabric f = generate_fabric(FabricParams::micro(w));
    for (uint64_t seed = 0; seed < 100; ++seed) {
      Bitstream b = random_bitstream(f, seed * 31 + w);
      Netlist direct = load_bitstream(f, b, LoadMethod::Direct);
      Netlist serial = load_bitstream(f, b, LoadMethod::SerialShift);
      bool all_equal = true;
      for (int i = 0; i < f.num_bits(); ++i) {
        if (direct.cells[f.config_dffs[i]].init !=
            serial.cells[f.config_dffs[i]].init) {
          all_equal = false;
          break;
        }
      }
      CHECK(all_equal);
      // Chain position i holds bit i.
      for (int i = 0; i < f.num_bits(); ++i)
        if (serial.cells[f.config_dffs[i]].init != b.bits[i]) {
          CHECK(serial.cells[f.config_dffs[i]].init == b.bits[i]);
          break;
        }
    }
  }
}

TEST_CASE("load_bitstream validates length and fingerprint") {
  Fabric f = generate_fabric(FabricParams::micro(1));
  Bitstream b = make_bitstream(f);
  b.bits.pop_back();
  CHECK_THROWS_AS(load_bitstream(f, b, LoadMethod::Direct), LengthMismatchError);
  Bitstream b2 = make_bitstream(f);
  b2.fabric_fingerprint = "deadbeefdeadbeef";
  CHECK_THROWS_AS(load_bitstream(f, b2, LoadMethod::Direct),
                  FingerprintMismatchError);
}

TEST_CASE("bitstream file round-trip") {
  Fabric f = generate_fabric(FabricParams::micro(1));
  Bitstream b = random_bitstream(f, 9);
  Bitstream r = read_bitstream(write_bitstream(f, b));
  CHECK(r.bits == b.bits);
  CHECK(r.fabric_fingerprint == b.fabric_fingerprint);
  CHECK_THROWS_AS(read_bitstream("1 2 3\n"), ParseError);
  CHECK_THROWS_AS(read_bitstream("1 2 2 4 1 5 abc\n0101\n"), ParseError);
}

TEST_CASE("fabric file round-trip regenerates identically") {
  Fabric f = generate_fabric(FabricParams::micro(1));
  Fabric g = read_fabric(write_fabric(f));
  CHECK(g.num_bits() == f.num_bits());
  CHECK(write_fabric(g) == write_fabric(f));
  CHECK_THROWS_AS(read_fabric("{}"), SchemaError);
}

TEST_CASE("fabric netlist round-trips through the json schema") {
  Fabric f = generate_fabric(FabricParams::micro(2));
  Netlist n = read_netlist(write_netlist(f.netlist));
  CHECK(n.cells.size() == f.netlist.cells.size());
  CHECK(n.nets.size() == f.netlist.nets.size());
  CHECK(write_netlist(n) == write_netlist(f.netlist));
}
