// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redact/netlist.hpp"

namespace redact {

// Island-style fabric: a width x width CLB grid inside a ring of I/O tiles,
// unit-length segments, disjoint switch blocks, and one configuration scan
// chain threading every config bit in a documented canonical order (see
// docs/architecture.md).
struct FabricParams {
  int width = 3;             // CLB grid is width x width
  int luts_per_clb = 8;      // N
  int lut_inputs = 4;        // K
  int channel_width = 8;     // tracks per channel segment
  int pads_per_io_tile = 1;
  bool ff_bypass = true;     // optional registered output per LUT slot
  std::string sb_pattern = "disjoint";

  void validate() const;
  std::string fingerprint() const;  // FNV-1a over the canonical field string
  int clb_inputs() const { return luts_per_clb + lut_inputs; }

  /// Small test architecture: 2-LUTs, two per CLB, narrow channels.
  static FabricParams micro(int w) {
    FabricParams p;
    p.width = w;
    p.luts_per_clb = 2;
    p.lut_inputs = 2;
    p.channel_width = 4;
    p.pads_per_io_tile = 1;
    p.ff_bypass = false;
    return p;
  }
};

enum class BitCategory : uint8_t { IO, Routing, Logic };
const char* bit_category_name(BitCategory c);

struct BitInfo {
  int index;
  BitCategory category;
  int tile_x, tile_y;   // ring-grid coordinates, (0,0) = south-west corner
  std::string element;  // e.g. "clb[1][1].lut0.tt[5]"
};

// One enable step in a track driver chain.
struct TrackSource {
  enum class Kind : uint8_t { Turn, ClbOut, PadIn };
  Kind kind;
  int bit;                             // enable bit index
  int from_seg = -1, from_track = -1;  // Turn
  int clb = -1, slot = -1;             // ClbOut
  int pad = -1;                        // PadIn
};

struct SegmentInfo {
  bool horizontal;
  int i, j;
  std::vector<NetIdx> tracks;
  std::vector<std::vector<TrackSource>> sources;  // per track, chain order
};

struct ClbPinInfo {
  int seg;                    // side segment this pin's mux reads
  std::vector<int> sel_bits;  // binary track select, LSB first
  NetIdx net;
};

struct ClbInfo {
  int x, y;
  std::vector<ClbPinInfo> pins;             // clb_inputs() entries
  std::vector<NetIdx> slots;                // slot output nets
  std::vector<std::vector<int>> xbar_bits;  // [lut][K * xbar select width]
  std::vector<std::vector<int>> lut_bits;   // [lut][2^K]
  std::vector<int> bypass_bits;             // [lut], empty without ff_bypass
};

struct PadInfo {
  int gx = 0, gy = 0, slot = 0;  // ring tile and pad position within it
  int seg = -1;                  // adjacent channel segment
  int dir_bit = -1;              // 0 = input pad, 1 = output pad
  std::vector<int> outsel_bits;
  NetIdx in_net, out_net, drive_net;
};

struct Fabric {
  FabricParams params;
  Netlist netlist;
  std::vector<BitInfo> bit_map;

  std::vector<CellIdx> config_dffs;  // chain order == bit_map order
  std::vector<NetIdx> bit_nets;      // config DFF output nets
  std::vector<SegmentInfo> segments;
  std::vector<ClbInfo> clbs;  // index = y * width + x
  std::vector<PadInfo> pads;  // global pad order (scan tile order)

  int num_bits() const { return static_cast<int>(bit_map.size()); }
  int num_pads() const { return static_cast<int>(pads.size()); }
  int clb_index(int x, int y) const { return y * params.width + x; }
  // Segment ids: horizontal h(i,j) first, then vertical v(i,j).
  int hseg(int i, int j) const { return j * params.width + i; }
  int vseg(int i, int j) const {
    int w = params.width;
    return w * (w + 1) + i * w + j;
  }
};

struct CategoryCounts {
  int io = 0, routing = 0, logic = 0;
  int total() const { return io + routing + logic; }
};

/// Deterministic: equal params produce byte-identical serialized netlists.
Fabric generate_fabric(const FabricParams& p);

CategoryCounts bit_categories(const Fabric& f);

struct Bitstream {
  std::vector<uint8_t> bits;
  std::string fabric_fingerprint;
};

Bitstream make_bitstream(const Fabric& f);  // all-zero, correct fingerprint

enum class LoadMethod { SerialShift, Direct };

/// Returns the fabric netlist with config DFF initial states holding the
/// bitstream. Serial shift clocks the scan chain for B prog_clk cycles;
/// direct writes the states immediately. Both agree bit-for-bit.
Netlist load_bitstream(const Fabric& f, const Bitstream& b, LoadMethod method);

// Bitstream file format: "W N K Wch pads B fingerprint\n" + one 0/1 line.
std::string write_bitstream(const Fabric& f, const Bitstream& b);
Bitstream read_bitstream(const std::string& text);
void write_bitstream_file(const Fabric& f, const Bitstream& b, const std::string& path);
Bitstream read_bitstream_file(const std::string& path);

// Fabric file: JSON {params, netlist, bit_map}. Reading regenerates from
// params and cross-checks the stored netlist byte-for-byte.
std::string write_fabric(const Fabric& f);
Fabric read_fabric(const std::string& text);
void write_fabric_file(const Fabric& f, const std::string& path);
Fabric read_fabric_file(const std::string& path);

}  // namespace redact
