// SPDX-License-Identifier: Apache-2.0
#include "redact/fabric.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "redact/netlist_json.hpp"
#include "redact/sim.hpp"

namespace redact {

using ordered_json = nlohmann::ordered_json;

namespace {

int ceil_log2(int p) {
  int b = 0;
  while ((1 << b) < p) ++b;
  return b;
}

std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void FabricParams::validate() const {
  if (width < 1) throw Error("fabric: width must be >= 1");
  if (luts_per_clb < 1) throw Error("fabric: luts_per_clb must be >= 1");
  if (lut_inputs < 1 || lut_inputs > 6)
    throw Error("fabric: lut_inputs must be in 1..6");
  if (channel_width < 2) throw Error("fabric: channel_width must be >= 2");
  if (pads_per_io_tile < 1) throw Error("fabric: pads_per_io_tile must be >= 1");
  if (sb_pattern != "disjoint")
    throw Error("fabric: unsupported switch-block pattern '" + sb_pattern + "'");
}

std::string FabricParams::fingerprint() const {
  std::string s = std::to_string(width) + "|" + std::to_string(luts_per_clb) +
                  "|" + std::to_string(lut_inputs) + "|" +
                  std::to_string(channel_width) + "|" +
                  std::to_string(pads_per_io_tile) + "|" +
                  (ff_bypass ? "1" : "0") + "|" + sb_pattern;
  return fnv1a_hex(s);
}

const char* bit_category_name(BitCategory c) {
  switch (c) {
    case BitCategory::IO: return "IO";
    case BitCategory::Routing: return "ROUTING";
    case BitCategory::Logic: return "LOGIC";
  }
  return "?";
}

namespace {

struct Builder {
  const FabricParams& p;
  Fabric f;
  Netlist& nl;
  int W, N, K, Wch, PPT, I;
  NetIdx const0 = kNoNet, const1 = kNoNet;
  NetIdx chain_prev = kNoNet;

  explicit Builder(const FabricParams& p_) : p(p_), nl(f.netlist) {
    W = p.width;
    N = p.luts_per_clb;
    K = p.lut_inputs;
    Wch = p.channel_width;
    PPT = p.pads_per_io_tile;
    I = p.clb_inputs();
    f.params = p;
  }

  // --- small cell helpers ----------------------------------------------
  void cell_into(NetIdx out, CellKind kind, std::vector<NetIdx> ins) {
    nl.add_cell(Cell{"g_" + nl.net_name(out), kind, std::move(ins), out, {}, "", 0});
  }
  void buf_into(NetIdx out, NetIdx a) { cell_into(out, CellKind::InputBuf, {a}); }
  void mux_into(NetIdx out, NetIdx a, NetIdx b, NetIdx sel) {
    cell_into(out, CellKind::Mux2, {a, b, sel});
  }

  NetIdx new_bit(BitCategory cat, int gx, int gy, std::string element) {
    int idx = static_cast<int>(f.bit_map.size());
    NetIdx out = nl.add_net("cfg_" + std::to_string(idx));
    CellIdx c = nl.add_cell(Cell{"cfgff_" + std::to_string(idx), CellKind::Dff,
                                 {chain_prev}, out, {}, kProgClk, 0});
    f.config_dffs.push_back(c);
    f.bit_nets.push_back(out);
    f.bit_map.push_back(BitInfo{idx, cat, gx, gy, std::move(element)});
    chain_prev = out;
    return out;
  }

  // Balanced mux tree with level-shared selects; select value s picks
  // sources[min(s, P-1)]. Collapses sub-trees whose halves are identical.
  void mux_tree_into(NetIdx out, const std::string& prefix,
                     std::vector<NetIdx> srcs, const std::vector<NetIdx>& sels) {
    size_t want = size_t{1} << sels.size();
    if (srcs.size() > want)
      throw Error("fabric: mux tree select width too small");
    while (srcs.size() < want) srcs.push_back(srcs.back());
    if (srcs.size() == 1) {
      buf_into(out, srcs[0]);
      return;
    }
    int level = 0;
    while (srcs.size() > 1) {
      bool last = srcs.size() == 2;
      std::vector<NetIdx> next;
      for (size_t i = 0; i < srcs.size(); i += 2) {
        NetIdx a = srcs[i], b = srcs[i + 1];
        if (a == b && !last) {
          next.push_back(a);
          continue;
        }
        NetIdx o = last ? out
                        : nl.add_net(prefix + "_m" + std::to_string(level) +
                                     "_" + std::to_string(i / 2));
        if (a == b)
          buf_into(o, a);
        else
          mux_into(o, a, b, sels[level]);
        next.push_back(o);
      }
      srcs = std::move(next);
      ++level;
    }
  }

  // Priority chain of 2-input muxes: the last asserted enable wins; all
  // enables low drive the track to 0.
  void chain_into(NetIdx out, const std::string& prefix,
                  const std::vector<std::pair<NetIdx, NetIdx>>& src_en) {
    if (src_en.empty()) {
      buf_into(out, const0);
      return;
    }
    NetIdx cur = const0;
    for (size_t k = 0; k < src_en.size(); ++k) {
      NetIdx o = k + 1 == src_en.size()
                     ? out
                     : nl.add_net(prefix + "_c" + std::to_string(k));
      mux_into(o, cur, src_en[k].first, src_en[k].second);
      cur = o;
    }
  }

  // --- geometry ----------------------------------------------------------
  bool has_hseg(int i, int j) const { return i >= 0 && i < W && j >= 0 && j <= W; }
  bool has_vseg(int i, int j) const { return i >= 0 && i <= W && j >= 0 && j < W; }

  std::string seg_name(bool horizontal, int i, int j) const {
    return std::string(horizontal ? "h" : "v") + "_" + std::to_string(i) + "_" +
           std::to_string(j);
  }

  // Incident segments of switch block (i,j) in canonical order.
  std::vector<int> sb_incident(int i, int j) const {
    std::vector<int> segs;
    if (has_hseg(i - 1, j)) segs.push_back(f.hseg(i - 1, j));
    if (has_hseg(i, j)) segs.push_back(f.hseg(i, j));
    if (has_vseg(i, j - 1)) segs.push_back(f.vseg(i, j - 1));
    if (has_vseg(i, j)) segs.push_back(f.vseg(i, j));
    return segs;
  }

  // --- phase 0: structural nets -----------------------------------------
  void create_structure() {
    nl.name = "fabric_w" + std::to_string(W) + "_n" + std::to_string(N) + "_k" +
              std::to_string(K) + "_c" + std::to_string(Wch) + "_p" +
              std::to_string(PPT) + (p.ff_bypass ? "_ff" : "");
    nl.add_input("scan_in_head");
    const0 = nl.add_net("const0");
    cell_into(const0, CellKind::Const0, {});
    const1 = nl.add_net("const1");
    cell_into(const1, CellKind::Const1, {});
    chain_prev = nl.find_net("scan_in_head");

    // Segments and their track nets.
    f.segments.resize(2 * W * (W + 1));
    auto init_seg = [&](int id, bool horizontal, int i, int j) {
      SegmentInfo s;
      s.horizontal = horizontal;
      s.i = i;
      s.j = j;
      for (int t = 0; t < Wch; ++t)
        s.tracks.push_back(
            nl.add_net(seg_name(horizontal, i, j) + "_t" + std::to_string(t)));
      s.sources.resize(Wch);
      f.segments[id] = std::move(s);
    };
    for (int j = 0; j <= W; ++j)
      for (int i = 0; i < W; ++i) init_seg(f.hseg(i, j), true, i, j);
    for (int i = 0; i <= W; ++i)
      for (int j = 0; j < W; ++j) init_seg(f.vseg(i, j), false, i, j);

    // CLB pin and slot nets.
    f.clbs.resize(W * W);
    for (int y = 0; y < W; ++y) {
      for (int x = 0; x < W; ++x) {
        ClbInfo& c = f.clbs[f.clb_index(x, y)];
        c.x = x;
        c.y = y;
        std::string base = "clb_" + std::to_string(x) + "_" + std::to_string(y);
        // Pin q reads side q mod 4: south, east, north, west.
        int sides[4] = {f.hseg(x, y), f.vseg(x + 1, y), f.hseg(x, y + 1),
                        f.vseg(x, y)};
        for (int q = 0; q < I; ++q) {
          ClbPinInfo pin;
          pin.seg = sides[q % 4];
          pin.net = nl.add_net(base + "_p" + std::to_string(q));
          c.pins.push_back(std::move(pin));
        }
        for (int l = 0; l < N; ++l)
          c.slots.push_back(nl.add_net(base + "_s" + std::to_string(l)));
      }
    }

    // Pads in scan tile order: south row, then west/east per row, then north.
    auto add_pad = [&](int gx, int gy, int seg) {
      for (int sp = 0; sp < PPT; ++sp) {
        PadInfo pad;
        pad.gx = gx;
        pad.gy = gy;
        pad.slot = sp;
        pad.seg = seg;
        int g = static_cast<int>(f.pads.size());
        pad.in_net = nl.add_input("pad_in_" + std::to_string(g));
        pad.out_net = nl.add_net("pad_out_" + std::to_string(g));
        pad.drive_net = nl.add_net("pad_drv_" + std::to_string(g));
        f.pads.push_back(std::move(pad));
      }
    };
    for (int x = 0; x < W; ++x) add_pad(x + 1, 0, f.hseg(x, 0));
    for (int y = 0; y < W; ++y) {
      add_pad(0, y + 1, f.vseg(0, y));
      add_pad(W + 1, y + 1, f.vseg(W, y));
    }
    for (int x = 0; x < W; ++x) add_pad(x + 1, W + 1, f.hseg(x, W));
  }

  // --- per-tile configuration + logic -------------------------------------
  std::vector<PadInfo*> tile_pads(int gx, int gy) {
    std::vector<PadInfo*> out;
    for (auto& pad : f.pads)
      if (pad.gx == gx && pad.gy == gy) out.push_back(&pad);
    return out;
  }

  // Allocates the enable bits and builds the driver chains of a segment.
  // Owner tile (gx,gy) holds these bits in its switch-block block.
  void build_segment(int seg_id, int gx, int gy) {
    SegmentInfo& s = f.segments[seg_id];
    std::string sname = seg_name(s.horizontal, s.i, s.j);
    // Endpoint switch blocks.
    int ai = s.i, aj = s.j;
    int bi = s.horizontal ? s.i + 1 : s.i;
    int bj = s.horizontal ? s.j : s.j + 1;

    // Adjacent CLB whose outputs tap this segment: a CLB drives only its
    // south and east channels.
    int tap_clb = -1;
    if (s.horizontal) {
      if (s.j < W) tap_clb = f.clb_index(s.i, s.j);  // south channel of (i,j)
    } else {
      if (s.i > 0) tap_clb = f.clb_index(s.i - 1, s.j);  // east channel of (i-1,j)
    }

    // Perimeter pads feeding this segment.
    std::vector<int> tap_pads;
    int pgx = -1, pgy = -1;
    if (s.horizontal && s.j == 0) pgx = s.i + 1, pgy = 0;
    if (s.horizontal && s.j == W) pgx = s.i + 1, pgy = W + 1;
    if (!s.horizontal && s.i == 0) pgx = 0, pgy = s.j + 1;
    if (!s.horizontal && s.i == W) pgx = W + 1, pgy = s.j + 1;
    if (pgx >= 0)
      for (size_t g = 0; g < f.pads.size(); ++g)
        if (f.pads[g].gx == pgx && f.pads[g].gy == pgy)
          tap_pads.push_back(static_cast<int>(g));

    for (int t = 0; t < Wch; ++t) {
      std::vector<std::pair<NetIdx, NetIdx>> src_en;
      auto add_turn = [&](int from_seg) {
        NetIdx en = new_bit(BitCategory::Routing, gx, gy,
                            "seg[" + sname + "].t[" + std::to_string(t) +
                                "].en_from_" +
                                seg_name(f.segments[from_seg].horizontal,
                                         f.segments[from_seg].i,
                                         f.segments[from_seg].j));
        TrackSource ts;
        ts.kind = TrackSource::Kind::Turn;
        ts.bit = static_cast<int>(f.bit_map.size()) - 1;
        ts.from_seg = from_seg;
        ts.from_track = t;
        s.sources[t].push_back(ts);
        src_en.emplace_back(f.segments[from_seg].tracks[t], en);
      };
      for (int from : sb_incident(ai, aj))
        if (from != seg_id) add_turn(from);
      for (int from : sb_incident(bi, bj))
        if (from != seg_id) add_turn(from);

      if (tap_clb >= 0) {
        const ClbInfo& c = f.clbs[tap_clb];
        for (int slot = 0; slot < N; ++slot) {
          if (slot % Wch != t) continue;
          NetIdx en = new_bit(BitCategory::Routing, gx, gy,
                              "seg[" + sname + "].t[" + std::to_string(t) +
                                  "].en_from_clb[" + std::to_string(c.x) + "][" +
                                  std::to_string(c.y) + "].s" +
                                  std::to_string(slot));
          TrackSource ts;
          ts.kind = TrackSource::Kind::ClbOut;
          ts.bit = static_cast<int>(f.bit_map.size()) - 1;
          ts.clb = tap_clb;
          ts.slot = slot;
          s.sources[t].push_back(ts);
          src_en.emplace_back(c.slots[slot], en);
        }
      }
      for (int g : tap_pads) {
        NetIdx en = new_bit(BitCategory::Routing, gx, gy,
                            "seg[" + sname + "].t[" + std::to_string(t) +
                                "].en_from_pad[" + std::to_string(g) + "]");
        TrackSource ts;
        ts.kind = TrackSource::Kind::PadIn;
        ts.bit = static_cast<int>(f.bit_map.size()) - 1;
        ts.pad = g;
        s.sources[t].push_back(ts);
        src_en.emplace_back(f.pads[g].drive_net, en);
      }
      chain_into(s.tracks[t], sname + "_t" + std::to_string(t), src_en);
    }
  }

  void build_io_tile(int gx, int gy, int owned_seg) {
    auto pads = tile_pads(gx, gy);
    std::string tile = "io[" + std::to_string(gx) + "][" + std::to_string(gy) + "]";
    // Direction bits first, then connection-block (output select) bits.
    std::vector<NetIdx> dir_nets;
    for (auto* pad : pads) {
      dir_nets.push_back(new_bit(BitCategory::IO, gx, gy,
                                 tile + ".pad[" + std::to_string(pad->slot) +
                                     "].dir"));
      pad->dir_bit = static_cast<int>(f.bit_map.size()) - 1;
    }
    int nb = ceil_log2(Wch);
    std::vector<std::vector<NetIdx>> osel_nets;
    for (auto* pad : pads) {
      std::vector<NetIdx> sels;
      for (int b = 0; b < nb; ++b) {
        sels.push_back(new_bit(BitCategory::Routing, gx, gy,
                               tile + ".pad[" + std::to_string(pad->slot) +
                                   "].osel[" + std::to_string(b) + "]"));
        pad->outsel_bits.push_back(static_cast<int>(f.bit_map.size()) - 1);
      }
      osel_nets.push_back(std::move(sels));
    }
    if (owned_seg >= 0) build_segment(owned_seg, gx, gy);

    // Pad logic: inbound drive gated by direction, outbound mux + gate.
    for (size_t k = 0; k < pads.size(); ++k) {
      PadInfo* pad = pads[k];
      int g = static_cast<int>(pad - f.pads.data());
      std::string base = "pad_" + std::to_string(g);
      NetIdx ndir = nl.add_net(base + "_ndir");
      cell_into(ndir, CellKind::Not, {dir_nets[k]});
      cell_into(pad->drive_net, CellKind::And2, {ndir, pad->in_net});
      NetIdx osel = nl.add_net(base + "_osel");
      mux_tree_into(osel, base + "_osel", f.segments[pad->seg].tracks,
                    osel_nets[k]);
      cell_into(pad->out_net, CellKind::And2, {dir_nets[k], osel});
    }
  }

  void build_clb(int x, int y, int gx, int gy) {
    ClbInfo& c = f.clbs[f.clb_index(x, y)];
    std::string tile = "clb[" + std::to_string(x) + "][" + std::to_string(y) + "]";
    std::string base = "clb_" + std::to_string(x) + "_" + std::to_string(y);

    // Connection block: binary track select per input pin.
    int nb = ceil_log2(Wch);
    std::vector<std::vector<NetIdx>> pin_sels(I);
    for (int q = 0; q < I; ++q) {
      for (int b = 0; b < nb; ++b) {
        pin_sels[q].push_back(
            new_bit(BitCategory::Routing, gx, gy,
                    tile + ".pin[" + std::to_string(q) + "].sel[" +
                        std::to_string(b) + "]"));
        c.pins[q].sel_bits.push_back(static_cast<int>(f.bit_map.size()) - 1);
      }
    }

    // Switch block: this tile owns its south and west segments.
    build_segment(f.hseg(x, y), gx, gy);
    build_segment(f.vseg(x, y), gx, gy);

    // CLB bits: crossbar selects, LUT tables, bypass.
    int nbx = ceil_log2(I + N);
    std::vector<std::vector<std::vector<NetIdx>>> xbar_sels(N);
    for (int l = 0; l < N; ++l) {
      c.xbar_bits.emplace_back();
      xbar_sels[l].resize(K);
      for (int pin = 0; pin < K; ++pin) {
        for (int b = 0; b < nbx; ++b) {
          xbar_sels[l][pin].push_back(
              new_bit(BitCategory::Logic, gx, gy,
                      tile + ".lut[" + std::to_string(l) + "].xbar[" +
                          std::to_string(pin) + "].sel[" + std::to_string(b) +
                          "]"));
          c.xbar_bits[l].push_back(static_cast<int>(f.bit_map.size()) - 1);
        }
      }
    }
    std::vector<std::vector<NetIdx>> tt_nets(N);
    for (int l = 0; l < N; ++l) {
      c.lut_bits.emplace_back();
      for (int m = 0; m < (1 << K); ++m) {
        tt_nets[l].push_back(new_bit(BitCategory::Logic, gx, gy,
                                     tile + ".lut[" + std::to_string(l) +
                                         "].tt[" + std::to_string(m) + "]"));
        c.lut_bits[l].push_back(static_cast<int>(f.bit_map.size()) - 1);
      }
    }
    std::vector<NetIdx> bypass_nets;
    if (p.ff_bypass) {
      for (int l = 0; l < N; ++l) {
        bypass_nets.push_back(new_bit(BitCategory::Logic, gx, gy,
                                      tile + ".lut[" + std::to_string(l) +
                                          "].bypass"));
        c.bypass_bits.push_back(static_cast<int>(f.bit_map.size()) - 1);
      }
    }

    // Logic: pin muxes, crossbars, LUT trees, optional registered output.
    for (int q = 0; q < I; ++q)
      mux_tree_into(c.pins[q].net, base + "_p" + std::to_string(q),
                    f.segments[c.pins[q].seg].tracks, pin_sels[q]);

    std::vector<NetIdx> xbar_srcs;
    for (int q = 0; q < I; ++q) xbar_srcs.push_back(c.pins[q].net);
    for (int l = 0; l < N; ++l) xbar_srcs.push_back(c.slots[l]);

    for (int l = 0; l < N; ++l) {
      std::string lbase = base + "_l" + std::to_string(l);
      std::vector<NetIdx> lut_sel;
      for (int pin = 0; pin < K; ++pin) {
        NetIdx xout = nl.add_net(lbase + "_x" + std::to_string(pin));
        mux_tree_into(xout, lbase + "_x" + std::to_string(pin), xbar_srcs,
                      xbar_sels[l][pin]);
        lut_sel.push_back(xout);
      }
      if (p.ff_bypass) {
        NetIdx lut_out = nl.add_net(lbase + "_out");
        mux_tree_into(lut_out, lbase + "_tt", tt_nets[l], lut_sel);
        NetIdx q = nl.add_net(lbase + "_q");
        nl.add_cell(Cell{"g_" + nl.net_name(q), CellKind::Dff, {lut_out}, q,
                         {}, kUserClk, 0});
        mux_into(c.slots[l], lut_out, q, bypass_nets[l]);
      } else {
        mux_tree_into(c.slots[l], lbase + "_tt", tt_nets[l], lut_sel);
      }
    }
  }

  Fabric build() {
    create_structure();
    for (int gy = 0; gy <= W + 1; ++gy) {
      for (int gx = 0; gx <= W + 1; ++gx) {
        bool xe = gx == 0 || gx == W + 1;
        bool ye = gy == 0 || gy == W + 1;
        if (xe && ye) continue;  // corner
        if (ye) {
          // South tiles own no segment; north tiles own their h segment.
          build_io_tile(gx, gy, gy == 0 ? -1 : f.hseg(gx - 1, W));
        } else if (xe) {
          build_io_tile(gx, gy, gx == 0 ? -1 : f.vseg(W, gy - 1));
        } else {
          build_clb(gx - 1, gy - 1, gx, gy);
        }
      }
    }
    NetIdx tail = nl.add_net("scan_out_tail");
    cell_into(tail, CellKind::OutputBuf, {chain_prev});
    for (const auto& pad : f.pads) nl.add_output(pad.out_net);
    nl.add_output(tail);
    require_integrity(nl, "generate_fabric");
    return std::move(f);
  }
};

}  // namespace

Fabric generate_fabric(const FabricParams& p) {
  p.validate();
  Builder b(p);
  return b.build();
}

CategoryCounts bit_categories(const Fabric& f) {
  CategoryCounts c;
  for (const auto& b : f.bit_map) {
    switch (b.category) {
      case BitCategory::IO: ++c.io; break;
      case BitCategory::Routing: ++c.routing; break;
      case BitCategory::Logic: ++c.logic; break;
    }
  }
  return c;
}

Bitstream make_bitstream(const Fabric& f) {
  Bitstream b;
  b.bits.assign(f.num_bits(), 0);
  b.fabric_fingerprint = f.params.fingerprint();
  return b;
}

Netlist load_bitstream(const Fabric& f, const Bitstream& b, LoadMethod method) {
  if (static_cast<int>(b.bits.size()) != f.num_bits())
    throw LengthMismatchError("bitstream has " + std::to_string(b.bits.size()) +
                              " bits, fabric expects " +
                              std::to_string(f.num_bits()));
  if (b.fabric_fingerprint != f.params.fingerprint())
    throw FingerprintMismatchError("bitstream fingerprint " +
                                   b.fabric_fingerprint +
                                   " does not match fabric " +
                                   f.params.fingerprint());
  Netlist out = f.netlist;
  if (method == LoadMethod::Direct) {
    for (int i = 0; i < f.num_bits(); ++i)
      out.cells[f.config_dffs[i]].init = b.bits[i];
    return out;
  }

  // Serial shift: clock the chain for B cycles. The last bit of the stream
  // is presented first so bit i ends up in chain position i. Combinational
  // nets may churn mid-shift; the chain itself is register-to-register, so a
  // single evaluation sweep per cycle suffices to sample the data pins.
  Simulator sim(f.netlist);
  std::vector<uint64_t> pi(f.netlist.inputs.size(), 0);
  size_t scan_pos = 0;
  bool found = false;
  for (size_t i = 0; i < f.netlist.inputs.size(); ++i) {
    if (f.netlist.net_name(f.netlist.inputs[i]) == "scan_in_head") {
      scan_pos = i;
      found = true;
    }
  }
  if (!found) throw BrokenChainError("fabric netlist has no scan_in_head");
  std::vector<uint64_t> state = sim.initial_state_words();
  std::vector<uint64_t> vals;
  int B = f.num_bits();
  for (int t = 0; t < B; ++t) {
    pi[scan_pos] = b.bits[B - 1 - t] ? ~uint64_t{0} : 0;
    sim.eval(SimMode::FixedPoint, pi, state, vals, 1);
    state = sim.next_state_words(vals, kProgClk, state);
  }
  std::vector<size_t> dff_pos(f.netlist.cells.size(), SIZE_MAX);
  for (size_t i = 0; i < sim.dff_cells().size(); ++i)
    dff_pos[sim.dff_cells()[i]] = i;
  for (int i = 0; i < B; ++i)
    out.cells[f.config_dffs[i]].init =
        static_cast<uint8_t>(state[dff_pos[f.config_dffs[i]]] & 1);
  return out;
}

std::string write_bitstream(const Fabric& f, const Bitstream& b) {
  std::string out = std::to_string(f.params.width) + " " +
                    std::to_string(f.params.luts_per_clb) + " " +
                    std::to_string(f.params.lut_inputs) + " " +
                    std::to_string(f.params.channel_width) + " " +
                    std::to_string(f.params.pads_per_io_tile) + " " +
                    std::to_string(b.bits.size()) + " " + b.fabric_fingerprint +
                    "\n";
  for (uint8_t bit : b.bits) out += bit ? '1' : '0';
  out += "\n";
  return out;
}

Bitstream read_bitstream(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "bitstream: empty file");
  std::istringstream hs(header);
  long w, n, k, wch, pads, bcount;
  std::string fp;
  if (!(hs >> w >> n >> k >> wch >> pads >> bcount >> fp))
    throw ParseError(1, "bitstream: malformed header");
  std::string bits;
  if (!std::getline(in, bits)) throw ParseError(2, "bitstream: missing bit line");
  while (!bits.empty() && (bits.back() == '\r' || bits.back() == ' '))
    bits.pop_back();
  if (static_cast<long>(bits.size()) != bcount)
    throw ParseError(2, "bitstream: bit line length does not match header");
  Bitstream b;
  b.fabric_fingerprint = fp;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ParseError(2, "bitstream: bits must be 0/1");
    b.bits.push_back(c == '1');
  }
  return b;
}

void write_bitstream_file(const Fabric& f, const Bitstream& b,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << write_bitstream(f, b);
}

Bitstream read_bitstream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_bitstream(ss.str());
}

static ordered_json params_to_json(const FabricParams& p) {
  ordered_json j;
  j["width"] = p.width;
  j["luts_per_clb"] = p.luts_per_clb;
  j["lut_inputs"] = p.lut_inputs;
  j["channel_width"] = p.channel_width;
  j["pads_per_io_tile"] = p.pads_per_io_tile;
  j["ff_bypass"] = p.ff_bypass;
  j["sb_pattern"] = p.sb_pattern;
  j["fingerprint"] = p.fingerprint();
  return j;
}

static FabricParams params_from_json(const ordered_json& j) {
  FabricParams p;
  p.width = j.at("width").get<int>();
  p.luts_per_clb = j.at("luts_per_clb").get<int>();
  p.lut_inputs = j.at("lut_inputs").get<int>();
  p.channel_width = j.at("channel_width").get<int>();
  p.pads_per_io_tile = j.at("pads_per_io_tile").get<int>();
  p.ff_bypass = j.at("ff_bypass").get<bool>();
  p.sb_pattern = j.at("sb_pattern").get<std::string>();
  return p;
}

std::string write_fabric(const Fabric& f) {
  ordered_json j;
  j["params"] = params_to_json(f.params);
  ordered_json bm = ordered_json::array();
  for (const auto& b : f.bit_map) {
    ordered_json jb;
    jb["index"] = b.index;
    jb["category"] = bit_category_name(b.category);
    jb["tile"] = {b.tile_x, b.tile_y};
    jb["element"] = b.element;
    bm.push_back(std::move(jb));
  }
  j["bit_map"] = std::move(bm);
  j["netlist"] = ordered_json::parse(write_netlist(f.netlist));
  return j.dump(1) + "\n";
}

Fabric read_fabric(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("fabric: invalid JSON: ") + e.what());
  }
  if (!j.contains("params") || !j.contains("netlist") || !j.contains("bit_map"))
    throw SchemaError("fabric: missing params/netlist/bit_map");
  FabricParams p = params_from_json(j.at("params"));
  p.validate();
  if (j.at("params").contains("fingerprint") &&
      j.at("params").at("fingerprint").get<std::string>() != p.fingerprint())
    throw SchemaError("fabric: fingerprint does not match parameters");
  Fabric f = generate_fabric(p);
  // Generation is deterministic; the stored netlist must match exactly.
  if (ordered_json::parse(write_netlist(f.netlist)) != j.at("netlist"))
    throw SchemaError("fabric: stored netlist does not match regeneration");
  if (j.at("bit_map").size() != f.bit_map.size())
    throw SchemaError("fabric: stored bit map does not match regeneration");
  return f;
}

void write_fabric_file(const Fabric& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << write_fabric(f);
}

Fabric read_fabric_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_fabric(ss.str());
}

}  // namespace redact
