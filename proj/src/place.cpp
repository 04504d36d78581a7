// SPDX-License-Identifier: Apache-2.0
#include "redact/place.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace redact {

namespace {

struct Terminal {
  int x, y;
};

// Annealing schedule constants; fixed for reproducible reports.
constexpr double kInitTempFactor = 0.2;
constexpr double kAlpha = 0.9;
constexpr int kTempSteps = 64;
constexpr int kMovesPerMovable = 16;

}  // namespace

Placement pack_place(const MappedDesign& d, const Fabric& f, uint64_t seed) {
  const Netlist& n = d.lut_netlist;
  const FabricParams& p = f.params;
  const int W = p.width, N = p.luts_per_clb, I = p.clb_inputs();
  const int num_tiles = W * W;
  const int num_pads = f.num_pads();

  int pins = static_cast<int>(n.inputs.size() + n.outputs.size());
  if (pins > num_pads)
    throw CapacityError("IO", "design needs " + std::to_string(pins) +
                                  " pads, fabric has " + std::to_string(num_pads));
  if (d.dff_count > 0 && !p.ff_bypass)
    throw CapacityError("DFF", "design has flip-flops but the fabric has no "
                               "ff_bypass slots");
  if (d.lut_count > num_tiles * N)
    throw CapacityError("LUT", "design needs " + std::to_string(d.lut_count) +
                                   " LUTs, fabric has " +
                                   std::to_string(num_tiles * N));
  if (d.dff_count > num_tiles * N)
    throw CapacityError("DFF", "design needs " + std::to_string(d.dff_count) +
                                   " DFF slots, fabric has " +
                                   std::to_string(num_tiles * N));

  // --- slot units: pair each DFF with its dedicated source LUT ------------
  auto drv = n.drivers();
  auto cons = n.consumers();
  Placement pl;
  std::vector<int> unit_of_cell(n.cells.size(), -1);
  for (size_t ci = 0; ci < n.cells.size(); ++ci) {
    if (n.cells[ci].kind != CellKind::Lut) continue;
    SlotUnit u;
    u.lut = static_cast<CellIdx>(ci);
    u.out_net = n.cells[ci].output;
    bool is_po = false;
    for (NetIdx po : n.outputs)
      if (po == u.out_net) is_po = true;
    if (!is_po && cons[u.out_net].size() == 1 &&
        n.cells[cons[u.out_net][0]].kind == CellKind::Dff) {
      u.dff = cons[u.out_net][0];
      u.out_net = n.cells[u.dff].output;
    }
    unit_of_cell[ci] = static_cast<int>(pl.units.size());
    pl.units.push_back(u);
  }
  for (size_t ci = 0; ci < n.cells.size(); ++ci) {
    if (n.cells[ci].kind == CellKind::Dff) {
      NetIdx data = n.cells[ci].inputs[0];
      int dl = drv[data];
      bool paired = dl >= 0 && unit_of_cell[dl] >= 0 &&
                    pl.units[unit_of_cell[dl]].dff == static_cast<CellIdx>(ci);
      if (!paired)
        throw Error("pack_place: DFF '" + n.cells[ci].name +
                    "' has no dedicated source LUT");
    }
  }

  // --- greedy packing with shared-net affinity ----------------------------
  int num_units = static_cast<int>(pl.units.size());
  auto unit_nets = [&](int u) {
    std::set<NetIdx> nets;
    const Cell& lut = n.cells[pl.units[u].lut];
    for (NetIdx in : lut.inputs) nets.insert(in);
    nets.insert(pl.units[u].out_net);
    return nets;
  };
  std::vector<std::set<NetIdx>> unit_net_sets(num_units);
  for (int u = 0; u < num_units; ++u) unit_net_sets[u] = unit_nets(u);

  std::vector<std::vector<int>> clusters;
  std::vector<uint8_t> placed(num_units, 0);
  for (int seed_unit = 0; seed_unit < num_units; ++seed_unit) {
    if (placed[seed_unit]) continue;
    std::vector<int> cluster{seed_unit};
    placed[seed_unit] = 1;
    std::set<NetIdx> cluster_nets = unit_net_sets[seed_unit];
    auto external_inputs = [&](const std::vector<int>& cl,
                               int extra) {
      std::set<NetIdx> outs, ins;
      for (int u : cl) outs.insert(pl.units[u].out_net);
      if (extra >= 0) outs.insert(pl.units[extra].out_net);
      auto add_ins = [&](int u) {
        for (NetIdx in : n.cells[pl.units[u].lut].inputs)
          if (!outs.count(in)) ins.insert(in);
      };
      for (int u : cl) add_ins(u);
      if (extra >= 0) add_ins(extra);
      return static_cast<int>(ins.size());
    };
    while (static_cast<int>(cluster.size()) < N) {
      int best = -1, best_aff = -1;
      for (int u = 0; u < num_units; ++u) {
        if (placed[u]) continue;
        if (external_inputs(cluster, u) > I) continue;
        int aff = 0;
        for (NetIdx x : unit_net_sets[u])
          if (cluster_nets.count(x)) ++aff;
        if (aff > best_aff) {
          best_aff = aff;
          best = u;  // ties fall to the lowest unit id by scan order
        }
      }
      if (best < 0) break;
      cluster.push_back(best);
      placed[best] = 1;
      cluster_nets.insert(unit_net_sets[best].begin(), unit_net_sets[best].end());
    }
    clusters.push_back(std::move(cluster));
  }
  if (static_cast<int>(clusters.size()) > num_tiles)
    throw CapacityError("LUT", "packing produced " +
                                   std::to_string(clusters.size()) +
                                   " CLBs for " + std::to_string(num_tiles) +
                                   " tiles");

  // --- initial placement ---------------------------------------------------
  int num_clusters = static_cast<int>(clusters.size());
  std::vector<int> cluster_tile(num_clusters);
  std::vector<int> tile_cluster(num_tiles, -1);
  for (int c = 0; c < num_clusters; ++c) {
    cluster_tile[c] = c;
    tile_cluster[c] = c;
  }
  int num_ports = pins;
  std::vector<int> port_pad(num_ports);
  std::vector<int> pad_port(num_pads, -1);
  for (int port = 0; port < num_ports; ++port) {
    port_pad[port] = port;
    pad_port[port] = port;
  }

  // Net terminal lists over clusters (by unit) and ports.
  struct NetTerms {
    std::vector<int> clusters;  // cluster ids (deduplicated)
    std::vector<int> ports;
  };
  std::vector<int> unit_cluster(num_units, -1);
  for (int c = 0; c < num_clusters; ++c)
    for (int u : clusters[c]) unit_cluster[u] = c;

  std::vector<NetTerms> net_terms(n.nets.size());
  for (int u = 0; u < num_units; ++u)
    for (NetIdx x : unit_net_sets[u])
      net_terms[x].clusters.push_back(unit_cluster[u]);
  for (size_t i = 0; i < n.inputs.size(); ++i)
    net_terms[n.inputs[i]].ports.push_back(static_cast<int>(i));
  for (size_t i = 0; i < n.outputs.size(); ++i)
    net_terms[n.outputs[i]].ports.push_back(
        static_cast<int>(n.inputs.size() + i));
  std::vector<NetIdx> live_nets;
  for (NetIdx x = 0; x < static_cast<NetIdx>(n.nets.size()); ++x) {
    auto& t = net_terms[x];
    std::sort(t.clusters.begin(), t.clusters.end());
    t.clusters.erase(std::unique(t.clusters.begin(), t.clusters.end()),
                     t.clusters.end());
    if (t.clusters.size() + t.ports.size() >= 2) live_nets.push_back(x);
  }

  // Ring-grid positions: CLB tile t -> (x+1, y+1); pad g -> its tile coords.
  auto tile_pos = [&](int tile) {
    return Terminal{tile % W + 1, tile / W + 1};
  };
  auto pad_pos = [&](int pad) {
    return Terminal{f.pads[pad].gx, f.pads[pad].gy};
  };

  auto net_cost = [&](NetIdx x) -> double {
    int xmin = 1 << 20, xmax = -1, ymin = 1 << 20, ymax = -1;
    for (int c : net_terms[x].clusters) {
      Terminal t = tile_pos(cluster_tile[c]);
      xmin = std::min(xmin, t.x), xmax = std::max(xmax, t.x);
      ymin = std::min(ymin, t.y), ymax = std::max(ymax, t.y);
    }
    for (int port : net_terms[x].ports) {
      Terminal t = pad_pos(port_pad[port]);
      xmin = std::min(xmin, t.x), xmax = std::max(xmax, t.x);
      ymin = std::min(ymin, t.y), ymax = std::max(ymax, t.y);
    }
    if (xmax < 0) return 0;
    return (xmax - xmin) + (ymax - ymin);
  };

  std::vector<std::vector<NetIdx>> cluster_incident(num_clusters);
  std::vector<std::vector<NetIdx>> port_incident(num_ports);
  for (NetIdx x : live_nets) {
    for (int c : net_terms[x].clusters) cluster_incident[c].push_back(x);
    for (int port : net_terms[x].ports) port_incident[port].push_back(x);
  }

  double cost = 0;
  for (NetIdx x : live_nets) cost += net_cost(x);

  // --- simulated annealing -------------------------------------------------
  std::mt19937_64 rng(seed);
  int movables = num_clusters + num_ports;
  if (movables > 0 && !live_nets.empty()) {
    double temp = std::max(1.0, cost) * kInitTempFactor;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int step = 0; step < kTempSteps; ++step, temp *= kAlpha) {
      int moves = kMovesPerMovable * movables;
      for (int mv = 0; mv < moves; ++mv) {
        bool move_cluster = num_clusters > 0 &&
                            (num_ports == 0 || (rng() & 1) == 0);
        std::set<NetIdx> affected;
        double before = 0;
        if (move_cluster) {
          int c = static_cast<int>(rng() % num_clusters);
          int dst = static_cast<int>(rng() % num_tiles);
          int src = cluster_tile[c];
          if (dst == src) continue;
          int other = tile_cluster[dst];
          for (NetIdx x : cluster_incident[c]) affected.insert(x);
          if (other >= 0)
            for (NetIdx x : cluster_incident[other]) affected.insert(x);
          for (NetIdx x : affected) before += net_cost(x);
          cluster_tile[c] = dst;
          tile_cluster[dst] = c;
          tile_cluster[src] = other;
          if (other >= 0) cluster_tile[other] = src;
          double after = 0;
          for (NetIdx x : affected) after += net_cost(x);
          double delta = after - before;
          if (delta <= 0 || std::exp(-delta / temp) > unit(rng)) {
            cost += delta;
          } else {
            cluster_tile[c] = src;
            tile_cluster[src] = c;
            tile_cluster[dst] = other;
            if (other >= 0) cluster_tile[other] = dst;
          }
        } else if (num_ports > 0) {
          int port = static_cast<int>(rng() % num_ports);
          int dst = static_cast<int>(rng() % num_pads);
          int src = port_pad[port];
          if (dst == src) continue;
          int other = pad_port[dst];
          for (NetIdx x : port_incident[port]) affected.insert(x);
          if (other >= 0)
            for (NetIdx x : port_incident[other]) affected.insert(x);
          for (NetIdx x : affected) before += net_cost(x);
          port_pad[port] = dst;
          pad_port[dst] = port;
          pad_port[src] = other;
          if (other >= 0) port_pad[other] = src;
          double after = 0;
          for (NetIdx x : affected) after += net_cost(x);
          double delta = after - before;
          if (delta <= 0 || std::exp(-delta / temp) > unit(rng)) {
            cost += delta;
          } else {
            port_pad[port] = src;
            pad_port[src] = port;
            pad_port[dst] = other;
            if (other >= 0) port_pad[other] = dst;
          }
        }
      }
    }
  }

  // --- emit ---------------------------------------------------------------
  pl.unit_clb.assign(num_units, -1);
  pl.unit_slot.assign(num_units, -1);
  for (int c = 0; c < num_clusters; ++c) {
    for (size_t s = 0; s < clusters[c].size(); ++s) {
      pl.unit_clb[clusters[c][s]] = cluster_tile[c];
      pl.unit_slot[clusters[c][s]] = static_cast<int>(s);
    }
  }
  pl.input_pad.resize(n.inputs.size());
  pl.output_pad.resize(n.outputs.size());
  for (size_t i = 0; i < n.inputs.size(); ++i) pl.input_pad[i] = port_pad[i];
  for (size_t i = 0; i < n.outputs.size(); ++i)
    pl.output_pad[i] = port_pad[n.inputs.size() + i];
  pl.wirelength = cost;
  return pl;
}

}  // namespace redact
