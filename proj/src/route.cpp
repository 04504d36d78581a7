// SPDX-License-Identifier: Apache-2.0
#include "redact/route.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace redact {

namespace {

struct SinkSpec {
  enum class Kind { ClbPin, Pad } kind;
  int clb = -1;
  int pad = -1;
};

struct NetTask {
  NetIdx net;
  bool driver_is_pad = false;
  int driver_pad = -1;
  int driver_clb = -1, driver_slot = -1;
  std::vector<SinkSpec> sinks;
};

}  // namespace

RoutingResult route(const MappedDesign& d, const Placement& p, const Fabric& f,
                    uint64_t seed, int max_iterations) {
  (void)seed;  // net order is deterministic; kept for interface stability
  const Netlist& n = d.lut_netlist;
  const FabricParams& fp = f.params;
  const int Wch = fp.channel_width, I = fp.clb_inputs();
  const int num_segs = static_cast<int>(f.segments.size());
  const int num_tracks = num_segs * Wch;

  auto node_of = [&](int seg, int t) { return seg * Wch + t; };
  auto seg_of = [&](int node) { return node / Wch; };
  auto track_of = [&](int node) { return node % Wch; };

  // Source-tap and turn adjacency tables.
  std::vector<std::vector<std::pair<int, int>>> turn_out(num_tracks);
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> slot_taps;
  std::vector<std::vector<std::pair<int, int>>> pad_taps(f.pads.size());
  for (int s = 0; s < num_segs; ++s) {
    for (int t = 0; t < Wch; ++t) {
      const auto& srcs = f.segments[s].sources[t];
      for (size_t o = 0; o < srcs.size(); ++o) {
        const TrackSource& ts = srcs[o];
        int dst = node_of(s, t);
        switch (ts.kind) {
          case TrackSource::Kind::Turn:
            turn_out[node_of(ts.from_seg, ts.from_track)].emplace_back(dst, o);
            break;
          case TrackSource::Kind::ClbOut:
            slot_taps[{ts.clb, ts.slot}].emplace_back(dst, o);
            break;
          case TrackSource::Kind::PadIn:
            pad_taps[ts.pad].emplace_back(dst, o);
            break;
        }
      }
    }
  }
  // Pins reading each segment, in pin order.
  std::vector<std::vector<std::pair<int, int>>> seg_pins(num_segs);  // (clb, q)
  for (size_t c = 0; c < f.clbs.size(); ++c)
    for (int q = 0; q < I; ++q)
      seg_pins[f.clbs[c].pins[q].seg].emplace_back(static_cast<int>(c), q);

  // --- net tasks ------------------------------------------------------------
  auto drv = n.drivers();
  std::vector<int> unit_of_net(n.nets.size(), -1);
  for (size_t u = 0; u < p.units.size(); ++u)
    unit_of_net[p.units[u].out_net] = static_cast<int>(u);

  std::vector<NetTask> tasks;
  for (NetIdx x = 0; x < static_cast<NetIdx>(n.nets.size()); ++x) {
    NetTask task;
    task.net = x;
    // Sinks: CLBs reading x from outside, plus output pads.
    std::set<int> sink_clbs;
    int driver_unit = unit_of_net[x];
    int driver_clb = driver_unit >= 0 ? p.unit_clb[driver_unit] : -1;
    for (size_t u = 0; u < p.units.size(); ++u) {
      const Cell& lut = n.cells[p.units[u].lut];
      bool reads = false;
      for (NetIdx in : lut.inputs)
        if (in == x) reads = true;
      if (reads && p.unit_clb[u] != driver_clb) sink_clbs.insert(p.unit_clb[u]);
    }
    for (int clb : sink_clbs) {
      SinkSpec s;
      s.kind = SinkSpec::Kind::ClbPin;
      s.clb = clb;
      task.sinks.push_back(s);
    }
    for (size_t i = 0; i < n.outputs.size(); ++i) {
      if (n.outputs[i] != x) continue;
      SinkSpec s;
      s.kind = SinkSpec::Kind::Pad;
      s.pad = p.output_pad[i];
      task.sinks.push_back(s);
    }
    if (task.sinks.empty()) continue;

    if (driver_unit >= 0) {
      task.driver_clb = driver_clb;
      task.driver_slot = p.unit_slot[driver_unit];
    } else {
      // Must be a primary input.
      int pos = -1;
      for (size_t i = 0; i < n.inputs.size(); ++i)
        if (n.inputs[i] == x) pos = static_cast<int>(i);
      if (pos < 0)
        throw Error("route: net '" + n.net_name(x) + "' has no routable driver");
      task.driver_is_pad = true;
      task.driver_pad = p.input_pad[pos];
      (void)drv;
    }
    tasks.push_back(std::move(task));
  }

  // --- rip-up and retry -----------------------------------------------------
  std::vector<int> fail_count(tasks.size(), 0);
  std::vector<int> track_owner(num_tracks);
  std::vector<int> pin_owner(f.clbs.size() * I);
  std::vector<int> order(tasks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  RoutingResult result;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    result.nets.clear();
    result.iterations = iter;
    std::fill(track_owner.begin(), track_owner.end(), -1);
    std::fill(pin_owner.begin(), pin_owner.end(), -1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return fail_count[a] > fail_count[b];
    });

    bool all_ok = true;
    for (int ti : order) {
      const NetTask& task = tasks[ti];
      RouteTree tree;
      tree.net = task.net;
      std::vector<int> tree_nodes;
      std::vector<SinkSpec> remaining = task.sinks;

      bool net_ok = true;
      while (!remaining.empty()) {
        // BFS over track nodes from the current tree (or the driver's taps).
        std::vector<int> prev_node(num_tracks, -3);  // -3 unvisited
        std::vector<int> prev_ord(num_tracks, -1);
        std::deque<int> queue;
        auto try_enter = [&](int nd, int from, int ord) {
          if (prev_node[nd] != -3) return;
          if (track_owner[nd] != -1 && track_owner[nd] != ti) return;
          prev_node[nd] = from;
          prev_ord[nd] = ord;
          queue.push_back(nd);
        };
        if (tree_nodes.empty()) {
          const auto& taps = task.driver_is_pad
                                 ? pad_taps[task.driver_pad]
                                 : slot_taps[{task.driver_clb, task.driver_slot}];
          for (auto [nd, ord] : taps) try_enter(nd, -2, ord);
        } else {
          for (int nd : tree_nodes) try_enter(nd, -1, -1);
        }

        int hit_node = -1;
        size_t hit_sink = 0;
        int hit_pin = -1;
        while (!queue.empty() && hit_node < 0) {
          int nd = queue.front();
          queue.pop_front();
          int seg = seg_of(nd);
          // Sink tests.
          for (size_t si = 0; si < remaining.size() && hit_node < 0; ++si) {
            const SinkSpec& sink = remaining[si];
            if (sink.kind == SinkSpec::Kind::Pad) {
              if (f.pads[sink.pad].seg == seg) {
                hit_node = nd;
                hit_sink = si;
              }
            } else {
              for (auto [clb, q] : seg_pins[seg]) {
                if (clb != sink.clb) continue;
                if (pin_owner[clb * I + q] != -1) continue;
                hit_node = nd;
                hit_sink = si;
                hit_pin = clb * I + q;
                break;
              }
            }
          }
          if (hit_node >= 0) break;
          for (auto [to, ord] : turn_out[nd]) try_enter(to, nd, ord);
        }

        if (hit_node < 0) {
          net_ok = false;
          break;
        }
        // Commit the path.
        const SinkSpec& sink = remaining[hit_sink];
        if (sink.kind == SinkSpec::Kind::Pad)
          tree.pad_taps.emplace_back(sink.pad, hit_node);
        else {
          pin_owner[hit_pin] = ti;
          tree.pin_taps.emplace_back(hit_pin, hit_node);
        }
        int nd = hit_node;
        while (nd >= 0 && prev_node[nd] != -1) {
          track_owner[nd] = ti;
          tree_nodes.push_back(nd);
          tree.hops.push_back(RouteHop{nd, prev_ord[nd]});
          int up = prev_node[nd];
          if (up == -2) break;
          nd = up;
        }
        remaining.erase(remaining.begin() + hit_sink);
      }

      if (!net_ok) {
        ++fail_count[ti];
        all_ok = false;
        continue;
      }
      result.nets.push_back(std::move(tree));
    }
    if (all_ok) return result;
  }

  // Congestion summary: per-segment demand from the last iteration.
  std::map<int, int> seg_use;
  for (int nd = 0; nd < num_tracks; ++nd)
    if (track_owner[nd] != -1) ++seg_use[seg_of(nd)];
  (void)track_of;
  std::string hot = "none";
  int worst = -1;
  for (auto [seg, use] : seg_use) {
    if (use > worst) {
      worst = use;
      const SegmentInfo& s = f.segments[seg];
      hot = std::string(s.horizontal ? "h" : "v") + "[" + std::to_string(s.i) +
            "][" + std::to_string(s.j) + "] (" + std::to_string(use) + "/" +
            std::to_string(Wch) + " tracks)";
    }
  }
  int failed = 0;
  for (int c : fail_count)
    if (c > 0) ++failed;
  throw UnroutableError("unroutable after " + std::to_string(max_iterations) +
                        " iterations; " + std::to_string(failed) +
                        " nets failed at least once; hottest segment " + hot);
}

std::vector<std::string> check_routing(const MappedDesign& d, const Placement& p,
                                       const Fabric& f, const RoutingResult& r) {
  std::vector<std::string> problems;
  const Netlist& n = d.lut_netlist;
  const int Wch = f.params.channel_width;
  const int I = f.params.clb_inputs();
  std::map<int, NetIdx> track_net, pin_net;
  for (const auto& tree : r.nets) {
    for (const auto& hop : tree.hops) {
      auto [it, fresh] = track_net.emplace(hop.track_node, tree.net);
      if (!fresh && it->second != tree.net)
        problems.push_back("track node " + std::to_string(hop.track_node) +
                           " driven by two nets");
      const auto& srcs =
          f.segments[hop.track_node / Wch].sources[hop.track_node % Wch];
      if (hop.source_ordinal < 0 ||
          hop.source_ordinal >= static_cast<int>(srcs.size()))
        problems.push_back("track node " + std::to_string(hop.track_node) +
                           " has an invalid source");
    }
    for (auto [pin, node] : tree.pin_taps) {
      auto [it, fresh] = pin_net.emplace(pin, tree.net);
      if (!fresh && it->second != tree.net)
        problems.push_back("pin " + std::to_string(pin) + " used twice");
      if (f.clbs[pin / I].pins[pin % I].seg != node / Wch)
        problems.push_back("pin " + std::to_string(pin) +
                           " fed from a non-adjacent segment");
      if (!track_net.count(node))
        problems.push_back("pin " + std::to_string(pin) + " fed by unused track");
    }
    for (auto [pad, node] : tree.pad_taps) {
      if (f.pads[pad].seg != node / Wch)
        problems.push_back("pad " + std::to_string(pad) +
                           " fed from a non-adjacent segment");
      if (!track_net.count(node) || track_net[node] != tree.net)
        problems.push_back("pad " + std::to_string(pad) + " fed by wrong track");
    }
  }

  // Connectivity: walk each tree from its driver taps and confirm all hops
  // and sinks are reachable through chosen sources.
  for (const auto& tree : r.nets) {
    std::set<int> nodes;
    for (const auto& hop : tree.hops) nodes.insert(hop.track_node);
    for (const auto& hop : tree.hops) {
      const TrackSource& src = f.segments[hop.track_node / Wch]
                                   .sources[hop.track_node % Wch][hop.source_ordinal];
      if (src.kind == TrackSource::Kind::Turn) {
        int from = src.from_seg * Wch + src.from_track;
        if (!nodes.count(from))
          problems.push_back("net '" + n.net_name(tree.net) +
                             "': hop enters from a track outside the tree");
      }
    }
  }
  (void)d;
  (void)p;
  return problems;
}

}  // namespace redact
