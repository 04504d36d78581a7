// SPDX-License-Identifier: Apache-2.0
#include "redact/fit.hpp"

#include <cmath>
#include <fmt/format.h>

namespace redact {

std::string FitReport::csv_header() {
  return "module,fabric,io_utilization_pct,clb_utilization_pct,"
         "lut_utilization_pct,bitstream_bits";
}

std::string FitReport::csv_row() const {
  return fmt::format("{},{}x{},{:.1f},{:.1f},{:.1f},{}", module, width, width,
                     io_utilization, clb_utilization, lut_utilization,
                     bitstream_bits);
}

std::string FitReport::to_json() const {
  return fmt::format(
      "{{\"module\": \"{}\", \"fabric\": \"{}x{}\", "
      "\"io_utilization_pct\": {:.3f}, \"clb_utilization_pct\": {:.3f}, "
      "\"lut_utilization_pct\": {:.3f}, \"bitstream_bits\": {}, "
      "\"lut_count\": {}, \"dff_count\": {}}}",
      module, width, width, io_utilization, clb_utilization, lut_utilization,
      bitstream_bits, lut_count, dff_count);
}

int fit_lower_bound(int pins, int luts, int dffs, const FabricParams& arch) {
  int w_io = (pins + 4 * arch.pads_per_io_tile - 1) / (4 * arch.pads_per_io_tile);
  int w_lut = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(luts) / arch.luts_per_clb)));
  int w_dff = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(dffs) / arch.luts_per_clb)));
  return std::max({1, w_io, w_lut, w_dff});
}

PortMap fabric_port_map(const Netlist& module, const MappedDesign& mapped,
                        const Placement& placement, const Fabric& fabric) {
  PortMap pm;
  const Netlist& m = mapped.lut_netlist;
  for (size_t i = 0; i < m.inputs.size(); ++i)
    pm.in_map.emplace_back(m.net_name(m.inputs[i]),
                           "pad_in_" + std::to_string(placement.input_pad[i]));
  for (size_t i = 0; i < m.outputs.size(); ++i)
    pm.out_map.emplace_back(m.net_name(m.outputs[i]),
                            "pad_out_" + std::to_string(placement.output_pad[i]));

  // State correspondence: module DFF (by output net) -> fabric slot FF.
  for (size_t u = 0; u < placement.units.size(); ++u) {
    if (placement.units[u].dff < 0) continue;
    const Cell& dff = m.cells[placement.units[u].dff];
    const ClbInfo& ci = fabric.clbs[placement.unit_clb[u]];
    std::string ff_net = "clb_" + std::to_string(ci.x) + "_" +
                         std::to_string(ci.y) + "_l" +
                         std::to_string(placement.unit_slot[u]) + "_q";
    pm.in_map.emplace_back(m.net_name(dff.output), ff_net);
    pm.out_map.emplace_back("next_" + m.net_name(dff.output), "next_" + ff_net);
  }
  (void)module;
  return pm;
}

EquivalenceReport verify_configuration(const Netlist& module, const PortMap& pm,
                                       const Netlist& configured_fabric,
                                       int exhaustive_limit, int n_random,
                                       uint64_t seed) {
  Netlist a = scan_cut(module);
  Netlist b = scan_cut(configured_fabric);
  return check_equivalence(a, b, pm, exhaustive_limit, n_random, seed,
                           SimMode::Acyclic, SimMode::FixedPoint);
}

FitResult fit_search(const Netlist& module, const FabricParams& arch,
                     uint64_t seed, int max_width) {
  arch.validate();
  MappedDesign mapped = tech_map(module, arch.lut_inputs);
  int pins = mapped.num_inputs + mapped.num_outputs;
  int w0 = fit_lower_bound(pins, mapped.lut_count, mapped.dff_count, arch);

  std::vector<FitAttempt> attempts;
  for (int w = w0; w <= max_width; ++w) {
    FabricParams params = arch;
    params.width = w;
    Fabric fabric = generate_fabric(params);
    try {
      Placement placement = pack_place(mapped, fabric, seed);
      RoutingResult routing = route(mapped, placement, fabric, seed);
      auto problems = check_routing(mapped, placement, fabric, routing);
      if (!problems.empty())
        throw Error("fit_search: routing checker: " + problems[0]);
      Bitstream bits = emit_bitstream(mapped, placement, routing, fabric);

      PortMap pm = fabric_port_map(module, mapped, placement, fabric);
      Netlist configured = load_bitstream(fabric, bits, LoadMethod::Direct);
      auto equiv = verify_configuration(module, pm, configured);
      if (!equiv.equivalent)
        throw Error("fit_search: configured fabric diverges from module: " +
                    equiv.counterexample);

      std::set<int> used_clbs;
      for (int c : placement.unit_clb) used_clbs.insert(c);
      FitReport rep;
      rep.module = module.name;
      rep.width = w;
      rep.io_utilization = 100.0 * pins / (4.0 * w * arch.pads_per_io_tile);
      rep.clb_utilization = 100.0 * used_clbs.size() / (w * w);
      rep.lut_utilization =
          100.0 * mapped.lut_count / (w * w * arch.luts_per_clb);
      rep.bitstream_bits = fabric.num_bits();
      rep.lut_count = mapped.lut_count;
      rep.dff_count = mapped.dff_count;

      attempts.push_back(FitAttempt{w, true, ""});
      FitResult res;
      res.fabric = std::move(fabric);
      res.report = std::move(rep);
      res.bitstream = std::move(bits);
      res.mapped = std::move(mapped);
      res.placement = std::move(placement);
      res.routing = std::move(routing);
      res.attempts = std::move(attempts);
      res.port_map = std::move(pm);
      return res;
    } catch (const CapacityError& e) {
      attempts.push_back(FitAttempt{w, false, std::string("capacity: ") + e.what()});
    } catch (const UnroutableError& e) {
      attempts.push_back(FitAttempt{w, false, std::string("unroutable: ") + e.what()});
    }
  }
  std::string log;
  for (const auto& a : attempts)
    log += "\n  " + std::to_string(a.width) + "x" + std::to_string(a.width) +
           ": " + a.failure;
  throw GiveUpError("no fabric up to " + std::to_string(max_width) + "x" +
                    std::to_string(max_width) + " fits module '" + module.name +
                    "'" + log);
}

}  // namespace redact
