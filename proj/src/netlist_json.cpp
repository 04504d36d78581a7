// SPDX-License-Identifier: Apache-2.0
#include "redact/netlist_json.hpp"

#include <fstream>
#include <json.hpp>

namespace redact {

using ordered_json = nlohmann::ordered_json;

namespace detail {

ordered_json netlist_to_json(const Netlist& n) {
  ordered_json j;
  j["name"] = n.name;
  auto names = [&](const std::vector<NetIdx>& v) {
    ordered_json arr = ordered_json::array();
    for (NetIdx i : v) arr.push_back(n.net_name(i));
    return arr;
  };
  j["inputs"] = names(n.inputs);
  j["outputs"] = names(n.outputs);
  ordered_json nets = ordered_json::array();
  for (const auto& net : n.nets) nets.push_back(net.name);
  j["nets"] = std::move(nets);
  ordered_json cells = ordered_json::array();
  for (const auto& c : n.cells) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = cell_kind_name(c.kind);
    jc["inputs"] = names(c.inputs);
    jc["output"] = n.net_name(c.output);
    if (c.kind == CellKind::Lut) {
      std::string tt(c.truth.size(), '0');
      for (size_t i = 0; i < c.truth.size(); ++i)
        if (c.truth[i]) tt[i] = '1';
      jc["truth"] = tt;
    }
    if (c.kind == CellKind::Dff) {
      jc["clock"] = c.clock;
      jc["init"] = static_cast<int>(c.init);
    }
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  return j;
}

Netlist netlist_from_json(const ordered_json& j) {
  if (!j.is_object()) throw SchemaError("netlist: expected an object");
  for (const char* key : {"name", "inputs", "outputs", "nets", "cells"})
    if (!j.contains(key))
      throw SchemaError(std::string("netlist: missing key '") + key + "'");

  Netlist n;
  n.name = j.at("name").get<std::string>();
  for (const auto& s : j.at("nets")) n.add_net(s.get<std::string>());
  if (n.nets.size() != j.at("nets").size())
    throw SchemaError("netlist: duplicate net id");
  for (const auto& s : j.at("inputs")) {
    NetIdx idx = n.find_net(s.get<std::string>());
    if (idx == kNoNet)
      throw SchemaError("netlist: input references unknown net");
    n.inputs.push_back(idx);
  }
  for (const auto& s : j.at("outputs")) {
    NetIdx idx = n.find_net(s.get<std::string>());
    if (idx == kNoNet)
      throw SchemaError("netlist: output references unknown net");
    n.outputs.push_back(idx);
  }
  for (const auto& jc : j.at("cells")) {
    Cell c;
    c.name = jc.at("name").get<std::string>();
    c.kind = cell_kind_from_name(jc.at("kind").get<std::string>());
    for (const auto& s : jc.at("inputs")) {
      NetIdx idx = n.find_net(s.get<std::string>());
      if (idx == kNoNet)
        throw SchemaError("netlist: cell '" + c.name + "' input references unknown net");
      c.inputs.push_back(idx);
    }
    NetIdx out = n.find_net(jc.at("output").get<std::string>());
    if (out == kNoNet)
      throw SchemaError("netlist: cell '" + c.name + "' output references unknown net");
    c.output = out;
    if (c.kind == CellKind::Lut) {
      std::string tt = jc.at("truth").get<std::string>();
      if (tt.size() != (size_t{1} << c.inputs.size()))
        throw SchemaError("netlist: cell '" + c.name + "' truth table length");
      for (char ch : tt) {
        if (ch != '0' && ch != '1')
          throw SchemaError("netlist: cell '" + c.name + "' truth table characters");
        c.truth.push_back(ch == '1');
      }
    }
    if (c.kind == CellKind::Dff) {
      c.clock = jc.at("clock").get<std::string>();
      int init = jc.at("init").get<int>();
      if (init != 0 && init != 1)
        throw SchemaError("netlist: cell '" + c.name + "' init must be 0/1");
      c.init = static_cast<uint8_t>(init);
    }
    n.add_cell(std::move(c));
  }

  auto violations = check_integrity(n);
  if (!violations.empty())
    throw SchemaError("netlist '" + n.name + "': " +
                      violation_kind_name(violations[0].kind) + " on '" +
                      violations[0].subject + "': " + violations[0].message);
  return n;
}

}  // namespace detail

std::string write_netlist(const Netlist& n) {
  require_integrity(n, "write_netlist");
  return detail::netlist_to_json(n).dump(1) + "\n";
}

Netlist read_netlist(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("netlist: invalid JSON: ") + e.what());
  }
  return detail::netlist_from_json(j);
}

void write_netlist_file(const Netlist& n, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << write_netlist(n);
}

Netlist read_netlist_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return read_netlist(text);
}

}  // namespace redact
