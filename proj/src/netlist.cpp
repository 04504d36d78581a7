// SPDX-License-Identifier: Apache-2.0
#include "redact/netlist.hpp"

#include <algorithm>

namespace redact {

namespace {
struct KindName {
  CellKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {
    {CellKind::InputBuf, "INPUT_BUF"}, {CellKind::OutputBuf, "OUTPUT_BUF"},
    {CellKind::Lut, "LUT"},            {CellKind::Mux2, "MUX2"},
    {CellKind::Dff, "DFF"},            {CellKind::Const0, "CONST0"},
    {CellKind::Const1, "CONST1"},      {CellKind::Not, "NOT"},
    {CellKind::And2, "AND2"},          {CellKind::Or2, "OR2"},
    {CellKind::Xor2, "XOR2"},
};
}  // namespace

const char* cell_kind_name(CellKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "?";
}

CellKind cell_kind_from_name(const std::string& s) {
  for (const auto& kn : kKindNames)
    if (s == kn.name) return kn.kind;
  throw SchemaError("unknown cell kind '" + s + "'");
}

NetIdx Netlist::add_net(const std::string& n) {
  auto it = net_index_.find(n);
  if (it != net_index_.end()) return it->second;
  NetIdx idx = static_cast<NetIdx>(nets.size());
  nets.push_back(Net{n});
  net_index_.emplace(n, idx);
  return idx;
}

NetIdx Netlist::find_net(const std::string& n) const {
  auto it = net_index_.find(n);
  return it == net_index_.end() ? kNoNet : it->second;
}

NetIdx Netlist::require_net(const std::string& n) const {
  NetIdx idx = find_net(n);
  if (idx == kNoNet) throw Error("unknown net '" + n + "'");
  return idx;
}

CellIdx Netlist::add_cell(Cell c) {
  CellIdx idx = static_cast<CellIdx>(cells.size());
  cell_index_.emplace(c.name, idx);
  cells.push_back(std::move(c));
  return idx;
}

CellIdx Netlist::find_cell(const std::string& n) const {
  auto it = cell_index_.find(n);
  return it == cell_index_.end() ? -1 : it->second;
}

NetIdx Netlist::add_input(const std::string& port) {
  NetIdx n = add_net(port);
  inputs.push_back(n);
  return n;
}

void Netlist::add_output(NetIdx n) { outputs.push_back(n); }

std::set<std::string> Netlist::clock_domains() const {
  std::set<std::string> doms{kUserClk, kProgClk};
  for (const auto& c : cells)
    if (c.kind == CellKind::Dff) doms.insert(c.clock);
  return doms;
}

std::vector<int> Netlist::drivers() const {
  std::vector<int> drv(nets.size(), kDriverNone);
  for (NetIdx n : inputs)
    if (n >= 0 && n < static_cast<NetIdx>(nets.size())) drv[n] = kDriverPi;
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    NetIdx o = cells[ci].output;
    if (o >= 0 && o < static_cast<NetIdx>(nets.size()) && drv[o] == kDriverNone)
      drv[o] = static_cast<int>(ci);
  }
  return drv;
}

std::vector<std::vector<CellIdx>> Netlist::consumers() const {
  std::vector<std::vector<CellIdx>> cons(nets.size());
  for (size_t ci = 0; ci < cells.size(); ++ci)
    for (NetIdx in : cells[ci].inputs)
      if (in >= 0 && in < static_cast<NetIdx>(nets.size()))
        cons[in].push_back(static_cast<CellIdx>(ci));
  return cons;
}

const char* violation_kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::MultipleDriver: return "MultipleDriver";
    case Violation::Kind::NoDriver: return "NoDriver";
    case Violation::Kind::DanglingInput: return "DanglingInput";
    case Violation::Kind::UnknownNet: return "UnknownNet";
    case Violation::Kind::DuplicateId: return "DuplicateId";
    case Violation::Kind::BadCell: return "BadCell";
  }
  return "?";
}

static int expected_arity(CellKind k) {
  switch (k) {
    case CellKind::InputBuf:
    case CellKind::OutputBuf:
    case CellKind::Not:
    case CellKind::Dff: return 1;
    case CellKind::And2:
    case CellKind::Or2:
    case CellKind::Xor2: return 2;
    case CellKind::Mux2: return 3;
    case CellKind::Const0:
    case CellKind::Const1: return 0;
    case CellKind::Lut: return -1;  // variable
  }
  return -1;
}

std::vector<Violation> check_integrity(const Netlist& n) {
  std::vector<Violation> out;
  auto add = [&](Violation::Kind k, const std::string& subj, std::string msg) {
    out.push_back(Violation{k, subj, std::move(msg)});
  };

  const NetIdx num_nets = static_cast<NetIdx>(n.nets.size());

  // Unique identifiers.
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& net : n.nets)
      if (++seen[net.name] == 2)
        add(Violation::Kind::DuplicateId, net.name, "net id appears twice");
    seen.clear();
    for (const auto& c : n.cells)
      if (++seen[c.name] == 2)
        add(Violation::Kind::DuplicateId, c.name, "cell id appears twice");
  }

  // Driver counts: exactly one per net.
  {
    std::vector<int> count(n.nets.size(), 0);
    for (NetIdx pi : n.inputs)
      if (pi >= 0 && pi < num_nets) ++count[pi];
    for (const auto& c : n.cells)
      if (c.output >= 0 && c.output < num_nets) ++count[c.output];
    for (NetIdx i = 0; i < num_nets; ++i) {
      if (count[i] == 0)
        add(Violation::Kind::NoDriver, n.nets[i].name, "net has no driver");
      else if (count[i] > 1)
        add(Violation::Kind::MultipleDriver, n.nets[i].name,
            "net has " + std::to_string(count[i]) + " drivers");
    }
  }

  for (NetIdx po : n.outputs)
    if (po < 0 || po >= num_nets)
      add(Violation::Kind::UnknownNet, "<output>",
          "primary output references missing net");

  for (const auto& c : n.cells) {
    if (c.output < 0 || c.output >= num_nets)
      add(Violation::Kind::DanglingInput, c.name, "cell output unconnected");
    for (NetIdx in : c.inputs)
      if (in < 0 || in >= num_nets)
        add(Violation::Kind::DanglingInput, c.name, "cell input pin unconnected");

    int arity = expected_arity(c.kind);
    if (arity >= 0 && static_cast<int>(c.inputs.size()) != arity)
      add(Violation::Kind::BadCell, c.name,
          std::string(cell_kind_name(c.kind)) + " expects " +
              std::to_string(arity) + " inputs, has " +
              std::to_string(c.inputs.size()));
    if (c.kind == CellKind::Lut) {
      size_t want = size_t{1} << c.inputs.size();
      if (c.truth.size() != want)
        add(Violation::Kind::BadCell, c.name,
            "LUT truth table has " + std::to_string(c.truth.size()) +
                " entries, expected " + std::to_string(want));
    }
    if (c.kind == CellKind::Dff && c.clock.empty())
      add(Violation::Kind::BadCell, c.name, "DFF without clock domain");
  }
  return out;
}

Netlist scan_cut(const Netlist& n, const std::string& clock) {
  Netlist out;
  out.name = n.name + "_scancut";
  for (const auto& net : n.nets) out.add_net(net.name);
  for (NetIdx pi : n.inputs) out.inputs.push_back(pi);
  std::vector<std::pair<NetIdx, NetIdx>> next_ports;  // (po net, data net)
  for (const auto& c : n.cells) {
    if (c.kind != CellKind::Dff || c.clock != clock) {
      out.add_cell(c);
      continue;
    }
    // Output net becomes a pseudo primary input.
    out.inputs.push_back(c.output);
    NetIdx next = out.add_net("next_" + n.net_name(c.output));
    out.add_cell(Cell{"g_next_" + n.net_name(c.output), CellKind::OutputBuf,
                      {c.inputs[0]}, next, {}, "", 0});
    next_ports.emplace_back(next, c.inputs[0]);
  }
  for (NetIdx po : n.outputs) out.add_output(po);
  for (auto& [next, data] : next_ports) out.add_output(next);
  return out;
}

void require_integrity(const Netlist& n, const std::string& context) {
  auto v = check_integrity(n);
  if (v.empty()) return;
  std::string msg = context + ": netlist integrity failed:";
  size_t shown = std::min<size_t>(v.size(), 5);
  for (size_t i = 0; i < shown; ++i)
    msg += "\n  [" + std::string(violation_kind_name(v[i].kind)) + "] " +
           v[i].subject + ": " + v[i].message;
  if (v.size() > shown)
    msg += "\n  (+" + std::to_string(v.size() - shown) + " more)";
  throw Error(msg);
}

}  // namespace redact
