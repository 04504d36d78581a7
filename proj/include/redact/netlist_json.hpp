// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "redact/netlist.hpp"

namespace redact {

// Netlist interchange format: a JSON object with fixed key order
// {name, inputs, outputs, nets, cells}; see docs/formats.md. Writing is
// deterministic (byte-identical for equal netlists); reading validates
// the schema and netlist integrity.
std::string write_netlist(const Netlist& n);
Netlist read_netlist(const std::string& text);

void write_netlist_file(const Netlist& n, const std::string& path);
Netlist read_netlist_file(const std::string& path);

}  // namespace redact
