// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "redact/netlist.hpp"

namespace redact {

// BLIF subset reader: .model/.inputs/.outputs/.names/.latch/.end, cover
// lines over {0,1,-}, up to 16 inputs per .names, rising-edge latches with
// a single clock. Each .names becomes a LUT (constants become CONST cells),
// each .latch a DFF in the user_clk domain.
Netlist parse_blif(const std::string& text);
Netlist parse_blif_file(const std::string& path);

}  // namespace redact
