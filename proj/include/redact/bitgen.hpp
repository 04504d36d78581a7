// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "redact/route.hpp"

namespace redact {

/// Translates placement + routing into configuration bits per the fabric's
/// bit map. Unused elements keep defaults (zero / input direction), so the
/// result is fully specified.
Bitstream emit_bitstream(const MappedDesign& d, const Placement& p,
                         const RoutingResult& r, const Fabric& f);

}  // namespace redact
