// Shared test fixtures: small BLIF circuits and independent arithmetic
// oracles used to cross-check simulation, mapping and attacks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fixtures {

// 2-bit adder: s = a + b, 4 inputs (a0 a1 b0 b1), 3 outputs (s0 s1 s2).
inline const char* kAdd2Blif = R"(
.model add2
.inputs a0 a1 b0 b1
.outputs s0 s1 s2
.names a0 b0 s0
01 1
10 1
.names a0 b0 c1
11 1
.names a1 b1 c1 s1
100 1
010 1
001 1
111 1
.names a1 b1 c1 s2
11- 1
1-1 1
-11 1
.end
)";

// 1-bit full-adder without carry-in: 2 inputs, sum and carry.
inline const char* kAdd1Blif = R"(
.model add1
.inputs a b
.outputs s c
.names a b s
01 1
10 1
.names a b c
11 1
.end
)";

// 2-bit multiplier: p = a * b, 4 inputs, 4 outputs.
inline const char* kMul2Blif = R"(
.model mul2
.inputs a0 a1 b0 b1
.outputs p0 p1 p2 p3
.names a0 b0 p0
11 1
.names a0 b1 x01
11 1
.names a1 b0 x10
11 1
.names a1 b1 x11
11 1
.names x01 x10 p1
01 1
10 1
.names x01 x10 c1
11 1
.names x11 c1 p2
01 1
10 1
.names x11 c1 p3
11 1
.end
)";

// Independent arithmetic oracles. Input bit i of `a`/`b` is the i-th input
// port; results are full-width integers.
inline unsigned add_oracle(unsigned a, unsigned b) { return a + b; }
inline unsigned mul_oracle(unsigned a, unsigned b) { return a * b; }

// Two cross-coupled inverters: no fixed point from all-zero.
inline const char* kNotRingBlif = R"(
.model notring
.inputs
.outputs x
.names y x
0 1
.names x y
0 1
.end
)";

// 3-stage shift register clocked by user_clk.
inline const char* kShift3Blif = R"(
.model shift3
.inputs din
.outputs q2
.latch din q0 re clk 0
.latch q0 q1 re clk 0
.latch q1 q2 re clk 0
.end
)";

}  // namespace fixtures
