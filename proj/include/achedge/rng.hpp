#pragma once

// Counter-based normal variates: every draw is a pure function of
// (seed, stream, index), so paths can be generated in any order on any thread.

#include <array>
#include <cstdint>

namespace achedge {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Standard normal via Box-Muller (cosine branch) on one Philox block.
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace achedge
