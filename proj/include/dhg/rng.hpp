#pragma once

#include <array>
#include <cstdint>

namespace dhg {

// Counter-based random numbers (Philox4x32-10). A draw is addressed by
// (seed, stream, index); equal addresses give equal bits in every run, so
// sample m of a batch never depends on batch composition or thread count.
//
// Normal deviates use Box-Muller on one Philox block: lanes 0..1 form
// u1 in (0,1], lanes 2..3 form u2 in [0,1), and the block at counter
// index/2 yields the pair
//   z_even = sqrt(-2 ln u1) cos(2 pi u2),  z_odd = sqrt(-2 ln u1) sin(2 pi u2).

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                        const std::array<std::uint32_t, 4>& counter);

double uniform_at(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);
double normal_at(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

// Fills out[0..count) with normals at consecutive indices [first, first+count).
void normal_fill(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                 std::uint64_t count, double* out);

// Stream ids. Fixed so checkpoints stay replayable across versions.
namespace streams {
inline constexpr std::uint32_t kNetInit = 1;
inline constexpr std::uint32_t kCriticBatch = 2;
inline constexpr std::uint32_t kActorBatch = 3;
inline constexpr std::uint32_t kHoldout = 4;
inline constexpr std::uint32_t kMetrics = 5;
inline constexpr std::uint32_t kFdPaths = 6;
inline constexpr std::uint32_t kStationary = 7;
inline constexpr std::uint32_t kMoment = 8;
inline constexpr std::uint32_t kSample = 9;
}  // namespace streams

}  // namespace dhg
