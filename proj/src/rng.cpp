#include "dhg/rng.hpp"

#include <cmath>

namespace dhg {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// One double with 53 random bits from two lanes; offset keeps it in (0,1].
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

inline double to_unit_halfopen(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                        const std::array<std::uint32_t, 4>& counter) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, x0, hi0, lo0);
    mulhilo(kPhiloxM1, x2, hi1, lo1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

double uniform_at(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  const auto r = philox4x32(
      seed, {stream, 0u, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)});
  return to_unit_halfopen(r[0], r[1]);
}

double normal_at(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  const std::uint64_t block = index >> 1;
  const auto r = philox4x32(
      seed, {stream, 1u, static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)});
  const double u1 = to_unit_open(r[0], r[1]);
  const double u2 = to_unit_halfopen(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  return (index & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

void normal_fill(std::uint64_t seed, std::uint32_t stream, std::uint64_t first,
                 std::uint64_t count, double* out) {
  std::uint64_t i = 0;
  // Leading odd element, if the range starts mid-pair.
  if ((first & 1u) && i < count) {
    out[i++] = normal_at(seed, stream, first);
  }
  while (i + 1 < count) {
    const std::uint64_t index = first + i;
    const std::uint64_t block = index >> 1;
    const auto r = philox4x32(
        seed,
        {stream, 1u, static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)});
    const double u1 = to_unit_open(r[0], r[1]);
    const double u2 = to_unit_halfopen(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    out[i] = radius * std::cos(angle);
    out[i + 1] = radius * std::sin(angle);
    i += 2;
  }
  if (i < count) {
    out[i] = normal_at(seed, stream, first + i);
  }
}

}  // namespace dhg
