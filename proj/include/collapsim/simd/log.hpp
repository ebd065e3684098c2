#pragma once

// Natural logarithm built only from IEEE-exact bit manipulation and
// correctly rounded + - * /, so the scalar and vector versions return
// identical bits. Valid for positive, finite, normal inputs.

#include <bit>
#include <cstdint>

namespace collapsim::simd {

inline constexpr double kLn2Hi = 0x1.62e42fefa3800p-1;
inline constexpr double kLn2Lo = 0x1.ef35793c76730p-45;
inline constexpr double kSqrt2 = 0x1.6a09e667f3bcdp+0;
inline constexpr std::uint64_t kMantissaMask = 0x000FFFFFFFFFFFFFull;
inline constexpr std::uint64_t kExponentOne = 0x3FF0000000000000ull;

// 1/(2k+1) for k = 1..11: log m = 2s + 2s z (1/3 + z/5 + ...), z = s^2.
inline constexpr double kLogSeries[11] = {1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0, 1.0 / 13.0,
                                          1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0};

inline double log_portable(double x) noexcept {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52)) - 1023.0;
  double m = std::bit_cast<double>((bits & kMantissaMask) | kExponentOne);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double z = s * s;
  double p = kLogSeries[10];
  for (int k = 9; k >= 0; --k) p = kLogSeries[k] + z * p;
  const double two_s = s + s;
  return e * kLn2Hi + (two_s + (two_s * z * p + e * kLn2Lo));
}

} // namespace collapsim::simd
