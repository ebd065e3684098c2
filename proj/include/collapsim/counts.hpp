#pragma once

#include <cstdint>

namespace collapsim {

/// Outcome tallies of a batch. Tables from disjoint trial ranges merge by
/// field-wise addition.
struct CountTable {
  std::uint64_t n_pm = 0;          ///< left +, right -
  std::uint64_t n_mp = 0;          ///< left -, right +
  std::uint64_t n_nontrivial = 0;  ///< second hit within delta_t of the first
  std::uint64_t n_route1 = 0;      ///< among non-trivial trials
  std::uint64_t n_route2 = 0;
  std::uint64_t n_left_first = 0;  ///< non-trivial trials in which the left detector fired first
  std::uint64_t n_total = 0;

  CountTable& operator+=(const CountTable& other) noexcept {
    n_pm += other.n_pm;
    n_mp += other.n_mp;
    n_nontrivial += other.n_nontrivial;
    n_route1 += other.n_route1;
    n_route2 += other.n_route2;
    n_left_first += other.n_left_first;
    n_total += other.n_total;
    return *this;
  }

  friend CountTable operator+(CountTable a, const CountTable& b) noexcept { return a += b; }
  bool operator==(const CountTable&) const = default;

  /// n_pm + n_mp == n_total and n_route1 + n_route2 == n_nontrivial.
  bool consistent() const noexcept {
    return n_pm + n_mp == n_total && n_route1 + n_route2 == n_nontrivial && n_left_first <= n_nontrivial &&
           n_nontrivial <= n_total;
  }
};

} // namespace collapsim
