#include "doctest.h"

#include <cmath>

#include "collapsim/rng.hpp"
#include "collapsim/simd/log.hpp"

using collapsim::simd::log_portable;

TEST_CASE("log_portable agrees with std::log to a few ulp") {
  for (double x : {1e-15, 1e-300, 0.1, 0.5, 0.7071067811865476, 1.0, 1.0000001, 1.5, 2.0, 3.0, 1e15, 1e300}) {
    CAPTURE(x);
    const double want = std::log(x);
    CHECK(std::abs(log_portable(x) - want) <= 4e-16 * std::max(1.0, std::abs(want)));
  }
  CHECK(log_portable(1.0) == 0.0);
}

TEST_CASE("log_portable over random arguments") {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto u = collapsim::rng::trial_uniforms(5, i, collapsim::rng::TrialStream::HitTimes);
    const double x = std::ldexp(0.5 + u.first, static_cast<int>(u.second * 200.0) - 100);
    const double want = std::log(x);
    worst = std::max(worst, std::abs(log_portable(x) - want) / std::max(1.0, std::abs(want)));
  }
  CHECK(worst < 4e-16);
}
