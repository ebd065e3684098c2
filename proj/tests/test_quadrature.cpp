#include "doctest.h"

#include <cmath>
#include <numbers>

#include "collapsim/errors.hpp"
#include "collapsim/quadrature.hpp"

namespace quad = collapsim::quad;

TEST_CASE("gauss-kronrod integrates polynomials of degree 31 exactly") {
  const auto r = quad::detail::gauss_kronrod21([](double x) { return std::pow(x, 30) + x * x; }, -1.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0 / 31.0 + 2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("adaptive integration of smooth and peaked integrands") {
  const auto r = quad::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));

  const double eps = 1e-6;
  const auto peak = [&](double x) { return eps / (std::numbers::pi * (x * x + eps * eps)); };
  const double at_zero[] = {0.0};
  const auto p = quad::integrate(peak, -1.0, 1.0, {}, at_zero);
  CHECK(p.converged);
  CHECK(p.value == doctest::Approx(2.0 / std::numbers::pi * std::atan(1.0 / eps)).epsilon(1e-11));
}

TEST_CASE("integral over a reversed or empty interval") {
  CHECK(quad::integrate([](double) { return 1.0; }, 0.0, 0.0).value == 0.0);
  CHECK(quad::integrate([](double x) { return x; }, 1.0, 0.0).value == doctest::Approx(-0.5));
}

TEST_CASE("non-convergence is reported with diagnostics") {
  const auto nasty = [](double x) { return x == 0.0 ? 0.0 : std::sin(1.0 / x) / x; };
  const quad::Options tight{1e-300, 1e-15, 20};
  CHECK_FALSE(quad::integrate(nasty, 0.0, 1.0, tight).converged);
  CHECK_THROWS_AS(quad::integrate_or_throw(nasty, 0.0, 1.0, tight), collapsim::NumericalError);
}
