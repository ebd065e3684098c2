#include "collapsim/collapse.hpp"

#include <algorithm>
#include <cmath>

#include "collapsim/errors.hpp"

namespace collapsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

} // namespace

StateAmplitudes StateAmplitudes::from_alpha2(double alpha2) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) {
    throw ConfigError("alpha2 must satisfy 0 < alpha2 < 1 (both amplitudes nonzero), got " + std::to_string(alpha2));
  }
  return {std::sqrt(alpha2), std::sqrt(1.0 - alpha2), alpha2};
}

StateAmplitudes StateAmplitudes::from_alpha(std::complex<double> alpha) {
  const double a2 = std::norm(alpha);
  if (!(a2 > 0.0 && a2 < 1.0)) {
    throw ConfigError("|alpha| must satisfy 0 < |alpha| < 1, got " + std::to_string(std::sqrt(a2)));
  }
  return {alpha, std::sqrt(1.0 - a2), a2};
}

StateAmplitudes StateAmplitudes::swapped() const { return {beta_, alpha_, 1.0 - alpha2_}; }

double DecayShape::operator()(double x) const noexcept {
  x = std::clamp(x, 0.0, 1.0);
  if (kind == Kind::Power) return std::pow(1.0 - x, parameter);
  const double r = parameter;
  if (r == 0.0) return 1.0 - x;
  // (e^{-r x} - e^{-r}) / (1 - e^{-r}) in expm1 form, exact at both ends.
  const double tail = std::expm1(-r);
  return (std::expm1(-r * x) - tail) / (-tail);
}

void DecayShape::validate() const {
  if (!std::isfinite(parameter)) throw ConfigError("decay shape parameter must be finite");
  if (kind == Kind::Power && !(parameter > 0.0)) throw ConfigError("decay exponent must be > 0");
  if (kind == Kind::Exponential && std::abs(parameter) > 700.0) {
    throw ConfigError("decay rate (units of 1/delta_t) must satisfy |rate| <= 700");
  }
}

std::string_view family_name(const DecayFamily& fam) noexcept {
  return std::visit(overloaded{
                        [](const family::TwoShapeExponential&) { return std::string_view{"two_shape_exponential"}; },
                        [](const family::TwoShapeLinear&) { return std::string_view{"two_shape_linear"}; },
                        [](const family::SingleShapeCovariant&) { return std::string_view{"single_shape_covariant"}; },
                        [](const family::EffectiveSymmetric&) { return std::string_view{"effective_symmetric"}; },
                    },
                    fam);
}

RouteKinematics RouteKinematics::make(const DecayFamily& fam, const StateAmplitudes& state, double delta_t) {
  if (!std::isfinite(delta_t) || delta_t < 0.0) throw ConfigError("delta_t must be finite and >= 0");
  const auto [s1, s2] = std::visit(
      overloaded{
          [](const family::TwoShapeExponential& f) {
            return std::pair{DecayShape::exponential(f.rate1), DecayShape::exponential(f.rate2)};
          },
          [](const family::TwoShapeLinear& f) {
            return std::pair{DecayShape::power(f.exponent1), DecayShape::power(f.exponent2)};
          },
          [](const family::SingleShapeCovariant& f) {
            return std::pair{DecayShape::exponential(f.rate), DecayShape::exponential(f.rate)};
          },
          [](const family::EffectiveSymmetric& f) {
            if (!f.calibrated_rate1) {
              throw ConfigError("effective_symmetric kinematics need a calibrated route-1 rate; "
                                "build them with analytics::resolve_kinematics");
            }
            return std::pair{DecayShape::exponential(*f.calibrated_rate1), DecayShape::exponential(f.rate2)};
          },
      },
      fam);
  s1.validate();
  s2.validate();
  return {fam, delta_t, state.alpha_abs(), state.beta_abs(), s1, s2};
}

double RouteKinematics::doomed_unchecked(Route r, double tau) const noexcept {
  const double x = delta_t_ > 0.0 ? tau / delta_t_ : 0.0;
  return r == Route::One ? beta_abs_ * shape1_(x) : alpha_abs_ * shape2_(x);
}

double RouteKinematics::doomed_squared_unchecked(Route r, double tau) const noexcept {
  const double d = doomed_unchecked(r, tau);
  return d * d;
}

namespace {

void check_tau(const RouteKinematics& kin, double tau) {
  if (!(tau >= 0.0 && tau <= kin.delta_t())) {
    throw DomainError("tau must lie in [0, delta_t] = [0, " + std::to_string(kin.delta_t()) + "], got " +
                      std::to_string(tau));
  }
}

} // namespace

double doomed_amplitude(const RouteKinematics& kin, Route route, double tau) {
  check_tau(kin, tau);
  return kin.doomed_unchecked(route, tau);
}

double survivor_amplitude(const RouteKinematics& kin, Route route, double tau) {
  check_tau(kin, tau);
  return std::sqrt(1.0 - kin.doomed_squared_unchecked(route, tau));
}

double conditional_plus_minus_unchecked(const RouteKinematics& kin, double alpha2, double tau) noexcept {
  const double a1_sq = 1.0 - kin.doomed_squared_unchecked(Route::One, tau);
  const double a2_sq = kin.doomed_squared_unchecked(Route::Two, tau);
  return alpha2 * a1_sq + (1.0 - alpha2) * a2_sq;
}

double conditional_plus_minus_prob(const RouteKinematics& kin, const StateAmplitudes& state, double y) {
  const double tau = std::abs(y);
  if (!(tau < kin.delta_t())) {
    throw DomainError("|y| must be < delta_t for an interrupted reduction; use the completed-collapse branch");
  }
  return conditional_plus_minus_unchecked(kin, state.alpha2(), tau);
}

Route sample_route(const StateAmplitudes& state, rng::CounterStream& stream) {
  return stream.uniform() < state.alpha2() ? Route::One : Route::Two;
}

} // namespace collapsim
