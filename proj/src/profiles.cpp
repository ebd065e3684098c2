#include "collapsim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "collapsim/errors.hpp"

namespace collapsim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

// Logistic form of the sech^2 CDF: (1 + tanh x)/2 == 1/(1 + exp(-2x)).
double sech2_lower(double x) noexcept { return 1.0 / (1.0 + std::exp(-2.0 * x)); }
double sech2_upper(double x) noexcept { return 1.0 / (1.0 + std::exp(2.0 * x)); }

double gauss_lower(double z) noexcept { return 0.5 * std::erfc(-z / kSqrt2); }
double gauss_upper(double z) noexcept { return 0.5 * std::erfc(z / kSqrt2); }

double sech2_mass(double a, double b) noexcept {
  const double d = b - a;
  if (d <= 2.0) {
    // tanh b - tanh a = sinh(b - a) / (cosh a cosh b), with both cosh factors
    // written as exp(|x|)(1 + exp(-2|x|))/2 so nothing overflows.
    const double ea = std::exp(-2.0 * std::abs(a));
    const double eb = std::exp(-2.0 * std::abs(b));
    return 2.0 * std::sinh(d) * std::exp(-(std::abs(a) + std::abs(b))) / ((1.0 + ea) * (1.0 + eb));
  }
  if (a >= 0.0) return sech2_upper(a) - sech2_upper(b);
  if (b <= 0.0) return sech2_lower(b) - sech2_lower(a);
  return 1.0 - (sech2_lower(a) + sech2_upper(b));
}

double gauss_mass(double a, double b) noexcept {
  if (a >= 0.0) return gauss_upper(a) - gauss_upper(b);
  if (b <= 0.0) return gauss_lower(b) - gauss_lower(a);
  return 1.0 - (gauss_lower(a) + gauss_upper(b));
}

} // namespace

std::string_view to_string(ProfileShape shape) noexcept {
  switch (shape) {
  case ProfileShape::Sech2:
    return "sech2";
  case ProfileShape::Gaussian:
    return "gaussian";
  }
  return "sech2";
}

ProfileShape profile_shape_from_string(std::string_view name) {
  if (name == "sech2") return ProfileShape::Sech2;
  if (name == "gaussian") return ProfileShape::Gaussian;
  throw ConfigError("unknown profile shape '" + std::string(name) + "' (expected sech2 or gaussian)");
}

void PulseProfile::validate() const {
  if (!std::isfinite(sigma_t) || sigma_t <= 0.0) {
    throw ConfigError("sigma_t must be finite and > 0, got " + std::to_string(sigma_t));
  }
  if (!std::isfinite(center)) throw ConfigError("profile center must be finite");
}

double pdf_at(const PulseProfile& profile, double t) noexcept {
  const double x = (t - profile.center) / profile.sigma_t;
  switch (profile.shape) {
  case ProfileShape::Sech2: {
    // sech^2 x = 4 e^{-2|x|} / (1 + e^{-2|x|})^2, finite for any x.
    const double e = std::exp(-2.0 * std::abs(x));
    return 2.0 * e / ((1.0 + e) * (1.0 + e)) / profile.sigma_t;
  }
  case ProfileShape::Gaussian:
    return kInvSqrt2Pi * std::exp(-0.5 * x * x) / profile.sigma_t;
  }
  return 0.0;
}

double cdf_at(const PulseProfile& profile, double t) noexcept {
  const double x = (t - profile.center) / profile.sigma_t;
  return profile.shape == ProfileShape::Sech2 ? sech2_lower(x) : gauss_lower(x);
}

double ccdf_at(const PulseProfile& profile, double t) noexcept {
  const double x = (t - profile.center) / profile.sigma_t;
  return profile.shape == ProfileShape::Sech2 ? sech2_upper(x) : gauss_upper(x);
}

double mass_between(const PulseProfile& profile, double lo, double hi) noexcept {
  if (!(hi > lo)) return 0.0;
  const double a = (lo - profile.center) / profile.sigma_t;
  const double b = (hi - profile.center) / profile.sigma_t;
  const double m = profile.shape == ProfileShape::Sech2 ? sech2_mass(a, b) : gauss_mass(a, b);
  return std::max(m, 0.0);
}

double quantile(const PulseProfile& profile, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile requires 0 < u < 1, got " + std::to_string(u));
  }
  switch (profile.shape) {
  case ProfileShape::Sech2:
    // atanh(2u - 1) == log(u / (1 - u)) / 2; the ratio form keeps full
    // precision in both tails.
    if (u < 0.5) return profile.center + 0.5 * profile.sigma_t * std::log(u / (1.0 - u));
    return profile.center - 0.5 * profile.sigma_t * std::log((1.0 - u) / u);
  case ProfileShape::Gaussian:
    // Phi^{-1}(u) = -sqrt2 * erfc^{-1}(2u); use the smaller tail for accuracy.
    if (u < 0.5) return profile.center - kSqrt2 * profile.sigma_t * boost::math::erfc_inv(2.0 * u);
    return profile.center + kSqrt2 * profile.sigma_t * boost::math::erfc_inv(2.0 * (1.0 - u));
  }
  return profile.center;
}

double truncated_quantile(const PulseProfile& profile, double cdf_lo, double cdf_hi, double unit) {
  const double u = std::clamp(cdf_lo + unit * (cdf_hi - cdf_lo), kUniformClamp, 1.0 - kUniformClamp);
  return quantile(profile, u);
}

double sample_hit_time(const PulseProfile& profile, const HitWindow& window, rng::CounterStream& stream) {
  const double mass = mass_between(profile, window.lower(), window.upper());
  if (!(mass >= 1e-12)) {
    throw ConfigError("hit window [" + std::to_string(window.lower()) + ", " + std::to_string(window.upper()) +
                      "] carries negligible profile mass");
  }
  const double lo = cdf_at(profile, window.lower());
  const double hi = cdf_at(profile, window.upper());
  const double t = truncated_quantile(profile, lo, hi, stream.uniform());
  // The clamp and rounding can push a draw a few ulps outside a very narrow window.
  return std::clamp(t, window.lower(), window.upper());
}

ExperimentGeometry ExperimentGeometry::centered(PulseProfile base, double delay_T, double window_dt) {
  ExperimentGeometry g;
  g.base = base;
  g.delay_T = delay_T;
  g.window_dt = window_dt;
  g.window_origin = base.center + 0.5 * delay_T - 0.5 * window_dt;
  return g;
}

void ExperimentGeometry::validate() const {
  base.validate();
  if (!std::isfinite(delay_T)) throw ConfigError("delay_T must be finite");
  if (!std::isfinite(window_dt) || window_dt <= 0.0) throw ConfigError("window_dt must be finite and > 0");
  if (!std::isfinite(window_origin)) throw ConfigError("window_origin must be finite");
}

} // namespace collapsim
