#include "collapsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "collapsim/errors.hpp"

namespace collapsim::analytics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;
};

struct BandSetup {
  PulseProfile left;
  PulseProfile right;
  Interval left_domain;
  Interval right_domain;
  double normalization = 1.0; // product of window masses for SamplingWindow
};

BandSetup band_setup(const CoincidenceInputs& in, BandDomain domain) {
  BandSetup s{in.geometry.left(), in.geometry.right(), {}, {}, 1.0};
  if (domain == BandDomain::CoincidenceFormula) {
    s.left_domain = {s.left.center - in.geometry.window_dt, s.left.center + in.geometry.window_dt};
    s.right_domain = {-kInf, kInf};
  } else {
    const HitWindow w = in.geometry.window();
    s.left_domain = {w.lower(), w.upper()};
    s.right_domain = {w.lower(), w.upper()};
    const double ml = mass_between(s.left, w.lower(), w.upper());
    const double mr = mass_between(s.right, w.lower(), w.upper());
    if (!(ml >= 1e-12 && mr >= 1e-12)) throw ConfigError("hit window carries negligible profile mass");
    s.normalization = ml * mr;
  }
  return s;
}

void push_scale_points(std::vector<double>& pts, double center, double sigma) {
  static constexpr double kScales[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  for (double k : kScales) {
    pts.push_back(center + k * sigma);
    pts.push_back(center - k * sigma);
  }
}

quad::Options inner_options() { return {1e-300, 1e-13, 2000}; }

// int_{ylo}^{yhi} w(|y|) f_R(t - y) dy, split at the kink of |y|.
double weighted_inner(const BandSetup& s, const std::function<double(double)>& weight, double t, double ylo,
                      double yhi) {
  if (!(yhi > ylo)) return 0.0;
  auto integrand = [&](double y) { return weight(std::abs(y)) * pdf_at(s.right, t - y); };
  const quad::Options opts = inner_options();
  const double split[] = {0.0};
  return quad::integrate_or_throw(integrand, ylo, yhi, opts, split, "band inner integral");
}

} // namespace

void CoincidenceInputs::validate() const {
  geometry.validate();
  if (!std::isfinite(delta_t) || delta_t < 0.0) throw ConfigError("delta_t must be finite and >= 0");
  if (!(delta_t < geometry.window_dt)) throw ConfigError("delta_t must be smaller than window_dt");
}

namespace detail {

double band_integral(const CoincidenceInputs& inputs, BandDomain domain, const std::function<double(double)>& weight,
                     const quad::Options& opts) {
  inputs.validate();
  if (inputs.delta_t == 0.0) return 0.0;
  const BandSetup s = band_setup(inputs, domain);
  const double dt = inputs.delta_t;

  auto outer = [&](double t) -> double {
    const double fl = pdf_at(s.left, t);
    if (fl == 0.0) return 0.0;
    // t2 = t - y must stay inside the right domain.
    const double ylo = std::max(-dt, t - s.right_domain.hi);
    const double yhi = std::min(dt, t - s.right_domain.lo);
    if (!weight) return fl * mass_between(s.right, t - yhi, t - ylo);
    return fl * weighted_inner(s, weight, t, ylo, yhi);
  };

  std::vector<double> pts;
  const double sigma = s.left.sigma_t;
  push_scale_points(pts, s.left.center, sigma);
  push_scale_points(pts, s.right.center, sigma);
  for (double c : {s.right.center - dt, s.right.center + dt, s.left.center - dt, s.left.center + dt}) {
    pts.push_back(c);
  }
  const double value =
      quad::integrate_or_throw(outer, s.left_domain.lo, s.left_domain.hi, opts, pts, "band integral");
  return value / s.normalization;
}

double coincidence_term(double A, double D, TermMethod method) {
  const double a = std::tanh(A);
  if (method == TermMethod::Auto) method = std::abs(a) < 0.5 ? TermMethod::Series : TermMethod::Literal;

  if (method == TermMethod::Series) {
    // With x = tanh t, a = tanh A, X = tanh D:
    // I = int_{-X}^{X} (x - a)/(1 - a x) dx
    //   = -2 sum_k a^{2k+1} [X^{2k+1}/(2k+1) - X^{2k+3}/(2k+3)].
    const double X = std::tanh(D);
    const double a2 = a * a;
    const double X2 = X * X;
    double a_pow = a;
    double x_pow = X;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double n = 2.0 * k + 1.0;
      const double term = a_pow * x_pow * (1.0 / n - X2 / (n + 2.0));
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      a_pow *= a2;
      x_pow *= X2;
    }
    return -2.0 * sum;
  }

  // csch^2(A) ln[cosh(A + D)/cosh(A - D)] - 2 coth(A) tanh(D).
  // ln cosh x = |x| + log1p(e^{-2|x|}) - ln 2, and |A + D| - |A - D| = 2 sign(A) min(|A|, D).
  const double linear = 2.0 * std::copysign(std::min(std::abs(A), D), A);
  const double log_ratio =
      linear + std::log1p(std::exp(-2.0 * std::abs(A + D))) - std::log1p(std::exp(-2.0 * std::abs(A - D)));
  const double sh = std::sinh(A);
  return log_ratio / (sh * sh) - 2.0 * std::tanh(D) / std::tanh(A);
}

} // namespace detail

double p_less_quadrature(const CoincidenceInputs& inputs, BandDomain domain, const quad::Options& opts) {
  return detail::band_integral(inputs, domain, {}, opts);
}

double p_less_closed_form(double sigma_t, double delay_T, double window_dt, double delta_t) {
  if (!(sigma_t > 0.0) || !(delay_T >= 0.0) || !(window_dt > 0.0) || !(delta_t >= 0.0)) {
    throw DomainError("closed form needs sigma_t > 0, delay_T >= 0, window_dt > 0, delta_t >= 0");
  }
  if (delta_t == 0.0) return 0.0;
  const double D = window_dt / sigma_t;
  const double A0 = (delay_T - delta_t) / sigma_t;
  const double A1 = (delay_T + delta_t) / sigma_t;
  return 0.25 * (detail::coincidence_term(A0, D) - detail::coincidence_term(A1, D));
}

double p_less_approx(double sigma_t, double delay_T, double window_dt, double delta_t) {
  if (!(sigma_t > 0.0) || !(window_dt > 0.0) || !(delta_t >= 0.0)) {
    throw DomainError("approximation needs sigma_t > 0, window_dt > 0, delta_t >= 0");
  }
  // tanh b - tanh a = sinh(b - a) / (cosh a cosh b)
  const double a = (delay_T - delta_t) / sigma_t;
  const double b = (delay_T + delta_t) / sigma_t;
  const double bracket = std::sinh(b - a) / (std::cosh(a) * std::cosh(b));
  return 0.5 * std::tanh(window_dt / sigma_t) * bracket;
}

double relative_time_density(const CoincidenceInputs& inputs, double y, DensityMode mode, BandDomain domain) {
  inputs.validate();
  const ExperimentGeometry& g = inputs.geometry;
  if (mode == DensityMode::Approx) {
    const double sigma = g.base.sigma_t;
    const double c = std::cosh((g.delay_T + y) / sigma);
    return std::tanh(g.window_dt / sigma) / (c * c) / (2.0 * sigma);
  }
  const BandSetup s = band_setup(inputs, domain);
  // t_L = t, t_R = t - y; t_R inside its domain.
  const double lo = std::max(s.left_domain.lo, s.right_domain.lo + y);
  const double hi = std::min(s.left_domain.hi, s.right_domain.hi + y);
  if (!(hi > lo)) return 0.0;
  auto integrand = [&](double t) { return pdf_at(s.left, t) * pdf_at(s.right, t - y); };
  std::vector<double> pts;
  push_scale_points(pts, s.left.center, s.left.sigma_t);
  push_scale_points(pts, s.right.center + y, s.left.sigma_t);
  const quad::Options opts{1e-300, 1e-12, 4000};
  return quad::integrate_or_throw(integrand, lo, hi, opts, pts, "relative-time density") / s.normalization;
}

LambdaGamma lambda_gamma(const RouteKinematics& kin, const CoincidenceInputs& inputs, BandDomain domain) {
  inputs.validate();
  if (std::abs(kin.delta_t() - inputs.delta_t) > 1e-12 * std::max(1.0, inputs.delta_t)) {
    throw ConfigError("kinematics and coincidence inputs disagree on delta_t");
  }
  LambdaGamma out;
  if (inputs.delta_t == 0.0) return out;

  out.p_less = p_less_quadrature(inputs, domain);
  out.lambda = detail::band_integral(inputs, domain,
                                     [&](double tau) { return kin.doomed_squared_unchecked(Route::Two, tau); });
  const double route1_doomed = detail::band_integral(
      inputs, domain, [&](double tau) { return kin.doomed_squared_unchecked(Route::One, tau); });
  const double a1_weight = out.p_less - route1_doomed;
  out.gamma = a1_weight - out.lambda;
  if (out.p_less > 0.0) {
    out.lambda_cond = out.lambda / out.p_less;
    out.gamma_cond = out.gamma / out.p_less;
  }
  const double bound = kin.alpha_abs() * kin.alpha_abs() * out.p_less;
  if (out.lambda > bound * (1.0 + 1e-9) + 1e-300) {
    throw NumericalError("Lambda = " + std::to_string(out.lambda) + " exceeds its bound |alpha|^2 P_< = " +
                         std::to_string(bound));
  }
  return out;
}

double p_plus_minus_exact(const RouteKinematics& kin, const StateAmplitudes& state, const CoincidenceInputs& inputs,
                          BandDomain domain) {
  const LambdaGamma lg = lambda_gamma(kin, inputs, domain);
  const double a2 = state.alpha2();
  const double a1_weight = lg.gamma + lg.lambda;
  return (1.0 - lg.p_less) * a2 + a2 * a1_weight + (1.0 - a2) * lg.lambda;
}

double p_plus_minus_symmetric(const StateAmplitudes& state, double lambda_cond, double p_less) {
  const double a2 = state.alpha2();
  return a2 + (1.0 - 2.0 * a2) * lambda_cond * p_less;
}

double symmetry_residual(const RouteKinematics& kin, const CoincidenceInputs& inputs, BandDomain domain) {
  if (inputs.delta_t == 0.0) return 0.0;
  const LambdaGamma lg = lambda_gamma(kin, inputs, domain);
  return lg.gamma_cond - (1.0 - 2.0 * lg.lambda_cond);
}

RouteKinematics resolve_kinematics(const DecayFamily& fam, const StateAmplitudes& state,
                                   const CoincidenceInputs& inputs, BandDomain domain) {
  const auto* eff = std::get_if<family::EffectiveSymmetric>(&fam);
  if (eff == nullptr || eff->calibrated_rate1) return RouteKinematics::make(fam, state, inputs.delta_t);

  family::EffectiveSymmetric resolved = *eff;
  if (inputs.delta_t == 0.0) {
    resolved.calibrated_rate1 = eff->rate2;
    return RouteKinematics::make(resolved, state, inputs.delta_t);
  }
  inputs.validate();
  const double dt = inputs.delta_t;
  const double p_less = p_less_quadrature(inputs, domain);
  auto doomed_weight = [&](double rate) {
    const DecayShape shape = DecayShape::exponential(rate);
    return detail::band_integral(inputs, domain, [&](double tau) {
             const double s = shape(tau / dt);
             return s * s;
           }) /
           p_less;
  };
  // beta^2 m(rate1) = alpha^2 m(rate2)
  const double target = state.alpha2() * doomed_weight(eff->rate2) / state.beta2();
  constexpr double kMaxRate = 700.0;
  auto f = [&](double rate) { return doomed_weight(rate) - target; };
  const double f_lo = f(-kMaxRate);
  const double f_hi = f(kMaxRate);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw ConfigError("effective_symmetric family infeasible: the symmetry constraint needs a route-1 doomed weight " +
                      std::to_string(target) + " outside the attainable range [" + std::to_string(f_hi + target) +
                      ", " + std::to_string(f_lo + target) + "]");
  }
  std::uintmax_t iterations = 200;
  const auto [r_lo, r_hi] = boost::math::tools::toms748_solve(f, -kMaxRate, kMaxRate, f_lo, f_hi,
                                                              boost::math::tools::eps_tolerance<double>(50),
                                                              iterations);
  resolved.calibrated_rate1 = 0.5 * (r_lo + r_hi);
  return RouteKinematics::make(resolved, state, inputs.delta_t);
}

AnalyticsReport analyze(const RouteKinematics& kin, const StateAmplitudes& state, const CoincidenceInputs& inputs) {
  inputs.validate();
  const ExperimentGeometry& g = inputs.geometry;
  AnalyticsReport r;
  r.p_less = p_less_quadrature(inputs);
  if (g.base.shape == ProfileShape::Sech2 && g.delay_T >= 0.0) {
    r.p_less_closed = p_less_closed_form(g.base.sigma_t, g.delay_T, g.window_dt, inputs.delta_t);
  }
  r.p_less_approx = p_less_approx(g.base.sigma_t, g.delay_T, g.window_dt, inputs.delta_t);
  r.p_density_at_zero = relative_time_density(inputs, 0.0, DensityMode::Exact);
  r.p_density_at_zero_approx = relative_time_density(inputs, 0.0, DensityMode::Approx);

  const LambdaGamma lg = lambda_gamma(kin, inputs);
  r.lambda_uncond = lg.lambda;
  r.gamma_uncond = lg.gamma;
  r.lambda_cond = lg.lambda_cond;
  r.gamma_cond = lg.gamma_cond;
  const double a2 = state.alpha2();
  r.p_plus_minus_exact = (1.0 - lg.p_less) * a2 + a2 * (lg.gamma + lg.lambda) + (1.0 - a2) * lg.lambda;
  r.p_minus_plus_exact = 1.0 - r.p_plus_minus_exact;
  r.p_plus_minus_symmetric = p_plus_minus_symmetric(state, lg.lambda_cond, lg.p_less);
  r.symmetry_residual = inputs.delta_t == 0.0 ? 0.0 : lg.gamma_cond - (1.0 - 2.0 * lg.lambda_cond);
  r.delta_n_per_trial = 2.0 * lg.lambda * (2.0 * a2 - 1.0);

  r.lambda_bound = a2 * r.p_less;
  const double balance = 2.0 * a2 - 1.0;
  r.lambda_for_paper_6sigma = balance != 0.0 ? 6.0 / (2.0 * std::abs(balance) * std::sqrt(1e9)) : 0.0;
  r.lambda_normalization_discrepancy = r.lambda_paper_literal > r.lambda_bound;
  return r;
}

} // namespace collapsim::analytics
