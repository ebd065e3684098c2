#pragma once

// Coincidence probability P_<, the relative-time density p(y), the weights
// Lambda/Gamma and the resulting outcome probabilities.
//
// Two integration domains exist:
//  * CoincidenceFormula: t1 ranges over [c_L - window_dt, c_L + window_dt],
//    t2 is unrestricted. This is the domain of the closed form.
//  * SamplingWindow: both hits lie in the geometry's hit window and the
//    profiles are renormalized on it. This is the law the trial engine samples.
// For windows much wider than sigma_t the two agree to rounding.

#include <functional>
#include <optional>

#include "collapsim/collapse.hpp"
#include "collapsim/profiles.hpp"
#include "collapsim/quadrature.hpp"

namespace collapsim::analytics {

struct CoincidenceInputs {
  ExperimentGeometry geometry;
  double delta_t = 0.1;

  /// Throws ConfigError unless the geometry is valid and 0 <= delta_t < window_dt.
  void validate() const;
};

enum class BandDomain { CoincidenceFormula, SamplingWindow };
enum class DensityMode { Exact, Approx };

/// P(|t_L - t_R| < dt) by one-dimensional adaptive quadrature; the inner
/// integral is the exact band mass of the right profile.
double p_less_quadrature(const CoincidenceInputs& inputs, BandDomain domain = BandDomain::CoincidenceFormula,
                         const quad::Options& opts = {});

/// Closed form for the sech^2 pair (t1 over +-window_dt, t2 free).
/// Throws DomainError for negative parameters.
double p_less_closed_form(double sigma_t, double delay_T, double window_dt, double delta_t);

/// Small-delay approximation (1/2) tanh(Dt/s) [tanh((T+dt)/s) - tanh((T-dt)/s)].
/// Only accurate when window_dt << sigma_t as well as dt, T << sigma_t.
double p_less_approx(double sigma_t, double delay_T, double window_dt, double delta_t);

/// Density of y = t_L - t_R. Exact: cross-correlation of the two profiles
/// over the chosen domain. Approx: tanh(Dt/s) sech^2((T + y)/s) / (2 s).
double relative_time_density(const CoincidenceInputs& inputs, double y, DensityMode mode = DensityMode::Exact,
                             BandDomain domain = BandDomain::CoincidenceFormula);

/// Unconditional (normalized by 1) and conditional (normalized by P_<) weights.
struct LambdaGamma {
  double p_less = 0.0;
  double lambda = 0.0;      ///< int |a2(|y|)|^2 p(y) dy over |y| < dt
  double gamma = 0.0;       ///< int |a1(|y|)|^2 p(y) dy - lambda
  double lambda_cond = 0.0; ///< lambda / p_less
  double gamma_cond = 0.0;  ///< gamma / p_less
};

/// Zeros for dt = 0. Throws NumericalError if lambda exceeds |alpha|^2 P_<.
LambdaGamma lambda_gamma(const RouteKinematics& kin, const CoincidenceInputs& inputs,
                         BandDomain domain = BandDomain::CoincidenceFormula);

/// (1 - P_<)|alpha|^2 + int [|alpha|^2 |a1|^2 + (1 - |alpha|^2)|a2|^2] p(y) dy.
double p_plus_minus_exact(const RouteKinematics& kin, const StateAmplitudes& state, const CoincidenceInputs& inputs,
                          BandDomain domain = BandDomain::CoincidenceFormula);

/// |alpha|^2 + (1 - 2|alpha|^2) lambda_cond p_less.
double p_plus_minus_symmetric(const StateAmplitudes& state, double lambda_cond, double p_less);

/// gamma_cond - (1 - 2 lambda_cond). Zero iff the kinematics satisfy the
/// left-right symmetry constraint in conditional normalization.
double symmetry_residual(const RouteKinematics& kin, const CoincidenceInputs& inputs,
                         BandDomain domain = BandDomain::CoincidenceFormula);

/// Builds kinematics for any family. EffectiveSymmetric gets its route-1 rate
/// calibrated so that int |b1|^2 p = int |a2|^2 p; throws ConfigError when no
/// rate in [-700, 700] achieves it.
RouteKinematics resolve_kinematics(const DecayFamily& fam, const StateAmplitudes& state,
                                   const CoincidenceInputs& inputs,
                                   BandDomain domain = BandDomain::CoincidenceFormula);

/// Lambda quoted for the worked example.
inline constexpr double kPaperLiteralLambda = 2.0e-4;

struct AnalyticsReport {
  double p_less = 0.0;
  std::optional<double> p_less_closed; ///< sech^2 only
  double p_less_approx = 0.0;
  double lambda_uncond = 0.0;
  double gamma_uncond = 0.0;
  double lambda_cond = 0.0;
  double gamma_cond = 0.0;
  double p_plus_minus_exact = 0.0;
  double p_minus_plus_exact = 0.0;
  double p_plus_minus_symmetric = 0.0;
  double symmetry_residual = 0.0;
  double delta_n_per_trial = 0.0; ///< 2 lambda (2|alpha|^2 - 1)
  double p_density_at_zero = 0.0;
  double p_density_at_zero_approx = 0.0;

  // Normalization diagnostics for the quoted Lambda.
  double lambda_bound = 0.0;             ///< |alpha|^2 P_<, the largest attainable Lambda
  double lambda_paper_literal = kPaperLiteralLambda;
  double lambda_for_paper_6sigma = 0.0;  ///< Lambda giving ratio 6 at N = 1e9
  bool lambda_normalization_discrepancy = false;
};

AnalyticsReport analyze(const RouteKinematics& kin, const StateAmplitudes& state, const CoincidenceInputs& inputs);

namespace detail {
/// One n-term of the closed form, I(A) = int_{-D}^{D} sech^2(t) tanh(t - A) dt.
enum class TermMethod { Auto, Series, Literal };
double coincidence_term(double A, double D, TermMethod method = TermMethod::Auto);

/// Generic band integral int f_L(t) int_{|y|<dt} w(|y|) f_R(t - y) dy dt over
/// the chosen domain; an empty weight means w = 1. SamplingWindow results
/// are divided by the window masses of both profiles.
double band_integral(const CoincidenceInputs& inputs, BandDomain domain,
                     const std::function<double(double)>& weight = {}, const quad::Options& opts = {});
} // namespace detail

} // namespace collapsim::analytics
