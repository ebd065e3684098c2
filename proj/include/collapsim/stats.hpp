#pragma once

// Distinguishability of the two collapse scenarios.
//
// Two fluctuation metrics are reported side by side:
//  * the worst-case scale sqrt(N) for the count difference
//    Delta N = (n_pm - n_mp) predicted minus observed, and
//  * the binomial standard deviation sqrt(N a (1 - a)) of n_pm.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collapsim/counts.hpp"
#include "collapsim/model.hpp"

namespace collapsim::stats {

/// 2 Lambda (2 alpha2 - 1) N.
double deviation_delta_n(double alpha2, double lambda, double n);

struct RequiredTrials {
  bool feasible = false;
  std::uint64_t n = 0;
  double exact = 0.0; ///< K^2 / [2 Lambda (2 alpha2 - 1)]^2 before rounding up
  std::string reason;
};

/// ceil(K^2 / [2 Lambda (2 alpha2 - 1)]^2). Infeasible (not an exception) for
/// alpha2 = 1/2, Lambda = 0, or a count beyond 2^63.
RequiredTrials required_trials(double k_sigma, double alpha2, double lambda);

struct SignificanceReport {
  std::uint64_t n_total = 0;
  double lambda_eff = 0.0;
  double delta_n_expected = 0.0;  ///< 2 Lambda (2 alpha2 - 1) N
  double fluctuation_scale = 0.0; ///< sqrt(N), worst-case scale of the difference
  double single_fluctuation = 0.0; ///< sqrt(N)/2, one-scenario scale
  double paper_ratio = 0.0;       ///< 2 Lambda (2 alpha2 - 1) sqrt(N)
  double observed_delta_n = 0.0;  ///< (2 alpha2 - 1) N - (n_pm - n_mp)
  double z_paper = 0.0;           ///< observed_delta_n / sqrt(N)
  double z_score = 0.0;           ///< (n_pm - N alpha2) / sqrt(N alpha2 (1 - alpha2))
  double p_value = 1.0;           ///< two-sided
  bool exact_binomial = false;    ///< p_value from the exact test (N < 30)
  RequiredTrials required;        ///< for k_sigma at the configured Lambda
};

/// Throws DomainError for an empty table.
SignificanceReport z_test(const CountTable& table, double alpha2, double lambda_eff, double k_sigma = 6.0);

double two_sided_normal_p(double z);

/// Two-sided exact binomial p-value (sum of outcomes no more likely than k).
double exact_binomial_p(std::uint64_t k, std::uint64_t n, double p);

struct TwoSampleResult {
  double z = 0.0;
  double p_value = 1.0;
};

/// Pooled two-proportion z test.
TwoSampleResult two_sample_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

/// A^2 for a sample against the standard normal (parameters known).
double anderson_darling_standard_normal(std::vector<double> sample);

/// Upper 1% point of A^2 for a fully specified null distribution.
inline constexpr double kAndersonDarlingCritical1pct = 3.857;

enum class SweepAxis { DeltaT, Alpha2, DelayT, LambdaRate };

std::string_view to_string(SweepAxis a) noexcept;
SweepAxis sweep_axis_from_string(std::string_view name);

/// Copy of base with the axis coordinate replaced by value.
ModelConfig apply_axis(const ModelConfig& base, SweepAxis axis, double value);

struct SweepRow {
  double axis_value = 0.0;
  bool ok = false;
  std::string error;
  double p_less = 0.0;
  double lambda = 0.0;
  double lambda_cond = 0.0;
  double p_plus_minus = 0.0;
  double delta_n = 0.0;
  RequiredTrials required;
  std::optional<double> z;
  std::uint64_t seed = 0;
};

struct SweepDiagnostics {
  std::size_t failures = 0;
  /// Along the grid order, |Delta N| never increases / never decreases.
  bool delta_n_nonincreasing = true;
  bool delta_n_nondecreasing = true;
  /// Feasible required-N values never increase / never decrease.
  bool required_n_nonincreasing = true;
  bool required_n_nondecreasing = true;
};

struct SweepResult {
  SweepAxis axis;
  std::vector<SweepRow> rows;
  SweepDiagnostics diagnostics;
};

struct SweepOptions {
  double k_sigma = 6.0;
  bool monte_carlo = false;
  BatchOptions batch;
};

/// One row per grid point; a failing point is recorded in its row and the
/// sweep continues. Throws DomainError for an empty grid.
SweepResult significance_sweep(const ModelConfig& base, SweepAxis axis, std::span<const double> grid,
                               const SweepOptions& opts = {});

/// Lambda entering the deviation formulas for a configuration.
double effective_lambda(const ModelConfig& cfg, const analytics::LambdaGamma& lg);

} // namespace collapsim::stats
