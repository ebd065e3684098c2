#include "collapsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include "collapsim/errors.hpp"

namespace collapsim::stats {

double deviation_delta_n(double alpha2, double lambda, double n) { return 2.0 * lambda * (2.0 * alpha2 - 1.0) * n; }

RequiredTrials required_trials(double k_sigma, double alpha2, double lambda) {
  RequiredTrials out;
  if (!(k_sigma > 0.0)) {
    out.reason = "k_sigma must be > 0";
    return out;
  }
  const double per_trial = 2.0 * lambda * (2.0 * alpha2 - 1.0);
  if (per_trial == 0.0 || !std::isfinite(per_trial)) {
    out.reason = alpha2 == 0.5 ? "alpha2 = 1/2: both scenarios predict identical counts"
                               : "Lambda = 0: no deviation between the scenarios";
    out.exact = std::numeric_limits<double>::infinity();
    return out;
  }
  const double ratio = k_sigma / per_trial;
  out.exact = ratio * ratio;
  if (!(out.exact < 9.2e18)) {
    out.reason = "required trial count exceeds 2^63";
    return out;
  }
  // Inputs such as 2e-4 are not representable; a quotient within 1e-12 of an
  // integer is taken to be that integer.
  out.n = static_cast<std::uint64_t>(std::ceil(out.exact * (1.0 - 1e-12)));
  out.n = std::max<std::uint64_t>(out.n, 1);
  out.feasible = true;
  return out;
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

double exact_binomial_p(std::uint64_t k, std::uint64_t n, double p) {
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  const double pk = boost::math::pdf(dist, static_cast<double>(k));
  double total = 0.0;
  for (std::uint64_t i = 0; i <= n; ++i) {
    const double pi = boost::math::pdf(dist, static_cast<double>(i));
    if (pi <= pk * (1.0 + 1e-7)) total += pi;
  }
  return std::min(1.0, total);
}

SignificanceReport z_test(const CountTable& table, double alpha2, double lambda_eff, double k_sigma) {
  if (table.n_total == 0) throw DomainError("z_test needs a non-empty count table");
  SignificanceReport r;
  const double n = static_cast<double>(table.n_total);
  r.n_total = table.n_total;
  r.lambda_eff = lambda_eff;
  r.delta_n_expected = deviation_delta_n(alpha2, lambda_eff, n);
  r.fluctuation_scale = std::sqrt(n);
  r.single_fluctuation = 0.5 * std::sqrt(n);
  r.paper_ratio = 2.0 * lambda_eff * (2.0 * alpha2 - 1.0) * std::sqrt(n);
  const double n_pm = static_cast<double>(table.n_pm);
  const double n_mp = static_cast<double>(table.n_mp);
  r.observed_delta_n = (2.0 * alpha2 - 1.0) * n - (n_pm - n_mp);
  r.z_paper = r.observed_delta_n / r.fluctuation_scale;
  r.z_score = (n_pm - n * alpha2) / std::sqrt(n * alpha2 * (1.0 - alpha2));
  if (table.n_total < 30) {
    r.exact_binomial = true;
    r.p_value = exact_binomial_p(table.n_pm, table.n_total, alpha2);
  } else {
    r.p_value = two_sided_normal_p(r.z_score);
  }
  r.required = required_trials(k_sigma, alpha2, lambda_eff);
  return r;
}

TwoSampleResult two_sample_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw DomainError("two-sample test needs non-empty samples");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double p1 = static_cast<double>(k1) / a;
  const double p2 = static_cast<double>(k2) / b;
  const double pooled = static_cast<double>(k1 + k2) / (a + b);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b));
  TwoSampleResult r;
  if (se == 0.0) return r;
  r.z = (p1 - p2) / se;
  r.p_value = two_sided_normal_p(r.z);
  return r;
}

double anderson_darling_standard_normal(std::vector<double> sample) {
  if (sample.empty()) throw DomainError("Anderson-Darling needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  const boost::math::normal standard;
  const std::size_t n = sample.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lower = boost::math::cdf(standard, sample[i]);
    const double upper = boost::math::cdf(boost::math::complement(standard, sample[n - 1 - i]));
    s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lower) + std::log(upper));
  }
  return -static_cast<double>(n) - s / static_cast<double>(n);
}

std::string_view to_string(SweepAxis a) noexcept {
  switch (a) {
  case SweepAxis::DeltaT:
    return "delta_t";
  case SweepAxis::Alpha2:
    return "alpha2";
  case SweepAxis::DelayT:
    return "T";
  case SweepAxis::LambdaRate:
    return "lambda_rate";
  }
  return "delta_t";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  for (SweepAxis a : {SweepAxis::DeltaT, SweepAxis::Alpha2, SweepAxis::DelayT, SweepAxis::LambdaRate}) {
    if (name == to_string(a)) return a;
  }
  if (name == "delay_T") return SweepAxis::DelayT;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected delta_t, alpha2, T or lambda_rate)");
}

ModelConfig apply_axis(const ModelConfig& base, SweepAxis axis, double value) {
  ModelConfig cfg = base;
  switch (axis) {
  case SweepAxis::DeltaT:
    cfg.delta_t = value;
    break;
  case SweepAxis::Alpha2:
    cfg.alpha2 = value;
    break;
  case SweepAxis::DelayT:
    cfg.delay_T = value;
    break;
  case SweepAxis::LambdaRate:
    cfg.lambda2 = value;
    break;
  }
  return cfg;
}

double effective_lambda(const ModelConfig& cfg, const analytics::LambdaGamma& lg) {
  return cfg.lambda_source == LambdaSource::PaperLiteral ? analytics::kPaperLiteralLambda
                                                         : lg.lambda_cond * lg.p_less;
}

SweepResult significance_sweep(const ModelConfig& base, SweepAxis axis, std::span<const double> grid,
                               const SweepOptions& opts) {
  if (grid.empty()) throw DomainError("sweep grid is empty");
  SweepResult result{axis, {}, {}};
  for (double value : grid) {
    SweepRow row;
    row.axis_value = value;
    row.seed = base.seed;
    try {
      const ModelConfig cfg = apply_axis(base, axis, value);
      cfg.validate();
      const RouteKinematics kin = build_kinematics(cfg);
      const analytics::LambdaGamma lg = analytics::lambda_gamma(kin, cfg.inputs());
      const double a2 = cfg.alpha2;
      row.p_less = lg.p_less;
      row.lambda = lg.lambda;
      row.lambda_cond = lg.lambda_cond;
      row.p_plus_minus = (1.0 - lg.p_less) * a2 + a2 * (lg.gamma + lg.lambda) + (1.0 - a2) * lg.lambda;
      const double lambda_eff = effective_lambda(cfg, lg);
      row.delta_n = deviation_delta_n(a2, lambda_eff, static_cast<double>(cfg.n_trials));
      row.required = required_trials(opts.k_sigma, a2, lambda_eff);
      if (opts.monte_carlo) {
        BatchOptions batch = opts.batch;
        batch.kernel = cfg.kernel;
        const CountTable table = run_batch(build_trial_config(cfg, kin), batch);
        row.z = z_test(table, a2, lambda_eff, opts.k_sigma).z_score;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      ++result.diagnostics.failures;
    }
    result.rows.push_back(std::move(row));
  }

  const SweepRow* prev = nullptr;
  const SweepRow* prev_feasible = nullptr;
  for (const SweepRow& row : result.rows) {
    if (!row.ok) continue;
    if (prev) {
      const double now = std::abs(row.delta_n);
      const double before = std::abs(prev->delta_n);
      if (now > before) result.diagnostics.delta_n_nonincreasing = false;
      if (now < before) result.diagnostics.delta_n_nondecreasing = false;
    }
    prev = &row;
    if (row.required.feasible) {
      if (prev_feasible) {
        if (row.required.n > prev_feasible->required.n) result.diagnostics.required_n_nonincreasing = false;
        if (row.required.n < prev_feasible->required.n) result.diagnostics.required_n_nondecreasing = false;
      }
      prev_feasible = &row;
    }
  }
  return result;
}

} // namespace collapsim::stats
