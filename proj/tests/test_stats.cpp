#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "collapsim/errors.hpp"
#include "collapsim/model.hpp"
#include "collapsim/stats.hpp"

using namespace collapsim;
using namespace collapsim::stats;

namespace {

CountTable table_of(std::uint64_t n_pm, std::uint64_t n_total) {
  CountTable t;
  t.n_pm = n_pm;
  t.n_mp = n_total - n_pm;
  t.n_total = n_total;
  return t;
}

/// Two-sided exact binomial p-value by direct summation in log space.
double binomial_p_reference(std::uint64_t k, std::uint64_t n, double p) {
  auto log_pmf = [&](std::uint64_t i) {
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
           (n - i) * std::log1p(-p);
  };
  const double ref = log_pmf(k);
  double total = 0.0;
  for (std::uint64_t i = 0; i <= n; ++i) {
    if (log_pmf(i) <= ref + 1e-7) total += std::exp(log_pmf(i));
  }
  return std::min(1.0, total);
}

} // namespace

TEST_CASE("deviation between the scenarios") {
  CHECK(deviation_delta_n(0.5, 2e-4, 1e9) == 0.0);
  CHECK(deviation_delta_n(0.75, 0.0, 1e9) == 0.0);
  CHECK(deviation_delta_n(0.75, 2e-4, 1e9) == doctest::Approx(2e5).epsilon(1e-14));
  CHECK(deviation_delta_n(0.75, 2e-4, 1e9) / std::sqrt(1e9) == doctest::Approx(6.3245553203).epsilon(1e-9));
}

TEST_CASE("required trials") {
  const RequiredTrials six = required_trials(6.0, 0.75, 2e-4);
  REQUIRE(six.feasible);
  CHECK(six.n == 900'000'000);
  CHECK(required_trials(12.0, 0.75, 2e-4).n == 3'600'000'000);
  CHECK(required_trials(1.0, 0.75, 2e-4).n == 25'000'000);
  CHECK(required_trials(6.0, 0.25, 2e-4).n == 900'000'000);
  const RequiredTrials null_state = required_trials(6.0, 0.5, 2e-4);
  CHECK_FALSE(null_state.feasible);
  CHECK_FALSE(null_state.reason.empty());
  CHECK_FALSE(required_trials(6.0, 0.75, 0.0).feasible);
  CHECK_FALSE(required_trials(6.0, 0.75, 1e-12).feasible);
  CHECK_FALSE(required_trials(0.0, 0.75, 2e-4).feasible);
  // Approaching the null state the requirement diverges.
  CHECK(required_trials(6.0, 0.5001, 2e-4).n > 1e14);
}

TEST_CASE("z test at the expectation") {
  const SignificanceReport r = z_test(table_of(75, 100), 0.75, 2e-4);
  CHECK(r.z_score == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.exact_binomial);
  CHECK(r.required.n == 900'000'000);
  CHECK_THROWS_AS(z_test(CountTable{}, 0.75, 2e-4), DomainError);
}

TEST_CASE("z test against an independent implementation") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double alpha2 = 0.05 + 0.9 * unit(gen);
    const auto n = static_cast<std::uint64_t>(30 + unit(gen) * 1e7);
    const auto k = static_cast<std::uint64_t>(unit(gen) * static_cast<double>(n));
    const double lambda = 1e-5 * unit(gen);
    const SignificanceReport r = z_test(table_of(k, n), alpha2, lambda);
    const double nn = static_cast<double>(n);
    const double z = (static_cast<double>(k) - nn * alpha2) / std::sqrt(nn * alpha2 * (1.0 - alpha2));
    CHECK(r.z_score == doctest::Approx(z).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(std::erfc(std::abs(z) / std::sqrt(2.0))).epsilon(1e-9));
    const double observed = (2.0 * alpha2 - 1.0) * nn - (2.0 * static_cast<double>(k) - nn);
    CHECK(r.z_paper == doctest::Approx(observed / std::sqrt(nn)).epsilon(1e-9));
    CHECK(r.paper_ratio == doctest::Approx(2.0 * lambda * (2.0 * alpha2 - 1.0) * std::sqrt(nn)).epsilon(1e-12));
    CHECK(r.single_fluctuation == doctest::Approx(0.5 * std::sqrt(nn)));
  }
}

TEST_CASE("small tables use the exact binomial test") {
  for (auto [k, n] : {std::pair<std::uint64_t, std::uint64_t>{15, 20}, {20, 20}, {3, 10}, {0, 1}, {22, 29}}) {
    CAPTURE(k);
    CAPTURE(n);
    const SignificanceReport r = z_test(table_of(k, n), 0.75, 2e-4);
    CHECK(r.exact_binomial);
    CHECK(r.p_value == doctest::Approx(binomial_p_reference(k, n, 0.75)).epsilon(1e-9));
  }
}

TEST_CASE("two-sample proportion test") {
  CHECK(two_sample_proportion_test(300, 1000, 300, 1000).z == 0.0);
  CHECK(two_sample_proportion_test(300, 1000, 300, 1000).p_value == 1.0);
  // Pooled p = 0.35, se = sqrt(0.35 * 0.65 * 0.002).
  const TwoSampleResult r = two_sample_proportion_test(400, 1000, 300, 1000);
  CHECK(r.z == doctest::Approx(0.1 / std::sqrt(0.35 * 0.65 * 0.002)).epsilon(1e-12));
  CHECK(r.p_value < 1e-5);
  CHECK_THROWS_AS(two_sample_proportion_test(1, 0, 1, 2), DomainError);
}

TEST_CASE("Anderson-Darling statistic") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<double> sample(500);
  for (double& x : sample) x = normal(gen);
  CHECK(anderson_darling_standard_normal(sample) < kAndersonDarlingCritical1pct);
  for (double& x : sample) x += 0.5;
  CHECK(anderson_darling_standard_normal(sample) > kAndersonDarlingCritical1pct);
  CHECK_THROWS_AS(anderson_darling_standard_normal({}), DomainError);
}

TEST_CASE("instantaneous-scenario z scores are standard normal") {
  ModelConfig cfg;
  cfg.scenario = Scenario::Instantaneous;
  cfg.n_trials = 1'000'000;
  const RouteKinematics kin = build_kinematics(cfg);
  std::vector<double> zs;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    cfg.seed = seed;
    zs.push_back(z_test(run_batch(build_trial_config(cfg, kin)), cfg.alpha2, 0.0).z_score);
  }
  CHECK(anderson_darling_standard_normal(zs) < kAndersonDarlingCritical1pct);
}

TEST_CASE("sweep over the state") {
  const double grid[] = {0.5, 0.6, 0.75, 0.9};
  const SweepResult r = significance_sweep(ModelConfig{}, SweepAxis::Alpha2, grid);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.diagnostics.failures == 0);
  CHECK_FALSE(r.rows[0].required.feasible);
  CHECK(r.rows[0].delta_n == 0.0);
  CHECK(r.rows[1].required.n > r.rows[2].required.n);
  CHECK(r.rows[2].required.n > r.rows[3].required.n);
  CHECK(r.diagnostics.required_n_nonincreasing);
  for (const SweepRow& row : r.rows) CHECK(row.seed == 1);
}

TEST_CASE("sweep symmetric about the balanced state with a fixed Lambda") {
  ModelConfig base;
  base.lambda_source = LambdaSource::PaperLiteral;
  const double grid[] = {0.3, 0.7, 0.1, 0.9};
  const SweepResult r = significance_sweep(base, SweepAxis::Alpha2, grid);
  CHECK(r.rows[0].required.n == r.rows[1].required.n);
  CHECK(r.rows[2].required.n == r.rows[3].required.n);
}

TEST_CASE("shrinking the reduction time removes the deviation") {
  const double grid[] = {0.1, 0.05, 0.01, 0.001, 0.0};
  const SweepResult r = significance_sweep(ModelConfig{}, SweepAxis::DeltaT, grid);
  CHECK(r.diagnostics.failures == 0);
  CHECK(r.diagnostics.delta_n_nonincreasing);
  CHECK(r.rows.back().delta_n == 0.0);
  CHECK_FALSE(r.rows.back().required.feasible);
  CHECK(r.rows[3].delta_n < 0.02 * r.rows[0].delta_n);
}

TEST_CASE("zero residual delay barely changes the result") {
  const double grid[] = {0.0, 3.3};
  const SweepResult r = significance_sweep(ModelConfig{}, SweepAxis::DelayT, grid);
  CHECK(r.rows[0].p_less == doctest::Approx(r.rows[1].p_less).epsilon(0.01));
  CHECK(r.rows[0].lambda == doctest::Approx(r.rows[1].lambda).epsilon(0.01));
}

TEST_CASE("sweep failures are recorded per row") {
  const double grid[] = {0.75, 1.5, 0.6};
  const SweepResult r = significance_sweep(ModelConfig{}, SweepAxis::Alpha2, grid);
  CHECK(r.diagnostics.failures == 1);
  CHECK_FALSE(r.rows[1].ok);
  CHECK(r.rows[1].error.find("alpha2") != std::string::npos);
  CHECK(r.rows[2].ok);
  CHECK_THROWS_AS(significance_sweep(ModelConfig{}, SweepAxis::Alpha2, {}), DomainError);
}

TEST_CASE("sweep with Monte Carlo batches") {
  ModelConfig base;
  base.n_trials = 100'000;
  const double grid[] = {1.0, 5.0};
  SweepOptions opts;
  opts.monte_carlo = true;
  const SweepResult r = significance_sweep(base, SweepAxis::LambdaRate, grid, opts);
  REQUIRE(r.rows[0].z.has_value());
  CHECK(std::abs(*r.rows[0].z) < 6.0);
  CHECK(r.rows[0].lambda > r.rows[1].lambda);
}

TEST_CASE("axis names") {
  CHECK(sweep_axis_from_string("T") == SweepAxis::DelayT);
  CHECK(sweep_axis_from_string("delay_T") == SweepAxis::DelayT);
  CHECK(sweep_axis_from_string("lambda_rate") == SweepAxis::LambdaRate);
  CHECK(to_string(SweepAxis::DeltaT) == "delta_t");
  CHECK_THROWS_AS(sweep_axis_from_string("sigma"), ConfigError);
}
