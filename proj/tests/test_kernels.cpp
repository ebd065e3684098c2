#include "doctest.h"

#include <bit>
#include <cmath>
#include <vector>

#include "../src/kernels.hpp"
#include "collapsim/analytics.hpp"
#include "collapsim/montecarlo.hpp"

using namespace collapsim;

namespace {

TrialConfig make_config(double sigma, double delay, double window, double dt, Scenario scenario,
                        const DecayFamily& fam, double alpha2, std::uint64_t n, std::uint64_t seed) {
  const StateAmplitudes s = StateAmplitudes::from_alpha2(alpha2);
  const auto geometry = ExperimentGeometry::centered({ProfileShape::Sech2, sigma, 0.0}, delay, window);
  return {s, geometry, RouteKinematics::make(fam, s, dt), scenario, n, seed};
}

} // namespace

TEST_CASE("avx2 hit-time sampling is bit-identical to the scalar reference") {
  if (!avx2_available()) return;
  const auto cfg = make_config(1000, 3.3, 1e6, 0.1, Scenario::FiniteTime, family::TwoShapeExponential{}, 0.75, 1, 1);
  const kernels::TrialParams p = kernels::make_params(cfg);
  std::vector<double> units;
  for (std::uint64_t i = 0; i < 100003; ++i) units.push_back(rng::trial_uniforms(17, i, rng::TrialStream::HitTimes).first);
  for (double edge : {0.0, 1e-300, 1e-16, 0.5, 1.0 - 0x1p-53}) units.push_back(edge);
  std::vector<double> vec(units.size());
  kernels::sample_avx2(p.left, units.data(), vec.data(), units.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    mismatches += std::bit_cast<std::uint64_t>(vec[i]) != std::bit_cast<std::uint64_t>(kernels::sech2_sample(p.left, units[i]));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("avx2 and scalar kernels produce identical count tables") {
  if (!avx2_available()) return;
  const std::vector<TrialConfig> configs{
      make_config(1000, 3.3, 1e6, 0.1, Scenario::FiniteTime, family::TwoShapeExponential{5, 5}, 0.75, 1'000'003, 1),
      // Wide reduction window: most trials take the non-trivial branch.
      make_config(10, 3.3, 100, 8.0, Scenario::FiniteTime, family::TwoShapeExponential{2, 7}, 0.6, 200'001, 9),
      make_config(10, 0.0, 40, 4.0, Scenario::FiniteTime, family::TwoShapeLinear{0.5, 2}, 0.3, 100'002, 123456789),
      make_config(1000, 3.3, 1e6, 0.1, Scenario::Instantaneous, family::SingleShapeCovariant{}, 0.75, 300'000, 5),
      make_config(1, 0.0, 2e-6, 1e-7, Scenario::FiniteTime, family::SingleShapeCovariant{}, 0.75, 50'001, 77),
  };
  for (const TrialConfig& cfg : configs) {
    CAPTURE(cfg.seed);
    const CountTable scalar = run_range(cfg, 0, cfg.n_trials, KernelKind::Scalar);
    const CountTable avx = run_range(cfg, 0, cfg.n_trials, KernelKind::Avx2);
    CHECK(scalar == avx);
    CHECK(scalar.consistent());
    // Ranges that do not start on a multiple of four.
    CHECK(run_range(cfg, 3, 1001, KernelKind::Scalar) == run_range(cfg, 3, 1001, KernelKind::Avx2));
  }
  CHECK(configs[1].n_trials > 0);
  CHECK(run_range(configs[1], 0, configs[1].n_trials, KernelKind::Scalar).n_nontrivial > 50'000);
}

TEST_CASE("trial indices beyond 2^32 agree between kernels") {
  if (!avx2_available()) return;
  const auto cfg = make_config(10, 0.0, 100, 5.0, Scenario::FiniteTime, family::TwoShapeExponential{1, 3}, 0.75, 1, 3);
  const std::uint64_t first = (1ull << 32) - 13;
  CHECK(run_range(cfg, first, 4097, KernelKind::Scalar) == run_range(cfg, first, 4097, KernelKind::Avx2));
}

TEST_CASE("kernel selection") {
  CHECK(resolve_kernel(KernelKind::Scalar, ProfileShape::Sech2) == KernelKind::Scalar);
  CHECK(resolve_kernel(KernelKind::Avx2, ProfileShape::Gaussian) == KernelKind::Scalar);
  CHECK(resolve_kernel(KernelKind::Auto, ProfileShape::Sech2) == (avx2_available() ? KernelKind::Avx2 : KernelKind::Scalar));
  CHECK(kernel_kind_from_string("avx2") == KernelKind::Avx2);
  CHECK(to_string(KernelKind::Auto) == "auto");
}
