#include "collapsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "collapsim/errors.hpp"
#include "kernels.hpp"

namespace collapsim {

namespace kernels {

TrialParams make_params(const TrialConfig& config) {
  const HitWindow w = config.geometry.window();
  auto side = [&](const PulseProfile& profile) {
    if (!(mass_between(profile, w.lower(), w.upper()) >= 1e-12)) {
      throw ConfigError("hit window carries negligible mass of a pulse profile");
    }
    SideParams s;
    s.profile = profile;
    s.half_sigma = 0.5 * profile.sigma_t;
    s.cdf_lo = cdf_at(profile, w.lower());
    s.cdf_span = cdf_at(profile, w.upper()) - s.cdf_lo;
    return s;
  };
  TrialParams p;
  p.left = side(config.geometry.left());
  p.right = side(config.geometry.right());
  p.alpha2 = config.state.alpha2();
  p.delta_t = config.kinematics.delta_t();
  p.finite_time = config.scenario == Scenario::FiniteTime;
  p.seed = config.seed;
  p.kinematics = &config.kinematics;
  return p;
}

void run_block_scalar(const TrialParams& p, std::uint64_t first, std::uint64_t count, CountTable& table) {
  for (std::uint64_t i = first; i < first + count; ++i) scalar_trial(p, i, table);
}

} // namespace kernels

std::string_view to_string(Scenario s) noexcept {
  return s == Scenario::Instantaneous ? "instantaneous" : "finite_time";
}

Scenario scenario_from_string(std::string_view name) {
  if (name == "instantaneous") return Scenario::Instantaneous;
  if (name == "finite_time") return Scenario::FiniteTime;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected instantaneous or finite_time)");
}

std::string_view to_string(KernelKind k) noexcept {
  switch (k) {
  case KernelKind::Auto:
    return "auto";
  case KernelKind::Scalar:
    return "scalar";
  case KernelKind::Avx2:
    return "avx2";
  }
  return "auto";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "auto") return KernelKind::Auto;
  if (name == "scalar") return KernelKind::Scalar;
  if (name == "avx2") return KernelKind::Avx2;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected auto, scalar or avx2)");
}

bool avx2_available() noexcept {
#if defined(COLLAPSIM_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
  static const bool available = kernels::avx2_compiled() && __builtin_cpu_supports("avx2");
  return available;
#else
  return false;
#endif
}

KernelKind resolve_kernel(KernelKind requested, ProfileShape shape) noexcept {
  if (requested == KernelKind::Scalar) return KernelKind::Scalar;
  if (shape == ProfileShape::Sech2 && avx2_available()) return KernelKind::Avx2;
  return KernelKind::Scalar;
}

void TrialConfig::validate() const {
  geometry.validate();
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (!(kinematics.delta_t() < geometry.window_dt)) throw ConfigError("delta_t must be smaller than window_dt");
  if (std::abs(kinematics.alpha_abs() - state.alpha_abs()) > 1e-12) {
    throw ConfigError("kinematics were built for a different state");
  }
}

TrialOutcome run_trial(const TrialConfig& config, std::uint64_t trial_index) {
  const kernels::TrialParams p = kernels::make_params(config);
  CountTable scratch;
  TrialOutcome out;
  kernels::scalar_trial(p, trial_index, scratch, &out);
  return out;
}

CountTable run_range(const TrialConfig& config, std::uint64_t first, std::uint64_t count, KernelKind kernel) {
  const kernels::TrialParams p = kernels::make_params(config);
  CountTable table;
  const KernelKind k = resolve_kernel(kernel, config.geometry.base.shape);
  if (k == KernelKind::Avx2) {
    kernels::run_block_avx2(p, first, count, table);
  } else {
    kernels::run_block_scalar(p, first, count, table);
  }
  return table;
}

CountTable run_batch(const TrialConfig& config, const BatchOptions& opts) {
  config.validate();
  const unsigned partitions = std::max(1u, opts.partitions);
  unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, partitions);

  const kernels::TrialParams params = kernels::make_params(config);
  const KernelKind kernel = resolve_kernel(opts.kernel, config.geometry.base.shape);
  const std::uint64_t n = config.n_trials;

  std::vector<CountTable> tables(partitions);
  std::atomic<unsigned> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (unsigned part = next++; part < partitions; part = next++) {
      const std::uint64_t lo = n / partitions * part + std::min<std::uint64_t>(part, n % partitions);
      const std::uint64_t hi = n / partitions * (part + 1) + std::min<std::uint64_t>(part + 1, n % partitions);
      try {
        CountTable t;
        if (kernel == KernelKind::Avx2) {
          kernels::run_block_avx2(params, lo, hi - lo, t);
        } else {
          kernels::run_block_scalar(params, lo, hi - lo, t);
        }
        tables[part] = t;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  CountTable total;
  for (const CountTable& t : tables) total += t;
  return total;
}

ProportionEstimate wilson_interval(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0) throw DomainError("proportion estimate needs at least one trial");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 0.5 + 0.5 * confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2n = z * z / nn;
  const double center = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / nn + 0.25 * z2n / nn);
  const double lower = k == 0 ? 0.0 : std::max(0.0, center - half);
  const double upper = k == n ? 1.0 : std::min(1.0, center + half);
  return {p, lower, upper};
}

ProbabilityEstimates estimate_probabilities(const CountTable& table, double confidence) {
  return {wilson_interval(table.n_pm, table.n_total, confidence),
          wilson_interval(table.n_nontrivial, table.n_total, confidence), confidence};
}

} // namespace collapsim
