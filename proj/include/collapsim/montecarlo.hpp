#pragma once

// Trial engine. A trial samples both hit times from the window-truncated
// profiles, then draws the (+-)/(-+) outcome either from Born's rule or,
// when the second hit interrupts an ongoing reduction, from the route law.
//
// Every random number a trial consumes comes from the Philox counter
// (seed, trial index, stream), so a batch's CountTable is a function of
// (config, seed) alone, independent of partitioning and of which kernel
// (scalar or AVX2) executed it.

#include <cstdint>
#include <optional>
#include <string_view>

#include "collapsim/collapse.hpp"
#include "collapsim/counts.hpp"
#include "collapsim/profiles.hpp"

namespace collapsim {

enum class Scenario { Instantaneous, FiniteTime };

std::string_view to_string(Scenario s) noexcept;
Scenario scenario_from_string(std::string_view name);

struct TrialConfig {
  StateAmplitudes state;
  ExperimentGeometry geometry;
  RouteKinematics kinematics;
  Scenario scenario = Scenario::FiniteTime;
  std::uint64_t n_trials = 10'000'000;
  std::uint64_t seed = 1;

  /// Re-checks component invariants. Throws ConfigError.
  void validate() const;
};

struct TrialOutcome {
  double t_left = 0.0;
  double t_right = 0.0;
  double y = 0.0; ///< t_left - t_right
  bool nontrivial = false;
  std::optional<Route> route; ///< only for non-trivial trials
  bool plus_minus = false;
  bool left_first = false;
};

enum class KernelKind { Auto, Scalar, Avx2 };

std::string_view to_string(KernelKind k) noexcept;
KernelKind kernel_kind_from_string(std::string_view name);

/// True when the AVX2 kernel was compiled in and the CPU supports it.
bool avx2_available() noexcept;

/// Kernel that run_batch would use for this config. Requesting Avx2 on a
/// machine or profile it cannot serve falls back to Scalar.
KernelKind resolve_kernel(KernelKind requested, ProfileShape shape) noexcept;

/// One trial through the scalar reference path.
TrialOutcome run_trial(const TrialConfig& config, std::uint64_t trial_index);

struct BatchOptions {
  unsigned partitions = 1; ///< contiguous trial ranges, merged by addition
  unsigned threads = 0;    ///< 0: hardware concurrency, capped at partitions
  KernelKind kernel = KernelKind::Auto;
};

/// Runs trials [0, n_trials). Any failure propagates as an exception; no
/// partial table is returned.
CountTable run_batch(const TrialConfig& config, const BatchOptions& opts = {});

/// Runs trials [first, first + count) on one thread with the given kernel.
CountTable run_range(const TrialConfig& config, std::uint64_t first, std::uint64_t count,
                     KernelKind kernel = KernelKind::Auto);

struct ProportionEstimate {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct ProbabilityEstimates {
  ProportionEstimate plus_minus;
  ProportionEstimate nontrivial;
  double confidence = 0.95;
};

/// Wilson score interval for k successes in n trials. Throws DomainError for n = 0.
ProportionEstimate wilson_interval(std::uint64_t k, std::uint64_t n, double confidence);

/// Point estimates and Wilson intervals for the (+-) and non-trivial rates.
ProbabilityEstimates estimate_probabilities(const CountTable& table, double confidence = 0.95);

} // namespace collapsim
