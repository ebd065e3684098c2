#pragma once

// Flat description of one experiment configuration and the builders that
// turn it into the component types. Defaults are the worked example: a
// sech^2 pulse of 1 ps, 3.3 fs residual delay, 1 ns window, 0.1 fs
// reduction time and alpha = sqrt(3)/2.

#include <cstdint>
#include <optional>
#include <string_view>

#include "collapsim/analytics.hpp"
#include "collapsim/collapse.hpp"
#include "collapsim/montecarlo.hpp"
#include "collapsim/profiles.hpp"

namespace collapsim {

enum class LambdaSource { Analytics, PaperLiteral };

std::string_view to_string(LambdaSource s) noexcept;
LambdaSource lambda_source_from_string(std::string_view name);

enum class FamilyKind { TwoShapeExponential, TwoShapeLinear, SingleShapeCovariant, EffectiveSymmetric };

std::string_view to_string(FamilyKind f) noexcept;
FamilyKind family_kind_from_string(std::string_view name);

struct ModelConfig {
  double alpha2 = 0.75;
  ProfileShape profile = ProfileShape::Sech2;
  double sigma_t = 1000.0;  // fs
  double delay_T = 3.3;     // fs
  double window_dt = 1.0e6; // fs
  std::optional<double> window_origin; // fs; default centres the window on the pulse pair
  double delta_t = 0.1;     // fs
  Scenario scenario = Scenario::FiniteTime;
  FamilyKind family = FamilyKind::EffectiveSymmetric;
  double lambda1 = kDefaultDecayRate; // units of 1/delta_t
  double lambda2 = kDefaultDecayRate;
  double exponent1 = 1.0;
  double exponent2 = 1.0;
  std::uint64_t n_trials = 10'000'000;
  std::uint64_t seed = 1;
  LambdaSource lambda_source = LambdaSource::Analytics;
  KernelKind kernel = KernelKind::Auto;

  bool operator==(const ModelConfig&) const = default;

  StateAmplitudes state() const;
  ExperimentGeometry geometry() const;
  analytics::CoincidenceInputs inputs() const;
  DecayFamily decay_family() const;

  /// Checks every component invariant. Throws ConfigError naming the field.
  void validate() const;
};

/// Kinematics for the configured family; EffectiveSymmetric is calibrated
/// against the given integration domain.
RouteKinematics build_kinematics(const ModelConfig& cfg,
                                 analytics::BandDomain domain = analytics::BandDomain::CoincidenceFormula);

TrialConfig build_trial_config(const ModelConfig& cfg, const RouteKinematics& kin);

} // namespace collapsim
