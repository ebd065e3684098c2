#include "collapsim/model.hpp"

#include <cmath>
#include <string>

#include "collapsim/errors.hpp"

namespace collapsim {

std::string_view to_string(LambdaSource s) noexcept {
  return s == LambdaSource::Analytics ? "analytics" : "paper_literal";
}

LambdaSource lambda_source_from_string(std::string_view name) {
  if (name == "analytics") return LambdaSource::Analytics;
  if (name == "paper_literal") return LambdaSource::PaperLiteral;
  throw ConfigError("unknown lambda_source '" + std::string(name) + "' (expected analytics or paper_literal)");
}

std::string_view to_string(FamilyKind f) noexcept {
  switch (f) {
  case FamilyKind::TwoShapeExponential:
    return "two_shape_exponential";
  case FamilyKind::TwoShapeLinear:
    return "two_shape_linear";
  case FamilyKind::SingleShapeCovariant:
    return "single_shape_covariant";
  case FamilyKind::EffectiveSymmetric:
    return "effective_symmetric";
  }
  return "effective_symmetric";
}

FamilyKind family_kind_from_string(std::string_view name) {
  for (FamilyKind f : {FamilyKind::TwoShapeExponential, FamilyKind::TwoShapeLinear, FamilyKind::SingleShapeCovariant,
                       FamilyKind::EffectiveSymmetric}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

StateAmplitudes ModelConfig::state() const { return StateAmplitudes::from_alpha2(alpha2); }

ExperimentGeometry ModelConfig::geometry() const {
  ExperimentGeometry g = ExperimentGeometry::centered({profile, sigma_t, 0.0}, delay_T, window_dt);
  if (window_origin) g.window_origin = *window_origin;
  return g;
}

analytics::CoincidenceInputs ModelConfig::inputs() const { return {geometry(), delta_t}; }

DecayFamily ModelConfig::decay_family() const {
  switch (family) {
  case FamilyKind::TwoShapeExponential:
    return family::TwoShapeExponential{lambda1, lambda2};
  case FamilyKind::TwoShapeLinear:
    return family::TwoShapeLinear{exponent1, exponent2};
  case FamilyKind::SingleShapeCovariant:
    return family::SingleShapeCovariant{lambda2};
  case FamilyKind::EffectiveSymmetric:
    return family::EffectiveSymmetric{lambda2, std::nullopt};
  }
  return family::EffectiveSymmetric{lambda2, std::nullopt};
}

void ModelConfig::validate() const {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw ConfigError("alpha2: must satisfy 0 < alpha2 < 1");
  if (!std::isfinite(sigma_t) || sigma_t <= 0.0) throw ConfigError("sigma_t: must be > 0");
  if (!std::isfinite(delay_T)) throw ConfigError("delay_T: must be finite");
  if (!std::isfinite(window_dt) || window_dt <= 0.0) throw ConfigError("window_dt: must be > 0");
  if (window_origin && !std::isfinite(*window_origin)) throw ConfigError("window_origin: must be finite");
  if (!std::isfinite(delta_t) || delta_t < 0.0) throw ConfigError("delta_t: must be >= 0");
  if (!(delta_t < window_dt)) throw ConfigError("delta_t: must be smaller than window_dt");
  for (auto [name, rate] : {std::pair{"lambda1", lambda1}, std::pair{"lambda2", lambda2}}) {
    if (!std::isfinite(rate) || std::abs(rate) > 700.0) {
      throw ConfigError(std::string(name) + ": decay rate must satisfy |rate| <= 700 (units of 1/delta_t)");
    }
  }
  for (auto [name, p] : {std::pair{"exponent1", exponent1}, std::pair{"exponent2", exponent2}}) {
    if (!std::isfinite(p) || p <= 0.0) throw ConfigError(std::string(name) + ": must be > 0");
  }
  if (n_trials < 1) throw ConfigError("n_trials: must be >= 1");
  const ExperimentGeometry g = geometry();
  const HitWindow w = g.window();
  if (!(mass_between(g.left(), w.lower(), w.upper()) >= 1e-12) ||
      !(mass_between(g.right(), w.lower(), w.upper()) >= 1e-12)) {
    throw ConfigError("window_origin: hit window carries negligible pulse mass");
  }
}

RouteKinematics build_kinematics(const ModelConfig& cfg, analytics::BandDomain domain) {
  return analytics::resolve_kinematics(cfg.decay_family(), cfg.state(), cfg.inputs(), domain);
}

TrialConfig build_trial_config(const ModelConfig& cfg, const RouteKinematics& kin) {
  TrialConfig t{cfg.state(), cfg.geometry(), kin, cfg.scenario, cfg.n_trials, cfg.seed};
  t.validate();
  return t;
}

} // namespace collapsim
