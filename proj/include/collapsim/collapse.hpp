#pragma once

// Kinematic collapse routes. After the first hit the pair state
// alpha|+-> + beta|-+> reduces along route 1 (ends in |+->) or route 2
// (ends in |-+>) over the reduction window dt. Within a route one amplitude
// is doomed (decays to 0) and the other survives (grows to 1); the two are
// tied by |a|^2 + |b|^2 = 1. |++> and |--> never appear.

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "collapsim/rng.hpp"

namespace collapsim {

/// alpha|+-> + beta|-+>. Phases are carried but only magnitudes enter any probability.
class StateAmplitudes {
public:
  /// Real alpha = sqrt(alpha2), beta = sqrt(1 - alpha2). Throws ConfigError unless 0 < alpha2 < 1.
  static StateAmplitudes from_alpha2(double alpha2);
  /// beta = sqrt(1 - |alpha|^2), real. Throws ConfigError unless 0 < |alpha| < 1.
  static StateAmplitudes from_alpha(std::complex<double> alpha);

  std::complex<double> alpha() const noexcept { return alpha_; }
  std::complex<double> beta() const noexcept { return beta_; }
  double alpha2() const noexcept { return alpha2_; }
  double beta2() const noexcept { return 1.0 - alpha2_; }
  double alpha_abs() const noexcept { return std::abs(alpha_); }
  double beta_abs() const noexcept { return std::abs(beta_); }

  /// The state with the roles of |+-> and |-+> exchanged.
  StateAmplitudes swapped() const;

private:
  StateAmplitudes(std::complex<double> a, std::complex<double> b, double a2) : alpha_{a}, beta_{b}, alpha2_{a2} {}
  std::complex<double> alpha_;
  std::complex<double> beta_;
  double alpha2_;
};

/// Normalized decay profile s(x) on x = tau/dt in [0, 1] with s(0)=1, s(1)=0.
struct DecayShape {
  enum class Kind { Exponential, Power };
  Kind kind = Kind::Exponential;
  /// Exponential: rate in units of 1/dt, s = (e^{-r x} - e^{-r}) / (1 - e^{-r}) (r = 0 is the linear limit).
  /// Power: exponent p > 0, s = (1 - x)^p.
  double parameter = 5.0;

  static DecayShape exponential(double rate) { return {Kind::Exponential, rate}; }
  static DecayShape power(double exponent) { return {Kind::Power, exponent}; }

  double operator()(double x) const noexcept;
  void validate() const;
  bool operator==(const DecayShape&) const = default;
};

inline constexpr double kDefaultDecayRate = 5.0; // lambda = 5/dt

namespace family {
/// Independent exponential doomed amplitudes: b1 = beta*s(rate1), a2 = alpha*s(rate2).
struct TwoShapeExponential {
  double rate1 = kDefaultDecayRate;
  double rate2 = kDefaultDecayRate;
};
/// b1 = beta*(1 - x)^exponent1, a2 = alpha*(1 - x)^exponent2.
struct TwoShapeLinear {
  double exponent1 = 1.0;
  double exponent2 = 1.0;
};
/// One shape g for both routes: a2 = alpha*g, b1 = beta*g. Outcome law is exactly Born's.
struct SingleShapeCovariant {
  double rate = kDefaultDecayRate;
};
/// a2 = alpha*s(rate2). Route 1 is an exponential whose rate is calibrated
/// (by analytics) so that the left-right symmetry constraint holds.
struct EffectiveSymmetric {
  double rate2 = kDefaultDecayRate;
  std::optional<double> calibrated_rate1;
};
} // namespace family

using DecayFamily = std::variant<family::TwoShapeExponential, family::TwoShapeLinear, family::SingleShapeCovariant,
                                 family::EffectiveSymmetric>;

std::string_view family_name(const DecayFamily& fam) noexcept;

enum class Route { One = 1, Two = 2 };

/// The four amplitude trajectories a1, b1, a2, b2 over [0, dt], stored as
/// the two doomed shapes plus the initial magnitudes.
class RouteKinematics {
public:
  /// Throws ConfigError for dt < 0, invalid shapes, or an unresolved EffectiveSymmetric.
  static RouteKinematics make(const DecayFamily& fam, const StateAmplitudes& state, double delta_t);

  double delta_t() const noexcept { return delta_t_; }
  const DecayFamily& family() const noexcept { return family_; }
  const DecayShape& doomed_shape(Route r) const noexcept { return r == Route::One ? shape1_ : shape2_; }
  double alpha_abs() const noexcept { return alpha_abs_; }
  double beta_abs() const noexcept { return beta_abs_; }

  /// |b1(tau)| or |a2(tau)| without range checking; tau is clamped to [0, dt].
  double doomed_unchecked(Route r, double tau) const noexcept;
  /// |b1|^2 or |a2|^2, same conventions.
  double doomed_squared_unchecked(Route r, double tau) const noexcept;

private:
  RouteKinematics(DecayFamily fam, double dt, double a, double b, DecayShape s1, DecayShape s2)
      : family_{std::move(fam)}, delta_t_{dt}, alpha_abs_{a}, beta_abs_{b}, shape1_{s1}, shape2_{s2} {}
  DecayFamily family_;
  double delta_t_;
  double alpha_abs_;
  double beta_abs_;
  DecayShape shape1_;
  DecayShape shape2_;
};

/// |b1(tau)| for route 1, |a2(tau)| for route 2. Throws DomainError unless 0 <= tau <= dt.
double doomed_amplitude(const RouteKinematics& kin, Route route, double tau);

/// |a1(tau)| for route 1, |b2(tau)| for route 2: sqrt(1 - doomed^2).
double survivor_amplitude(const RouteKinematics& kin, Route route, double tau);

/// Probability of (+-) when the second hit lands y after the first, |y| < dt:
/// |alpha|^2 |a1(|y|)|^2 + (1 - |alpha|^2) |a2(|y|)|^2.
/// Throws DomainError for |y| >= dt (the completed-collapse branch).
double conditional_plus_minus_prob(const RouteKinematics& kin, const StateAmplitudes& state, double y);

/// Same law with no range check; used by the trial engine after its own |y| < dt test.
double conditional_plus_minus_unchecked(const RouteKinematics& kin, double alpha2, double tau) noexcept;

/// Route 1 with probability |alpha|^2.
Route sample_route(const StateAmplitudes& state, rng::CounterStream& stream);

} // namespace collapsim
