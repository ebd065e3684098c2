#pragma once

// Temporal intensity profiles of the detected photons. A profile doubles as
// the probability density of the hit time. All times are femtoseconds.

#include <string_view>

#include "collapsim/rng.hpp"

namespace collapsim {

enum class ProfileShape { Sech2, Gaussian };

std::string_view to_string(ProfileShape shape) noexcept;
ProfileShape profile_shape_from_string(std::string_view name);

struct PulseProfile {
  ProfileShape shape = ProfileShape::Sech2;
  double sigma_t = 1000.0; ///< width; for Gaussian the standard deviation
  double center = 0.0;

  /// Throws ConfigError unless sigma_t is finite and positive and center is finite.
  void validate() const;
};

/// Closed interval [origin, origin + width] in which hits may occur.
struct HitWindow {
  double origin = 0.0;
  double width = 0.0;

  double lower() const noexcept { return origin; }
  double upper() const noexcept { return origin + width; }
};

double pdf_at(const PulseProfile& profile, double t) noexcept;
double cdf_at(const PulseProfile& profile, double t) noexcept;

/// Upper tail 1 - cdf, evaluated without cancellation.
double ccdf_at(const PulseProfile& profile, double t) noexcept;

/// cdf(hi) - cdf(lo) evaluated without catastrophic cancellation for
/// narrow intervals and far tails. Returns 0 when hi <= lo.
double mass_between(const PulseProfile& profile, double lo, double hi) noexcept;

/// Inverse CDF. Throws DomainError unless 0 < u < 1.
double quantile(const PulseProfile& profile, double u);

/// Smallest and largest uniform values fed to a quantile during sampling.
inline constexpr double kUniformClamp = 1e-15;

/// Draw from the profile restricted and renormalized to the window, by
/// inverse transform of a uniform rescaled to [cdf(lo), cdf(hi)].
/// Throws ConfigError when the window carries less than 1e-12 of the mass.
double sample_hit_time(const PulseProfile& profile, const HitWindow& window, rng::CounterStream& stream);

/// Inverse-transform step shared by every sampler: maps a unit draw into
/// [cdf_lo, cdf_hi], clamps it away from 0 and 1, and inverts.
double truncated_quantile(const PulseProfile& profile, double cdf_lo, double cdf_hi, double unit);

/// Left/right pulse pair with residual delay and measurement window.
///
/// The right pulse is the left pulse shifted by delay_T, so
/// pdf(right(), t) == pdf(left(), t - delay_T). The hit window defaults to
/// [m - window_dt/2, m + window_dt/2] with m the midpoint of the two centres.
struct ExperimentGeometry {
  PulseProfile base;
  double delay_T = 3.3;
  double window_dt = 1.0e6;
  double window_origin = 0.0;

  static ExperimentGeometry centered(PulseProfile base, double delay_T, double window_dt);

  PulseProfile left() const noexcept { return base; }
  PulseProfile right() const noexcept {
    PulseProfile shifted = base;
    shifted.center = base.center + delay_T;
    return shifted;
  }
  HitWindow window() const noexcept { return {window_origin, window_dt}; }

  /// Throws ConfigError on invalid profile, non-finite delay, or window_dt <= 0.
  void validate() const;
};

} // namespace collapsim
