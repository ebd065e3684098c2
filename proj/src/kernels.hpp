#pragma once

// Block kernels behind run_batch. Internal to the library.

#include <cstddef>
#include <cstdint>

#include "collapsim/counts.hpp"
#include "collapsim/montecarlo.hpp"
#include "collapsim/rng.hpp"
#include "collapsim/simd/log.hpp"

namespace collapsim::kernels {

struct SideParams {
  PulseProfile profile;
  double half_sigma = 0.0; // sigma_t / 2
  double cdf_lo = 0.0;
  double cdf_span = 0.0;
};

struct TrialParams {
  SideParams left;
  SideParams right;
  double alpha2 = 0.0;
  double delta_t = 0.0;
  bool finite_time = true;
  std::uint64_t seed = 0;
  const RouteKinematics* kinematics = nullptr;
};

TrialParams make_params(const TrialConfig& config);

/// Sech^2 inverse transform used by both kernels:
/// t = c + (sigma/2) log(u / (1 - u)), u clamped to [eps, 1 - eps].
inline double sech2_sample(const SideParams& side, double unit) noexcept {
  double u = side.cdf_lo + unit * side.cdf_span;
  u = u < kUniformClamp ? kUniformClamp : u;
  u = u > 1.0 - kUniformClamp ? 1.0 - kUniformClamp : u;
  return side.profile.center + side.half_sigma * simd::log_portable(u / (1.0 - u));
}

inline double side_sample(const SideParams& side, double unit) {
  if (side.profile.shape == ProfileShape::Sech2) return sech2_sample(side, unit);
  return truncated_quantile(side.profile, side.cdf_lo, side.cdf_lo + side.cdf_span, unit);
}

/// Outcome of an interrupted reduction; shared by every kernel.
inline void resolve_nontrivial(const TrialParams& p, double y, double u_route, double u_outcome, CountTable& table,
                               TrialOutcome* record = nullptr) noexcept {
  const Route route = u_route < p.alpha2 ? Route::One : Route::Two;
  const double tau = y < 0.0 ? -y : y;
  const double doomed_sq = p.kinematics->doomed_squared_unchecked(route, tau);
  // Route 1 ends in |+->: (+-) with |a1|^2. Route 2 ends in |-+>: (+-) with |a2|^2.
  const double p_pm = route == Route::One ? 1.0 - doomed_sq : doomed_sq;
  const bool pm = u_outcome < p_pm;
  ++table.n_nontrivial;
  ++(route == Route::One ? table.n_route1 : table.n_route2);
  if (y < 0.0) ++table.n_left_first;
  ++(pm ? table.n_pm : table.n_mp);
  if (record) {
    record->route = route;
    record->plus_minus = pm;
  }
}

/// Full trial in scalar arithmetic; the reference for every kernel.
inline void scalar_trial(const TrialParams& p, std::uint64_t index, CountTable& table,
                         TrialOutcome* record = nullptr) {
  const rng::UniformPair hits = rng::trial_uniforms(p.seed, index, rng::TrialStream::HitTimes);
  const rng::UniformPair draws = rng::trial_uniforms(p.seed, index, rng::TrialStream::Outcome);
  const double t_left = side_sample(p.left, hits.first);
  const double t_right = side_sample(p.right, hits.second);
  const double y = t_left - t_right;
  const double abs_y = y < 0.0 ? -y : y;
  ++table.n_total;
  if (record) {
    record->t_left = t_left;
    record->t_right = t_right;
    record->y = y;
    record->left_first = y < 0.0;
  }
  if (p.finite_time && abs_y < p.delta_t) {
    if (record) record->nontrivial = true;
    resolve_nontrivial(p, y, draws.first, draws.second, table, record);
    return;
  }
  const bool pm = draws.first < p.alpha2;
  ++(pm ? table.n_pm : table.n_mp);
  if (record) record->plus_minus = pm;
}

void run_block_scalar(const TrialParams& p, std::uint64_t first, std::uint64_t count, CountTable& table);

/// Requires Sech2 profiles on both sides and a CPU with AVX2.
void run_block_avx2(const TrialParams& p, std::uint64_t first, std::uint64_t count, CountTable& table);

/// sech2_sample over an array, four lanes at a time.
void sample_avx2(const SideParams& side, const double* units, double* out, std::size_t n);

bool avx2_compiled() noexcept;

} // namespace collapsim::kernels
