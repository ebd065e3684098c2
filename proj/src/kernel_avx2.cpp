// AVX2 block kernel: four trials per iteration. Mirrors scalar_trial
// operation by operation so both produce identical CountTables. Built with
// -mavx2 (no FMA, no contraction); selected at runtime only when the CPU
// reports AVX2.

#include "kernels.hpp"

#if defined(COLLAPSIM_HAVE_AVX2_KERNEL)
#include <immintrin.h>
#endif

#include <bit>

namespace collapsim::kernels {

#if defined(COLLAPSIM_HAVE_AVX2_KERNEL)

namespace {

struct RoundKeys {
  __m256i k0[rng::kPhiloxRounds];
  __m256i k1[rng::kPhiloxRounds];
};

RoundKeys round_keys(std::uint64_t seed) {
  RoundKeys keys;
  rng::Philox4x32Key k = rng::key_from_seed(seed);
  for (int r = 0; r < rng::kPhiloxRounds; ++r) {
    keys.k0[r] = _mm256_set1_epi64x(k[0]);
    keys.k1[r] = _mm256_set1_epi64x(k[1]);
    k[0] += rng::kPhiloxW0;
    k[1] += rng::kPhiloxW1;
  }
  return keys;
}

// Four Philox4x32 blocks; each 64-bit lane carries one 32-bit word.
struct Block4 {
  __m256i w0, w1, w2, w3;
};

inline Block4 philox4(Block4 c, const RoundKeys& keys) {
  const __m256i m0 = _mm256_set1_epi64x(rng::kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(rng::kPhiloxM1);
  const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  for (int r = 0; r < rng::kPhiloxRounds; ++r) {
    const __m256i p0 = _mm256_mul_epu32(c.w0, m0);
    const __m256i p1 = _mm256_mul_epu32(c.w2, m1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    c = {_mm256_xor_si256(_mm256_xor_si256(hi1, c.w1), keys.k0[r]), _mm256_and_si256(p1, lo32),
         _mm256_xor_si256(_mm256_xor_si256(hi0, c.w3), keys.k1[r]), _mm256_and_si256(p0, lo32)};
  }
  return c;
}

// Exact conversion of integers below 2^52 held in 64-bit lanes.
inline __m256d small_u64_to_double(__m256i v) {
  const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000ll);
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic_bits)), magic);
}

// ((hi << 32 | lo) >> 11) * 2^-53 == (hi * 2^21 + (lo >> 11)) * 2^-53, all exact.
inline __m256d to_unit(__m256i lo, __m256i hi) {
  const __m256d high = _mm256_mul_pd(small_u64_to_double(hi), _mm256_set1_pd(0x1.0p21));
  const __m256d low = small_u64_to_double(_mm256_srli_epi64(lo, 11));
  return _mm256_mul_pd(_mm256_add_pd(high, low), _mm256_set1_pd(0x1.0p-53));
}

inline __m256d log_avx2(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256d e = _mm256_sub_pd(small_u64_to_double(_mm256_srli_epi64(bits, 52)), _mm256_set1_pd(1023.0));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(simd::kMantissaMask))),
                      _mm256_set1_epi64x(static_cast<long long>(simd::kExponentOne))));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(simd::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(simd::kLogSeries[10]);
  for (int k = 9; k >= 0; --k) p = _mm256_add_pd(_mm256_set1_pd(simd::kLogSeries[k]), _mm256_mul_pd(z, p));
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d tail = _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(two_s, z), p),
                                     _mm256_mul_pd(e, _mm256_set1_pd(simd::kLn2Lo)));
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(simd::kLn2Hi)), _mm256_add_pd(two_s, tail));
}

struct SideVec {
  __m256d center, half_sigma, cdf_lo, cdf_span;
};

SideVec side_vec(const SideParams& s) {
  return {_mm256_set1_pd(s.profile.center), _mm256_set1_pd(s.half_sigma), _mm256_set1_pd(s.cdf_lo),
          _mm256_set1_pd(s.cdf_span)};
}

inline __m256d sample4(const SideVec& s, __m256d unit) {
  __m256d u = _mm256_add_pd(s.cdf_lo, _mm256_mul_pd(unit, s.cdf_span));
  u = _mm256_max_pd(u, _mm256_set1_pd(kUniformClamp));
  u = _mm256_min_pd(u, _mm256_set1_pd(1.0 - kUniformClamp));
  const __m256d ratio = _mm256_div_pd(u, _mm256_sub_pd(_mm256_set1_pd(1.0), u));
  return _mm256_add_pd(s.center, _mm256_mul_pd(s.half_sigma, log_avx2(ratio)));
}

} // namespace

bool avx2_compiled() noexcept { return true; }

void sample_avx2(const SideParams& side, const double* units, double* out, std::size_t n) {
  const SideVec s = side_vec(side);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, sample4(s, _mm256_loadu_pd(units + i)));
  for (; i < n; ++i) out[i] = sech2_sample(side, units[i]);
}

void run_block_avx2(const TrialParams& p, std::uint64_t first, std::uint64_t count, CountTable& table) {
  const RoundKeys keys = round_keys(p.seed);
  const SideVec left = side_vec(p.left);
  const SideVec right = side_vec(p.right);
  const __m256d alpha2 = _mm256_set1_pd(p.alpha2);
  const __m256d delta_t = _mm256_set1_pd(p.finite_time ? p.delta_t : 0.0);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  const __m256i lane_offsets = _mm256_set_epi64x(3, 2, 1, 0);
  const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i zero = _mm256_setzero_si256();
  const __m256i stream_outcome = _mm256_set1_epi64x(static_cast<long long>(rng::TrialStream::Outcome));

  std::uint64_t pm = 0;
  std::uint64_t done = 0;
  CountTable nontrivial;
  std::uint64_t i = first;
  const std::uint64_t end = first + count;
  for (; i + 4 <= end; i += 4) {
    const __m256i idx = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(i)), lane_offsets);
    const __m256i idx_lo = _mm256_and_si256(idx, lo32);
    const __m256i idx_hi = _mm256_srli_epi64(idx, 32);

    const Block4 hits = philox4({idx_lo, idx_hi, zero, zero}, keys);
    const Block4 draws = philox4({idx_lo, idx_hi, stream_outcome, zero}, keys);

    const __m256d t_left = sample4(left, to_unit(hits.w0, hits.w1));
    const __m256d t_right = sample4(right, to_unit(hits.w2, hits.w3));
    const __m256d y = _mm256_sub_pd(t_left, t_right);
    const __m256d u_first = to_unit(draws.w0, draws.w1);

    const int nt_mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_and_pd(y, abs_mask), delta_t, _CMP_LT_OQ));
    const int pm_mask = _mm256_movemask_pd(_mm256_cmp_pd(u_first, alpha2, _CMP_LT_OQ)) & ~nt_mask;
    pm += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(pm_mask)));
    done += 4;

    if (nt_mask != 0) {
      alignas(32) double ys[4];
      alignas(32) double u1[4];
      _mm256_store_pd(ys, y);
      _mm256_store_pd(u1, u_first);
      const __m256d u_second = to_unit(draws.w2, draws.w3);
      alignas(32) double u2[4];
      _mm256_store_pd(u2, u_second);
      for (int lane = 0; lane < 4; ++lane) {
        if (nt_mask & (1 << lane)) resolve_nontrivial(p, ys[lane], u1[lane], u2[lane], nontrivial);
      }
    }
  }

  // The trivial branch never touches the non-trivial tallies.
  const std::uint64_t trivial = done - nontrivial.n_nontrivial;
  table.n_total += done;
  table.n_pm += pm;
  table.n_mp += trivial - pm;
  table += CountTable{nontrivial.n_pm, nontrivial.n_mp, nontrivial.n_nontrivial, nontrivial.n_route1,
                      nontrivial.n_route2, nontrivial.n_left_first, 0};

  for (; i < end; ++i) scalar_trial(p, i, table);
}

#else

bool avx2_compiled() noexcept { return false; }

void sample_avx2(const SideParams& side, const double* units, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = sech2_sample(side, units[i]);
}

void run_block_avx2(const TrialParams& p, std::uint64_t first, std::uint64_t count, CountTable& table) {
  run_block_scalar(p, first, count, table);
}

#endif

} // namespace collapsim::kernels
