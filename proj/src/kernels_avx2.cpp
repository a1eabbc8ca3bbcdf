// AVX2 variants of the pairwise/weighted log kernels. This translation unit
// is the only one compiled with -mavx2; callers reach it through the
// dispatch table in kernels.cpp. The vector log uses an exponent/mantissa
// split with an atanh-form odd polynomial; lanes outside the normal range
// (zero, subnormal, negative, non-finite) fall back to std::log so edge
// semantics (log 0 = -inf) match the scalar reference exactly.

#include "fplab/kernels.hpp"

#include <cfloat>
#include <cmath>

#if defined(__AVX2__)
#include <immintrin.h>

namespace fplab::kernels::avx2 {

bool available() {
#if defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return true;
#endif
}

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;  // high 32-bit-exact part
constexpr double kLn2Lo = 1.90821492927058770002e-10;  // remainder of log(2)
constexpr double kSqrt2 = 1.41421356237309514547e+00;

// log of 4 strictly-normal positive doubles (caller screens other lanes).
inline __m256d log4_normal(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_raw =
      _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7FF));
  // int64 -> double via the 2^52 magic-number trick (values fit in 11 bits)
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_raw, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // keep m in [sqrt2/2, sqrt2) so the series argument stays small
  const __m256d too_big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), too_big);
  e = _mm256_add_pd(e, _mm256_and_pd(too_big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d r =
      _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d r2 = _mm256_mul_pd(r, r);

  // 2*atanh(r) = 2r * (1 + r^2/3 + r^4/5 + ... + r^14/15), |r| < 0.1716
  __m256d p = _mm256_set1_pd(1.0 / 15.0);
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 3.0));
  const __m256d two_r = _mm256_add_pd(r, r);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_r, r2), p, two_r);

  // e*ln2_hi + (e*ln2_lo + log m), keeping the small parts together
  const __m256d lo = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), log_m);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi), lo);
}

// true when any lane needs the scalar fallback (not a normal positive double)
inline bool needs_fixup(__m256d x) {
  const __m256d lo = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_NGE_UQ);
  const __m256d hi = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MAX), _CMP_GT_OQ);
  return _mm256_movemask_pd(_mm256_or_pd(lo, hi)) != 0;
}

inline double hsum_ordered(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

// sum of log over 4 lanes with fallback screening, added as one group
inline double log4_group_sum(__m256d x) {
  if (needs_fixup(x)) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, x);
    return ((std::log(lane[0]) + std::log(lane[1])) +
            (std::log(lane[2]) + std::log(lane[3])));
  }
  return hsum_ordered(log4_normal(x));
}

inline __m256d abs4(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

double sum_log_abs_diff_pairs(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    double row = 0.0;
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const __m256d d = abs4(_mm256_sub_pd(xi, _mm256_loadu_pd(x + j)));
      row += log4_group_sum(d);
    }
    for (; j < n; ++j) row += std::log(std::fabs(x[i] - x[j]));
    total += row;
  }
  return total;
}

double sum_log_plus_all(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const __m256d xa = _mm256_set1_pd(x[a]);
    double row = 0.0;
    std::size_t b = 0;
    for (; b + 4 <= n; b += 4) {
      const __m256d s = _mm256_add_pd(xa, _mm256_loadu_pd(x + b));
      row += log4_group_sum(s);
    }
    for (; b < n; ++b) row += std::log(x[a] + x[b]);
    total += row;
  }
  return total;
}

double weighted_log_row(double s, const double* t, const double* w, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  double acc = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = abs4(_mm256_sub_pd(sv, _mm256_loadu_pd(t + j)));
    const __m256d wv = _mm256_loadu_pd(w + j);
    if (needs_fixup(d)) {
      alignas(32) double lane[4];
      _mm256_store_pd(lane, d);
      acc += ((w[j] * std::log(lane[0]) + w[j + 1] * std::log(lane[1])) +
              (w[j + 2] * std::log(lane[2]) + w[j + 3] * std::log(lane[3])));
    } else {
      acc += hsum_ordered(_mm256_mul_pd(wv, log4_normal(d)));
    }
  }
  for (; j < n; ++j) acc += w[j] * std::log(std::fabs(s - t[j]));
  return acc;
}

}  // namespace fplab::kernels::avx2

#else  // !__AVX2__

namespace fplab::kernels::avx2 {
bool available() { return false; }
double sum_log_abs_diff_pairs(const double* x, std::size_t n) {
  return scalar::sum_log_abs_diff_pairs(x, n);
}
double sum_log_plus_all(const double* x, std::size_t n) {
  return scalar::sum_log_plus_all(x, n);
}
double weighted_log_row(double s, const double* t, const double* w, std::size_t n) {
  return scalar::weighted_log_row(s, t, w, n);
}
}  // namespace fplab::kernels::avx2

#endif
