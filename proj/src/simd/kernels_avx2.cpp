#include <immintrin.h>

#include "gridscale/simd/kernels.hpp"

namespace gridscale::simd::avx2 {

double max_abs(const double* v, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(v + i)), acc);
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double m = 0.0;
  for (double x : lane) m = x > m ? x : m;
  for (; i < n; ++i) {
    double a = v[i] < 0 ? -v[i] : v[i];
    m = a > m ? a : m;
  }
  return m;
}

namespace {

inline __m256d level(__m256d k, __m256d two, __m256d bins, __m256d one, __m256d m) {
  return _mm256_mul_pd(_mm256_sub_pd(_mm256_div_pd(_mm256_mul_pd(two, k), bins), one), m);
}

}  // namespace

void discretize(const double* v, std::size_t n, double m, int bins, std::int32_t* out) {
  if (m == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = bins / 2;
    return;
  }
  const __m256d vb = _mm256_set1_pd(bins);
  const __m256d vhalf = _mm256_set1_pd(0.5 * bins);
  const __m256d vtop = _mm256_set1_pd(bins - 1.0);
  const __m256d vm = _mm256_set1_pd(m);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    __m256d k = _mm256_floor_pd(_mm256_mul_pd(_mm256_add_pd(_mm256_div_pd(x, vm), one), vhalf));
    k = _mm256_min_pd(_mm256_max_pd(k, zero), vtop);
    __m256d too_high = _mm256_cmp_pd(level(k, two, vb, one, vm), x, _CMP_GT_OQ);
    k = _mm256_blendv_pd(k, _mm256_max_pd(_mm256_sub_pd(k, one), zero), too_high);
    __m256d up = _mm256_add_pd(k, one);
    __m256d can_rise = _mm256_and_pd(_mm256_cmp_pd(up, vtop, _CMP_LE_OQ),
                                     _mm256_cmp_pd(level(up, two, vb, one, vm), x, _CMP_LE_OQ));
    k = _mm256_blendv_pd(k, up, can_rise);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), _mm256_cvtpd_epi32(k));
  }
  if (i < n) scalar::discretize(v + i, n - i, m, bins, out + i);
}

void undiscretize(const std::int32_t* k, std::size_t n, double m, int bins, double* out) {
  if (m == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  const __m256d vb = _mm256_set1_pd(bins);
  const __m256d vm = _mm256_set1_pd(m);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d kd = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(k + i)));
    _mm256_storeu_pd(out + i, level(kd, two, vb, one, vm));
  }
  if (i < n) scalar::undiscretize(k + i, n - i, m, bins, out + i);
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    lane[i & 3] += d * d;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace gridscale::simd::avx2
