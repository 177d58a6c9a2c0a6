// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// nothing here runs unless dispatch confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "linemap/simd/kernels.hpp"

namespace linemap::simd {
namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    // mul then add, never fused, so results match the scalar reference bit for bit
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    const double ax = a * x[i];
    y[i] = y[i] + ax;
  }
}

double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d p0 = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)),
                                     _mm256_loadu_pd(b + i));
    const __m256d p1 =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4)),
                      _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, p0);
    acc1 = _mm256_add_pd(acc1, p1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)),
                                    _mm256_loadu_pd(b + i));
    acc0 = _mm256_add_pd(acc0, p);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double wa = w[i] * a[i];
    sum += wa * b[i];
  }
  return sum;
}

inline __m256d abs_pd(__m256d v) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign_mask, v);
}

double reduce_max(__m256d vmax, __m256d nan_seen) {
  if (_mm256_movemask_pd(nan_seen) != 0) return std::numeric_limits<double>::quiet_NaN();
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k) m = lanes[k] > m ? lanes[k] : m;
  return m;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vmax = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, d);
  }
  double m = reduce_max(vmax, nan_seen);
  if (std::isnan(m)) return m;
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

double max_abs_avx2(const double* a, std::size_t n) {
  __m256d vmax = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = abs_pd(_mm256_loadu_pd(a + i));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, d);
  }
  double m = reduce_max(vmax, nan_seen);
  if (std::isnan(m)) return m;
  for (; i < n; ++i) {
    const double d = std::fabs(a[i]);
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{&axpy_avx2, &weighted_dot_avx2, &max_abs_diff_avx2,
                                 &max_abs_avx2};
  return table;
}

}  // namespace linemap::simd
