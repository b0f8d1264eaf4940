// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must route through the dispatcher, which only picks
// these when the CPU reports both features.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "npmoment/kernels.hpp"

namespace npmoment::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  // Fixed reduction order: (lane0+lane2) + (lane1+lane3).
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out) {
  const std::size_t vec_end = dim - dim % 4;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = points + i * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < vec_end; j += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    double tail = 0.0;
    for (; j < dim; ++j) {
      const double d = row[j] - x[j];
      tail += d * d;
    }
    out[i] = std::sqrt(hsum(acc) + tail);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t vec_end = n - n % 8;
  for (; i < vec_end; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t vec_end = n - n % 8;
  for (; i < vec_end; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

}  // namespace npmoment::kernels::avx2

#endif  // x86-64
