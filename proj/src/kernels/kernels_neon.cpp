// NEON kernel variants for AArch64 (NEON is baseline there).

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "npmoment/kernels.hpp"

namespace npmoment::kernels::neon {

void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out) {
  const std::size_t vec_end = dim - dim % 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = points + i * dim;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j < vec_end; j += 2) {
      const float64x2_t d = vsubq_f64(vld1q_f64(row + j), vld1q_f64(x + j));
      acc = vfmaq_f64(acc, d, d);
    }
    double tail = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; j < dim; ++j) {
      const double d = row[j] - x[j];
      tail += d * d;
    }
    out[i] = std::sqrt(tail);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  const std::size_t vec_end = n - n % 4;
  for (; i < vec_end; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  const std::size_t vec_end = n - n % 4;
  for (; i < vec_end; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i];
  return r;
}

}  // namespace npmoment::kernels::neon

#endif  // __aarch64__
