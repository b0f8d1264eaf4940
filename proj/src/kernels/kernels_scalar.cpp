#include <cmath>
#include <cstddef>

#include "npmoment/kernels.hpp"

namespace npmoment::kernels::scalar {

void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = points + i * dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row[j] - x[j];
      acc += d * d;
    }
    out[i] = std::sqrt(acc);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

}  // namespace npmoment::kernels::scalar
