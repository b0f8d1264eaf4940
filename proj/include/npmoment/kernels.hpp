#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the distance ranking, the weighted
// reductions in the solver/inference paths, and the shrinkage scan.
//
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA (or AArch64 with NEON), a vector variant. The backend is picked
// once at runtime; NPMOMENT_KERNELS=scalar|avx2|neon forces a choice.
// Vector variants use a fixed lane/accumulator merge order, so results are
// deterministic for a given backend.

namespace npmoment::kernels {

enum class Backend { scalar, avx2, neon };

Backend active();
std::string_view backend_name();
// Forces a backend (tests use this to compare variants). Throws
// PreconditionError if the requested backend is unavailable on this CPU.
void set_backend(Backend b);

// out[i] = || points[i,:] - x ||_2 for row-major points (n x dim).
void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);

namespace scalar {
void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define NPMOMENT_HAVE_AVX2_KERNELS 1
namespace avx2 {
void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define NPMOMENT_HAVE_NEON_KERNELS 1
namespace neon {
void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace neon
#endif

}  // namespace npmoment::kernels
