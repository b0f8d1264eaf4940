#include "npmoment/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "npmoment/errors.hpp"

namespace npmoment::kernels {

namespace {

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
#if defined(NPMOMENT_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
#if defined(NPMOMENT_HAVE_NEON_KERNELS)
    case Backend::neon:
      return true;
#endif
    default:
      return false;
  }
}

Backend detect() {
  if (const char* env = std::getenv("NPMOMENT_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
    if (v == "neon" && backend_available(Backend::neon)) return Backend::neon;
    if (v != "auto") return Backend::scalar;  // unknown or unavailable: safe default
  }
#if defined(NPMOMENT_HAVE_AVX2_KERNELS)
  if (backend_available(Backend::avx2)) return Backend::avx2;
#endif
#if defined(NPMOMENT_HAVE_NEON_KERNELS)
  return Backend::neon;
#endif
  return Backend::scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

Backend active() { return g_backend.load(std::memory_order_relaxed); }

std::string_view backend_name() {
  switch (active()) {
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
    default:
      return "scalar";
  }
}

void set_backend(Backend b) {
  if (!backend_available(b)) throw PreconditionError("requested kernel backend is unavailable on this CPU");
  g_backend.store(b, std::memory_order_relaxed);
}

void l2_distances(const double* points, std::size_t n, std::size_t dim,
                  const double* x, double* out) {
  switch (active()) {
#if defined(NPMOMENT_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return avx2::l2_distances(points, n, dim, x, out);
#endif
#if defined(NPMOMENT_HAVE_NEON_KERNELS)
    case Backend::neon:
      return neon::l2_distances(points, n, dim, x, out);
#endif
    default:
      return scalar::l2_distances(points, n, dim, x, out);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  switch (active()) {
#if defined(NPMOMENT_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return avx2::dot(a, b, n);
#endif
#if defined(NPMOMENT_HAVE_NEON_KERNELS)
    case Backend::neon:
      return neon::dot(a, b, n);
#endif
    default:
      return scalar::dot(a, b, n);
  }
}

double sum(const double* a, std::size_t n) {
  switch (active()) {
#if defined(NPMOMENT_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return avx2::sum(a, n);
#endif
#if defined(NPMOMENT_HAVE_NEON_KERNELS)
    case Backend::neon:
      return neon::sum(a, n);
#endif
    default:
      return scalar::sum(a, n);
  }
}

}  // namespace npmoment::kernels
