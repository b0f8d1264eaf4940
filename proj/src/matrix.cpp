#include "npmoment/matrix.hpp"

#include <cmath>
#include <numeric>

namespace npmoment {

namespace {

// Partial-pivot LU factorization in place. Returns false on exact breakdown.
bool lu_factor(Matrix& a, std::vector<std::size_t>& piv) {
  const std::size_t p = a.rows();
  piv.resize(p);
  std::iota(piv.begin(), piv.end(), std::size_t{0});
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t best = col;
    double best_abs = std::fabs(a(col, col));
    for (std::size_t r = col + 1; r < p; ++r) {
      const double v = std::fabs(a(r, col));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best_abs == 0.0) return false;
    if (best != col) {
      for (std::size_t c = 0; c < p; ++c) std::swap(a(col, c), a(best, c));
      std::swap(piv[col], piv[best]);
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      const double m = a(r, col) / a(col, col);
      a(r, col) = m;
      for (std::size_t c = col + 1; c < p; ++c) a(r, c) -= m * a(col, c);
    }
  }
  return true;
}

void lu_solve(const Matrix& lu, const std::vector<std::size_t>& piv,
              std::span<const double> b, std::span<double> x) {
  const std::size_t p = lu.rows();
  for (std::size_t r = 0; r < p; ++r) x[r] = b[piv[r]];
  for (std::size_t r = 1; r < p; ++r)
    for (std::size_t c = 0; c < r; ++c) x[r] -= lu(r, c) * x[c];
  for (std::size_t r = p; r-- > 0;) {
    for (std::size_t c = r + 1; c < p; ++c) x[r] -= lu(r, c) * x[c];
    x[r] /= lu(r, r);
  }
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::fabs(a(r, c));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

double try_solve_linear_system(Matrix a, std::span<const double> b, std::span<double> x) {
  const std::size_t p = a.rows();
  if (a.cols() != p || b.size() != p || x.size() != p)
    throw DimensionError("solve_linear_system: shape mismatch");
  const double a_norm = norm1(a);
  Matrix lu = a;
  std::vector<std::size_t> piv;
  if (!lu_factor(lu, piv)) return 0.0;
  lu_solve(lu, piv, b, x);
  // rcond = 1 / (||A||_1 ||A^-1||_1), with the inverse assembled column by
  // column; fine at these sizes (p is the parameter dimension).
  std::vector<double> e(p, 0.0), col(p);
  double inv_norm = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    e[c] = 1.0;
    lu_solve(lu, piv, e, col);
    e[c] = 0.0;
    double s = 0.0;
    for (double v : col) s += std::fabs(v);
    inv_norm = std::max(inv_norm, s);
  }
  if (a_norm == 0.0 || inv_norm == 0.0 || !std::isfinite(inv_norm)) return 0.0;
  return 1.0 / (a_norm * inv_norm);
}

double solve_linear_system(Matrix a, std::span<const double> b, std::span<double> x,
                           double rcond_floor) {
  const double rcond = try_solve_linear_system(std::move(a), b, x);
  if (rcond < rcond_floor)
    throw SingularityError("linear system is numerically singular (rcond " +
                           std::to_string(rcond) + ")");
  return rcond;
}

}  // namespace npmoment
