#include "npmoment/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "npmoment/errors.hpp"
#include "npmoment/kernels.hpp"

namespace npmoment {

double GroundTruth::quantile(std::span<const double> x, double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("quantile level must lie in (0,1)");
  return mean(x) + noise_sd * normal_quantile(alpha);
}

namespace {

Matrix draw_embedding(std::size_t D, std::size_t d, RngStream& rng) {
  Matrix a(D, d);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.next_uniform(-1.0, 1.0);
  return a;
}

// Covariate support with a frozen structure; rows and test points share the
// same draw routine.
struct Support {
  virtual ~Support() = default;
  virtual std::vector<double> draw(RngStream& rng) const = 0;
};

struct EmbeddingSupport final : Support {
  Matrix a;  // D x d
  std::vector<double> draw(RngStream& rng) const override {
    std::vector<double> x(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double low = rng.next_uniform(-1.0, 1.0);
      for (std::size_t i = 0; i < a.rows(); ++i) x[i] += a(i, j) * low;
    }
    return x;
  }
};

struct SparseSupport final : Support {
  std::size_t D = 0, d = 0;
  std::vector<double> draw(RngStream& rng) const override {
    std::vector<double> x(D, 0.0);
    // d distinct coordinates via partial Fisher-Yates over [0, D).
    std::vector<std::uint32_t> idx(D);
    for (std::size_t i = 0; i < D; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(D - i));
      std::swap(idx[i], idx[j]);
      x[idx[i]] = rng.next_uniform(-1.0, 1.0);
    }
    return x;
  }
};

struct MixtureSupport final : Support {
  std::vector<EmbeddingSupport> components;
  std::vector<double> cumulative;  // cumulative weights
  bool pin_component0 = false;     // test points come from component 0
  std::vector<double> draw(RngStream& rng) const override {
    std::size_t c = 0;
    if (!pin_component0) {
      const double u = rng.next_double();
      while (c + 1 < cumulative.size() && u > cumulative[c]) ++c;
    }
    return components[c].draw(rng);
  }
};

struct ProductSupport final : Support {
  EmbeddingSupport first, second;
  std::vector<double> draw(RngStream& rng) const override {
    std::vector<double> x = first.draw(rng);
    const std::vector<double> tail = second.draw(rng);
    x.insert(x.end(), tail.begin(), tail.end());
    return x;
  }
};

struct CircleSupport final : Support {
  std::vector<double> u, v;  // orthonormal directions in R^D
  double radius = 1.0;
  std::vector<double> draw(RngStream& rng) const override {
    const double phi = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> x(u.size());
    const double c = radius * std::cos(phi), s = radius * std::sin(phi);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = c * u[i] + s * v[i];
    return x;
  }
};

std::function<double(std::span<const double>)> mean_function(const GeneratorSpec& spec) {
  switch (spec.mean) {
    case MeanFunction::logistic3:
      return [](std::span<const double> x) { return 1.0 / (1.0 + std::exp(-3.0 * x[0])); };
    case MeanFunction::linear:
      return [](std::span<const double> x) { return x[0]; };
    case MeanFunction::constant: {
      const double c = spec.constant_value;
      return [c](std::span<const double>) { return c; };
    }
  }
  throw ConfigError("unknown mean function");
}

struct BuiltSupport {
  std::shared_ptr<Support> rows;        // draws data rows
  std::shared_ptr<Support> test_points; // draws test points (mixture pins component 0)
  std::optional<Matrix> embedding;
};

BuiltSupport build_support(const GeneratorSpec& spec, RngStream& structure) {
  if (spec.d > spec.D) throw PreconditionError("generator: need d <= D");
  if (spec.d < 1 || spec.n < 1) throw PreconditionError("generator: need d >= 1 and n >= 1");
  BuiltSupport out;
  switch (spec.kind) {
    case GeneratorKind::linear_embedding: {
      auto s = std::make_shared<EmbeddingSupport>();
      if (spec.embedding) {
        if (spec.embedding->rows() != spec.D || spec.embedding->cols() != spec.d)
          throw DimensionError("generator: embedding must be D x d");
        s->a = *spec.embedding;
      } else {
        s->a = draw_embedding(spec.D, spec.d, structure);
      }
      out.embedding = s->a;
      out.rows = s;
      out.test_points = s;
      return out;
    }
    case GeneratorKind::sparse: {
      auto s = std::make_shared<SparseSupport>();
      s->D = spec.D;
      s->d = spec.d;
      out.rows = s;
      out.test_points = s;
      return out;
    }
    case GeneratorKind::mixture: {
      if (spec.mixture_dims.empty() || spec.mixture_dims.size() != spec.mixture_weights.size())
        throw ConfigError("mixture: need matching dims and weights");
      auto s = std::make_shared<MixtureSupport>();
      double total = 0.0;
      for (std::size_t c = 0; c < spec.mixture_dims.size(); ++c) {
        if (spec.mixture_dims[c] > spec.D) throw PreconditionError("mixture: component d > D");
        EmbeddingSupport comp;
        comp.a = draw_embedding(spec.D, spec.mixture_dims[c], structure);
        s->components.push_back(std::move(comp));
        total += spec.mixture_weights[c];
      }
      double cum = 0.0;
      for (const double w : spec.mixture_weights) {
        cum += w / total;
        s->cumulative.push_back(cum);
      }
      auto pinned = std::make_shared<MixtureSupport>(*s);
      pinned->pin_component0 = true;
      out.rows = s;
      out.test_points = pinned;
      return out;
    }
    case GeneratorKind::product: {
      const std::size_t d1 = spec.product_d1 ? spec.product_d1 : spec.d / 2;
      const std::size_t D1 = spec.product_D1 ? spec.product_D1 : spec.D / 2;
      if (d1 < 1 || d1 >= spec.d || D1 < d1 || spec.D - D1 < spec.d - d1)
        throw ConfigError("product: inconsistent split (d1, D1)");
      auto s = std::make_shared<ProductSupport>();
      s->first.a = draw_embedding(D1, d1, structure);
      s->second.a = draw_embedding(spec.D - D1, spec.d - d1, structure);
      out.rows = s;
      out.test_points = s;
      return out;
    }
    case GeneratorKind::manifold_circle: {
      if (spec.D < 2) throw PreconditionError("manifold_circle: need D >= 2");
      auto s = std::make_shared<CircleSupport>();
      s->radius = spec.circle_radius;
      s->u.resize(spec.D);
      s->v.resize(spec.D);
      for (auto& e : s->u) e = structure.next_normal();
      for (auto& e : s->v) e = structure.next_normal();
      // Gram-Schmidt.
      double nu = 0.0;
      for (const double e : s->u) nu += e * e;
      nu = std::sqrt(nu);
      for (auto& e : s->u) e /= nu;
      double proj = 0.0;
      for (std::size_t i = 0; i < spec.D; ++i) proj += s->u[i] * s->v[i];
      double nv = 0.0;
      for (std::size_t i = 0; i < spec.D; ++i) {
        s->v[i] -= proj * s->u[i];
        nv += s->v[i] * s->v[i];
      }
      nv = std::sqrt(nv);
      for (auto& e : s->v) e /= nv;
      out.rows = s;
      out.test_points = s;
      return out;
    }
  }
  throw ConfigError("unknown generator kind");
}

}  // namespace

SynthResult generate(const GeneratorSpec& spec) {
  RngStream base{spec.rng};
  RngStream structure = base.split(0);
  RngStream rows = base.split(1);
  RngStream noise = base.split(2);

  BuiltSupport support = build_support(spec, structure);
  const auto f = mean_function(spec);

  Matrix x(spec.n, spec.D);
  Matrix y(spec.n, 1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::vector<double> row = support.rows->draw(rows);
    std::copy(row.begin(), row.end(), x.row(i).begin());
    y(i, 0) = f(row) + (spec.noise_sd > 0.0 ? spec.noise_sd * noise.next_normal() : 0.0);
  }

  SynthResult out{Dataset(std::move(x), std::move(y)), GroundTruth{f, spec.noise_sd},
                  support.embedding,
                  [tp = support.test_points](RngStream& rng) { return tp->draw(rng); }};
  return out;
}

HetSynthResult generate_het_effect(const GeneratorSpec& spec, const HetEffectSpec& het) {
  if (het.n_treatments < 1) throw PreconditionError("het generator: need >= 1 treatment");
  if (het.kind == HetEffectSpec::ThetaKind::constant &&
      het.constant.size() != het.n_treatments)
    throw ConfigError("het generator: constant theta must have one entry per treatment");

  RngStream base{spec.rng};
  RngStream structure = base.split(0);
  RngStream rows = base.split(1);
  RngStream noise = base.split(2);
  RngStream treat = base.split(3);

  BuiltSupport support = build_support(spec, structure);
  const std::size_t p = het.n_treatments;

  std::function<std::vector<double>(std::span<const double>)> theta;
  if (het.kind == HetEffectSpec::ThetaKind::constant) {
    theta = [c = het.constant](std::span<const double>) { return c; };
  } else {
    theta = [p](std::span<const double> x) {
      std::vector<double> t(p, 0.0);
      t[0] = x[0];
      return t;
    };
  }

  Matrix x(spec.n, spec.D);
  Matrix y(spec.n, 1);
  Matrix t(spec.n, p);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::vector<double> row = support.rows->draw(rows);
    std::copy(row.begin(), row.end(), x.row(i).begin());
    const std::vector<double> th = theta(row);
    double fit = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      t(i, j) = treat.next_double();
      fit += th[j] * t(i, j);
    }
    y(i, 0) = fit + (spec.noise_sd > 0.0 ? spec.noise_sd * noise.next_normal() : 0.0);
  }

  HetSynthResult out{Dataset(Matrix(std::move(x)), std::move(y), std::move(t), {}),
                     std::move(theta), spec.noise_sd, support.embedding,
                     [tp = support.test_points](RngStream& rng) { return tp->draw(rng); }};
  return out;
}

std::vector<DoublingRow> doubling_diagnostic(const Dataset& data, std::span<const double> x,
                                             std::span<const double> radii,
                                             std::span<const double> thetas) {
  if (x.size() != data.dim()) throw DimensionError("doubling_diagnostic: dimension mismatch");
  for (const double r : radii)
    if (!(r > 0.0)) throw PreconditionError("doubling_diagnostic: radii must be positive");

  const std::size_t n = data.size();
  std::vector<double> dist(n);
  kernels::l2_distances(data.covariates().data(), n, data.dim(), x.data(), dist.data());
  std::sort(dist.begin(), dist.end());
  auto count_below = [&](double r) {
    // open balls, matching B(x,r) = { z : ||x-z|| < r }
    return static_cast<std::size_t>(std::lower_bound(dist.begin(), dist.end(), r) - dist.begin());
  };

  std::vector<DoublingRow> rows;
  for (const double r : radii) {
    for (const double th : thetas) {
      if (!(th > 0.0 && th <= 1.0))
        throw PreconditionError("doubling_diagnostic: theta must lie in (0,1]");
      DoublingRow row;
      row.r = r;
      row.theta = th;
      row.outer_count = count_below(r);
      row.inner_count = count_below(th * r);
      row.ratio = row.inner_count == 0
                      ? std::numeric_limits<double>::infinity()
                      : static_cast<double>(row.outer_count) / static_cast<double>(row.inner_count);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace npmoment
