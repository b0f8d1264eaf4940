#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "npmoment/dataset.hpp"
#include "npmoment/matrix.hpp"
#include "npmoment/rng.hpp"

namespace npmoment {

enum class GeneratorKind { linear_embedding, sparse, mixture, product, manifold_circle };
enum class MeanFunction { logistic3, linear, constant };

// Synthetic covariate processes with known intrinsic dimension d inside
// ambient dimension D, plus outcome Y = f(X) + eps. The low-dimensional
// coordinates are i.i.d. U[-1,1]; linear embeddings use A in R^{DxD} with
// U[-1,1] entries. manifold_circle (a circle through two random orthonormal
// directions, d = 1) is an extension beyond the linear examples.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::linear_embedding;
  std::size_t D = 20;
  std::size_t d = 2;
  std::size_t n = 1000;
  double noise_sd = 1.0;
  MeanFunction mean = MeanFunction::logistic3;
  double constant_value = 0.0;
  RngSpec rng;
  // Fixed embedding, e.g. held constant across Monte Carlo replicas. Drawn
  // from the structure stream when absent.
  std::optional<Matrix> embedding;
  // mixture: one linear-embedding component per entry; the test point and
  // the nominal d come from component 0.
  std::vector<std::size_t> mixture_dims;
  std::vector<double> mixture_weights;
  // product: first block embeds d1 low coordinates into D1 ambient ones,
  // the second block the remaining d-d1 into D-D1.
  std::size_t product_d1 = 0;
  std::size_t product_D1 = 0;
  double circle_radius = 1.0;
};

struct GroundTruth {
  std::function<double(std::span<const double>)> mean;  // theta(x) for regression
  double noise_sd = 0.0;
  // alpha-quantile of Y | X = x: f(x) + sd * z_alpha.
  double quantile(std::span<const double> x, double alpha) const;
};

struct SynthResult {
  Dataset dataset;
  GroundTruth truth;
  std::optional<Matrix> embedding;  // A when the generator has one
  // Fresh point on the covariate support (no outcome); shares the frozen
  // structure, draws from the given stream.
  std::function<std::vector<double>(RngStream&)> draw_point;
};

SynthResult generate(const GeneratorSpec& spec);

struct HetEffectSpec {
  enum class ThetaKind { constant, linear_x0 };
  ThetaKind kind = ThetaKind::constant;
  std::vector<double> constant{1.0};  // theta for the constant kind
  std::size_t n_treatments = 1;       // p = dim(T); T coordinates i.i.d. U[0,1]
};

struct HetSynthResult {
  Dataset dataset;
  std::function<std::vector<double>(std::span<const double>)> theta;  // ground truth
  double noise_sd = 0.0;
  std::optional<Matrix> embedding;
  std::function<std::vector<double>(RngStream&)> draw_point;
};

// Y = <theta(X), T> + eps on the same covariate process as generate().
HetSynthResult generate_het_effect(const GeneratorSpec& spec, const HetEffectSpec& het);

struct DoublingRow {
  double r = 0.0;
  double theta = 0.0;
  double ratio = 0.0;  // mu-hat(B(x,r)) / mu-hat(B(x,theta r)); +inf when the inner ball is empty
  std::size_t outer_count = 0;
  std::size_t inner_count = 0;
};

// Empirical ball-mass ratios for eyeballing (C,d)-homogeneity: ratio is
// approximately theta^{-d} on locally homogeneous data.
std::vector<DoublingRow> doubling_diagnostic(const Dataset& data, std::span<const double> x,
                                             std::span<const double> radii,
                                             std::span<const double> thetas);

}  // namespace npmoment
