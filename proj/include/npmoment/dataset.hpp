#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npmoment/matrix.hpp"
#include "npmoment/rng.hpp"

namespace npmoment {

// Row view into a Dataset. x is always present; t/w only when the dataset
// carries treatments / an instrument.
struct Observation {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> t;       // empty when absent
  std::optional<double> w;
};

// Immutable after construction; columnar storage keeps the covariate block
// contiguous for the distance kernels. Safe to share across threads.
class Dataset {
 public:
  Dataset(Matrix covariates, Matrix outcomes);
  Dataset(Matrix covariates, Matrix outcomes, Matrix treatments,
          std::vector<double> instruments);

  std::size_t size() const { return x_.rows(); }        // n
  std::size_t dim() const { return x_.cols(); }         // D
  std::size_t outcome_dim() const { return y_.cols(); }
  std::size_t treatment_dim() const { return t_.cols(); }
  bool has_treatments() const { return t_.cols() > 0; }
  bool has_instrument() const { return !w_.empty(); }

  Observation row(std::size_t i) const;
  std::span<const double> covariate_row(std::size_t i) const { return x_.row(i); }
  double outcome(std::size_t i, std::size_t j = 0) const { return y_(i, j); }
  const Matrix& covariates() const { return x_; }
  const Matrix& outcomes() const { return y_; }
  const Matrix& treatments() const { return t_; }
  const std::vector<double>& instruments() const { return w_; }

  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;

 private:
  Matrix x_, y_, t_;
  std::vector<double> w_;
};

// Column-role assignment for CSV ingestion. Every file column must be named
// by exactly one role list.
struct CsvSchema {
  std::vector<std::string> covariates;
  std::vector<std::string> outcomes;
  std::vector<std::string> treatments;
  std::optional<std::string> instrument;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
// JSON: array of objects with "x", "y", optional "t" arrays and "w" scalar.
Dataset load_json(const std::filesystem::path& path);

// Expands "c0..c19" range shorthand into c0,c1,...,c19; plain names pass through.
std::vector<std::string> expand_column_range(const std::vector<std::string>& specs);

// Draws s distinct indices from [0,n), uniform over all C(n,s) subsets
// (partial Fisher-Yates). Output is in draw order, not sorted.
std::vector<std::uint32_t> subsample_without_replacement(std::size_t n, std::size_t s,
                                                         RngStream& rng);

// Reusable variant: keeps the index array across draws and undoes each
// partial shuffle, so repeated draws cost O(s) instead of O(n).
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t n);
  void draw(std::size_t s, RngStream& rng, std::vector<std::uint32_t>& out);

 private:
  std::vector<std::uint32_t> index_;
};

}  // namespace npmoment
