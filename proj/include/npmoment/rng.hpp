#pragma once

#include <cstdint>

namespace npmoment {

// Identifies a reproducible random stream. Identical (seed, stream) pairs
// reproduce identical draws bit-for-bit on every platform: the generator is
// counter-based integer arithmetic only.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Counter-based generator: output(c) = mix64(key + c * GOLDEN), with the key
// derived from (seed, stream). Splitting derives an independent child key, so
// parallel Monte Carlo replicas draw from disjoint streams no matter how the
// scheduler interleaves them.
class RngStream {
 public:
  RngStream() : RngStream(RngSpec{}) {}
  explicit RngStream(RngSpec spec);

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double next_double();
  double next_uniform(double lo, double hi);

  // Unbiased integer in [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal via the inverse CDF (see normal_quantile).
  double next_normal();

  // Child stream with its own key; independent of this stream's counter.
  RngStream split(std::uint64_t substream) const;

  RngSpec spec() const { return spec_; }

 private:
  RngStream(RngSpec spec, std::uint64_t key) : spec_(spec), key_(key) {}

  RngSpec spec_;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Inverse standard-normal CDF (Wichura's AS 241 rational approximations,
// accurate to ~1e-15, far beyond what interval half-widths need). Domain (0,1).
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace npmoment
