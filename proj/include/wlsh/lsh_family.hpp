#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "wlsh/metric.hpp"

namespace wlsh {

/// splitmix64 finalizer over (seed, a, b); used to derive independent streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Symmetric p-stable variates with characteristic function exp(-|t|^p),
/// except p = 2 which yields the standard normal (the usual E2LSH choice).
/// p = 1 is the standard Cauchy; other p use Chambers-Mallows-Stuck.
class StableSampler {
 public:
  StableSampler(double p, std::uint64_t seed);

  double operator()();
  double p() const { return p_; }

 private:
  double p_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::cauchy_distribution<double> cauchy_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

/// h(x) = floor((a . (W° o x) + b*) / w).
struct LpHashFunction {
  std::vector<double> a;
  double b_star = 0.0;
  double w = 1.0;
  std::vector<double> base_weights;

  std::size_t dim() const { return a.size(); }
};

/// a gets d independent p-stable draws, b* ~ U[0, c^b_range_levels * w].
LpHashFunction sample_hash_function(double p, std::size_t d, double w, int b_range_levels,
                                    int c, const WeightVector& base, std::uint64_t seed);

/// Level-1 bucket id of x. Values beyond the int64 range saturate.
template <typename X>
std::int64_t hash_bucket(const LpHashFunction& f, std::span<const X> x) {
  if (x.size() != f.a.size()) throw ConfigError("dimensionality mismatch in hash_bucket");
  double proj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    proj += f.a[i] * (f.base_weights[i] * static_cast<double>(x[i]));
  }
  const double v = std::floor((proj + f.b_star) / f.w);
  constexpr double kMax = 9.0e18;
  if (v >= kMax) return static_cast<std::int64_t>(kMax);
  if (v <= -kMax) return -static_cast<std::int64_t>(kMax);
  return static_cast<std::int64_t>(v);
}

/// floor(bucket / l), rounding toward negative infinity.
constexpr std::int64_t level_bucket(std::int64_t bucket, std::int64_t l) {
  std::int64_t q = bucket / l;
  if ((bucket % l != 0) && ((bucket < 0) != (l < 0))) --q;
  return q;
}

void write_hash_function(std::ostream& out, const LpHashFunction& f);
LpHashFunction read_hash_function(std::istream& in, std::span<const double> base_weights);

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

namespace detail {
struct StableSampleTable;
}

/// Collision probability P(r) of a (weighted) LSH family.
///  - l_p, p in {1, 2}: adaptive quadrature of the |p-stable| density.
///  - other p: Monte Carlo over a cached table of sorted |p-stable| samples.
///  - Hamming: 1 - r / sum(w).   Angular: 1 - r / pi.
class CollisionProbability {
 public:
  static CollisionProbability lp(double p, double bucket_width);
  static CollisionProbability hamming(double weight_sum);
  static CollisionProbability angular();

  double operator()(double r) const { return estimate(r).value; }
  ProbabilityEstimate estimate(double r) const;

  const Metric& metric() const { return metric_; }
  double bucket_width() const { return w_; }

 private:
  Metric metric_;
  double w_ = 0.0;
  double weight_sum_ = 0.0;
  std::shared_ptr<const detail::StableSampleTable> table_;
};

inline double collision_probability(const CollisionProbability& cp, double r) { return cp(r); }

// Weighted families for the Hamming and angular distance.

/// h(x) = w_k * x_k with k drawn with probability w_k / sum(w).
struct HammingHashFunction {
  std::size_t coordinate = 0;
  double weight = 1.0;
};

HammingHashFunction sample_hamming_hash(const WeightVector& base, std::uint64_t seed);

template <typename X>
double hamming_hash(const HammingHashFunction& f, std::span<const X> x) {
  return f.weight * static_cast<double>(x[f.coordinate]);
}

/// h(x) = sign(u . (W o x)) with u standard normal.
struct AngularHashFunction {
  std::vector<double> u;
  std::vector<double> base_weights;
};

AngularHashFunction sample_angular_hash(const WeightVector& base, std::uint64_t seed);

template <typename X>
int angular_hash(const AngularHashFunction& f, std::span<const X> x) {
  double dot = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    dot += f.u[i] * (f.base_weights[i] * static_cast<double>(x[i]));
  }
  return dot >= 0.0 ? 1 : -1;
}

}  // namespace wlsh
