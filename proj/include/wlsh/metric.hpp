#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wlsh/error.hpp"

namespace wlsh {

/// Distance measure. Only l_p (0 < p <= 2), Hamming and angular are supported.
struct Metric {
  enum class Kind { kLp, kHamming, kAngular };

  Kind kind = Kind::kLp;
  double p = 2.0;

  static Metric lp(double p);
  static Metric hamming() { return {Kind::kHamming, 1.0}; }
  static Metric angular() { return {Kind::kAngular, 2.0}; }

  bool is_lp() const { return kind == Kind::kLp; }
  std::string name() const;
};

struct WeightVector {
  std::uint32_t id = 0;
  std::vector<double> weights;

  std::size_t dim() const { return weights.size(); }
};

/// Throws ConfigError unless every weight is finite and strictly positive.
void validate_weights(const WeightVector& w);

/// A query point. Stored data uses Dataset rows instead.
struct Point {
  std::uint32_t id = 0;
  std::vector<double> coords;
};

struct ValueRange {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
};

/// n points of d integer coordinates, row-major. Point ids are row indices.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t d, ValueRange range, std::vector<std::int32_t> coords);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  ValueRange range() const { return range_; }

  std::span<const std::int32_t> row(std::size_t i) const {
    return {coords_.data() + i * d_, d_};
  }
  Point point(std::size_t i) const;
  const std::vector<std::int32_t>& coords() const { return coords_; }

  /// FNV-1a over header fields and coordinates.
  std::uint64_t digest() const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  ValueRange range_{};
  std::vector<std::int32_t> coords_;
};

// Binary layout: "WLSHDATA", u32 version, u32 n, u32 d, i32 lo, i32 hi, n*d i32.
void write_dataset(std::ostream& out, const Dataset& ds);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const Dataset& ds);
/// Accepts the binary format or whitespace-separated text (one point per line).
Dataset load_dataset(const std::string& path);
Dataset parse_text_dataset(std::istream& in);

namespace detail {

template <typename X, typename Y>
double lp_distance(std::span<const double> w, std::span<const X> x,
                   std::span<const Y> y, double p) {
  double acc = 0.0;
  const std::size_t d = w.size();
  if (p == 2.0) {
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = w[i] * (static_cast<double>(x[i]) - static_cast<double>(y[i]));
      acc += diff * diff;
    }
    return std::sqrt(acc);
  }
  if (p == 1.0) {
    for (std::size_t i = 0; i < d; ++i) {
      acc += std::abs(w[i] * (static_cast<double>(x[i]) - static_cast<double>(y[i])));
    }
    return acc;
  }
  for (std::size_t i = 0; i < d; ++i) {
    acc += std::pow(std::abs(w[i] * (static_cast<double>(x[i]) - static_cast<double>(y[i]))), p);
  }
  return std::pow(acc, 1.0 / p);
}

template <typename X, typename Y>
double angular_distance(std::span<const double> w, std::span<const X> x,
                        std::span<const Y> y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = w[i] * static_cast<double>(x[i]);
    const double b = w[i] * static_cast<double>(y[i]);
    dot += a * b;
    nx += a * a;
    ny += b * b;
  }
  if (nx == 0.0 || ny == 0.0) throw ConfigError("angular distance of a zero vector");
  double cosine = dot / (std::sqrt(nx) * std::sqrt(ny));
  cosine = std::min(1.0, std::max(-1.0, cosine));
  return std::acos(cosine);
}

}  // namespace detail

/// D_W(x, y) = D(W o x, W o y). Checks dimensionality; weights are assumed
/// validated (see validate_weights).
template <typename X, typename Y>
double weighted_distance(const Metric& metric, std::span<const double> w,
                         std::span<const X> x, std::span<const Y> y) {
  if (x.size() != w.size() || y.size() != w.size()) {
    throw ConfigError("dimensionality mismatch in weighted_distance");
  }
  switch (metric.kind) {
    case Metric::Kind::kLp:
      return detail::lp_distance(w, x, y, metric.p);
    case Metric::Kind::kHamming: {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double a = static_cast<double>(x[i]);
        const double b = static_cast<double>(y[i]);
        if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0)) {
          throw ConfigError("Hamming distance requires binary coordinates");
        }
        if (a != b) acc += w[i];
      }
      return acc;
    }
    case Metric::Kind::kAngular:
      return detail::angular_distance(w, x, y);
  }
  return 0.0;
}

double weighted_distance(const Metric& metric, const WeightVector& w, const Point& x,
                         const Point& y);

struct Neighbor {
  std::uint32_t id = 0;
  double distance = 0.0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact k-NN under D_W, ascending by (distance, id).
std::vector<Neighbor> brute_force_knn(const Dataset& ds, const Metric& metric,
                                      const WeightVector& w, std::span<const double> q,
                                      std::size_t k);

}  // namespace wlsh
