#include "wlsh/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace wlsh {

namespace {

void check_common(const BoundSpec& spec, double R, int c) {
  if (spec.base.size() != spec.target.size() || spec.base.empty()) {
    throw ConfigError("bound spec weight vectors must share a positive dimensionality");
  }
  if (!(R > 0.0)) throw ConfigError("bounds require R > 0");
  if (c < 2) throw ConfigError("bounds require an integer c >= 2");
  for (std::size_t i = 0; i < spec.base.size(); ++i) {
    if (!(spec.base[i] > 0.0) || !(spec.target[i] > 0.0)) {
      throw ConfigError("bounds require strictly positive weights");
    }
  }
}

// Shared by l_p and Hamming: T = {w_i / w'_i}.
Bounds ratio_bounds(const BoundSpec& spec, double R, int c) {
  const std::size_t d = spec.base.size();
  if (!spec.relaxation || (spec.relaxation->v == 1 && spec.relaxation->v_prime == 1)) {
    if (spec.relaxation) validate_relaxation(*spec.relaxation, d);
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
      const double t = spec.base[i] / spec.target[i];
      hi = std::max(hi, t);
      lo = std::min(lo, t);
    }
    return {R * hi, c * R * lo};
  }
  validate_relaxation(*spec.relaxation, d);
  std::vector<double> ratios(d);
  for (std::size_t i = 0; i < d; ++i) ratios[i] = spec.base[i] / spec.target[i];
  std::sort(ratios.begin(), ratios.end(), std::greater<>());
  const auto v = static_cast<std::size_t>(spec.relaxation->v);
  const auto vp = static_cast<std::size_t>(spec.relaxation->v_prime);
  // ratios[j - 1] is T^(j), the j-th largest.
  return {R * ratios[v - 1], c * R * ratios[d - vp]};
}

}  // namespace

void validate_relaxation(const Relaxation& r, std::size_t d) {
  const long long dd = static_cast<long long>(d);
  if (!(1 <= r.v && r.v <= dd + 1 - r.v_prime && dd + 1 - r.v_prime <= dd)) {
    throw ConfigError("relaxation requires 1 <= v <= d + 1 - v' <= d");
  }
}

Bounds lp_bounds(const BoundSpec& spec, double R, int c) {
  if (!spec.metric.is_lp()) throw ConfigError("lp_bounds called with a non-l_p metric");
  check_common(spec, R, c);
  return ratio_bounds(spec, R, c);
}

Bounds hamming_bounds(const BoundSpec& spec, double R, int c) {
  if (spec.metric.kind != Metric::Kind::kHamming) {
    throw ConfigError("hamming_bounds called with a non-Hamming metric");
  }
  check_common(spec, R, c);
  return ratio_bounds(spec, R, c);
}

Bounds angular_bounds(const BoundSpec& spec, double R, int c) {
  if (spec.metric.kind != Metric::Kind::kAngular) {
    throw ConfigError("angular_bounds called with a non-angular metric");
  }
  if (spec.relaxation) throw ConfigError("relaxation is not defined for angular bounds");
  check_common(spec, R, c);
  double m = 0.0, n = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.base.size(); ++i) {
    const double t = spec.base[i] / spec.target[i];
    m = std::max(m, t * t);
    n = std::min(n, t * t);
  }
  const double x = std::cos(R) + (n - m) / m;
  const double y = m * std::cos(c * R) / n + (m - n) / n;
  return {std::acos(std::max(-1.0, std::min(1.0, x))),
          std::acos(std::min(1.0, std::max(-1.0, y)))};
}

Bounds derived_bounds(const BoundSpec& spec, double R, int c) {
  switch (spec.metric.kind) {
    case Metric::Kind::kLp:
      return lp_bounds(spec, R, c);
    case Metric::Kind::kHamming:
      return hamming_bounds(spec, R, c);
    case Metric::Kind::kAngular:
      return angular_bounds(spec, R, c);
  }
  return {};
}

bool usable(const BoundSpec& spec, double R, int c) {
  const Bounds b = derived_bounds(spec, R, c);
  return b.r_up < b.cr_down;
}

}  // namespace wlsh
