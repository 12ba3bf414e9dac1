#pragma once

#include <optional>
#include <span>

#include "wlsh/metric.hpp"

namespace wlsh {

/// Order-statistic bound relaxation: R_up uses the v-th largest weight ratio,
/// (cR)_down the v'-th smallest. v = v' = 1 reproduces the strict bounds.
struct Relaxation {
  int v = 1;
  int v_prime = 1;

  friend bool operator==(const Relaxation&, const Relaxation&) = default;
};

/// Base family W (whose tables are reused) and target W' (the query's weights).
/// Views into weight storage owned by the caller.
struct BoundSpec {
  Metric metric;
  std::span<const double> base;
  std::span<const double> target;
  std::optional<Relaxation> relaxation;
};

struct Bounds {
  double r_up = 0.0;
  double cr_down = 0.0;
};

/// Throws ConfigError unless 1 <= v <= d + 1 - v' <= d.
void validate_relaxation(const Relaxation& r, std::size_t d);

Bounds lp_bounds(const BoundSpec& spec, double R, int c);
Bounds hamming_bounds(const BoundSpec& spec, double R, int c);
/// Relaxation is not defined for the angular bounds and is rejected.
/// r_up is not a true upper bound once the squared weight ratios are far
/// apart: W' = (1, 1), W = (100, 1), x = (1, 10), y = (-1, 10) gives a target
/// angle of 0.199, r_up = 1.590 and a base angle of 2.942.
Bounds angular_bounds(const BoundSpec& spec, double R, int c);

/// Dispatches on spec.metric.
Bounds derived_bounds(const BoundSpec& spec, double R, int c);

/// True iff R_up < (cR)_down, i.e. the derived family separates near from far.
bool usable(const BoundSpec& spec, double R, int c);

}  // namespace wlsh
