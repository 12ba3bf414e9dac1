#pragma once
// Independent reference implementations used by the unit and acceptance tests.
// Nothing here calls into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "wlsh/bench.hpp"

namespace oracle {

// Collision probability with bucket width w at distance r, closed forms.
inline double p_l1(double w, double r) {
  const double s = w / r;
  return 2.0 * std::atan(s) / std::numbers::pi - std::log1p(s * s) / (std::numbers::pi * s);
}

inline double p_l2(double w, double r) {
  const double s = w / r;
  const double phi_neg = 0.5 * std::erfc(s / std::numbers::sqrt2);
  return 1.0 - 2.0 * phi_neg -
         2.0 / (std::sqrt(2.0 * std::numbers::pi) * s) * (1.0 - std::exp(-0.5 * s * s));
}

// Composite Simpson with a fixed even number of panels.
template <typename F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// CDF of the symmetric alpha-stable law with characteristic function
// exp(-|t|^alpha), 1 < alpha < 2, via Nolan's integral representation.
inline double stable_cdf(double alpha, double x) {
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - stable_cdf(alpha, -x);
  const double e = alpha / (alpha - 1.0);
  const double xe = std::pow(x, e);
  auto integrand = [&](double th) {
    if (th <= 0.0) return 0.0;
    if (th >= std::numbers::pi / 2) return 1.0;
    const double v = std::pow(std::cos(th) / std::sin(alpha * th), e) *
                     std::cos((alpha - 1.0) * th) / std::cos(th);
    return std::exp(-xe * v);
  };
  return 1.0 - simpson(integrand, 0.0, std::numbers::pi / 2, 20000) / std::numbers::pi;
}

// Same CDF by Fourier inversion; only used to cross-check stable_cdf.
inline double stable_cdf_fourier(double alpha, double x) {
  auto f = [&](double t) {
    if (t == 0.0) return x;
    return std::sin(t * x) / t * std::exp(-std::pow(t, alpha));
  };
  return 0.5 + simpson(f, 0.0, 60.0, 400000) / std::numbers::pi;
}

// Straight-line weighted l_p distance in long double.
template <typename X, typename Y>
double lp_distance(const std::vector<double>& w, const X& x, const Y& y, double p) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const long double diff = std::fabs(static_cast<long double>(w[i]) *
                                       (static_cast<long double>(x[i]) - static_cast<long double>(y[i])));
    acc += std::pow(diff, static_cast<long double>(p));
  }
  return static_cast<double>(std::pow(acc, 1.0L / p));
}

// Minimum total weight of a sub-collection covering `universe` (bitmask search).
inline long long min_cover_weight(std::span<const std::uint32_t> universe,
                                  std::span<const wlsh::CandidateSet> sets) {
  std::uint64_t need = 0;
  for (auto u : universe) need |= 1ULL << u;
  long long best = std::numeric_limits<long long>::max();
  const std::size_t m = sets.size();
  for (std::uint64_t pick = 1; pick < (1ULL << m); ++pick) {
    std::uint64_t got = 0;
    long long weight = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(pick >> i & 1)) continue;
      weight += sets[i].weight;
      for (auto id : sets[i].members) got |= 1ULL << id;
    }
    if ((got & need) == need) best = std::min(best, weight);
  }
  return best;
}

// Every maximal (base, subset) pair: a subset T of base b's usable targets
// (beta <= tau) is maximal when no usable target outside T has beta <= max beta of T.
inline std::vector<wlsh::CandidateSet> maximal_candidates(const wlsh::BetaTable& table, int tau) {
  std::vector<wlsh::CandidateSet> out;
  const auto m = static_cast<std::uint32_t>(table.size());
  for (std::uint32_t b = 0; b < m; ++b) {
    std::vector<std::uint32_t> usable;
    for (std::uint32_t t = 0; t < m; ++t) {
      if (table.at(b, t) && table.at(b, t)->beta <= tau) usable.push_back(t);
    }
    for (std::uint64_t mask = 1; mask < (1ULL << usable.size()); ++mask) {
      int weight = 0;
      std::vector<std::uint32_t> members;
      for (std::size_t i = 0; i < usable.size(); ++i) {
        if (mask >> i & 1) {
          members.push_back(usable[i]);
          weight = std::max(weight, table.at(b, usable[i])->beta);
        }
      }
      bool maximal = true;
      for (std::size_t i = 0; i < usable.size(); ++i) {
        if (!(mask >> i & 1) && table.at(b, usable[i])->beta <= weight) maximal = false;
      }
      if (maximal) out.push_back({b, members, weight});
    }
  }
  return out;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t d, double lo = 1.0,
                                          double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(d);
  for (auto& x : w) x = u(rng);
  return w;
}

inline std::vector<wlsh::WeightVector> as_set(std::vector<std::vector<double>> ws) {
  std::vector<wlsh::WeightVector> out;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    out.push_back({static_cast<std::uint32_t>(i), std::move(ws[i])});
  }
  return out;
}

struct ContainmentStats {
  long long near_checks = 0;
  long long far_checks = 0;
  long long near_violations = 0;  // base distance above r_up
  long long far_violations = 0;   // base distance below cr_down

  long long violations() const { return near_violations + far_violations; }
};

// Samples `specs` random (W, W') pairs and `pairs` random point pairs per spec.
// For each pair at target distance r', the bounds at R = r' must contain the
// base distance from above and the bounds at R = r'/c from below.
inline ContainmentStats containment(const wlsh::Metric& metric, int specs, int pairs, int c,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ContainmentStats st;
  std::uniform_int_distribution<std::size_t> dim(2, 24);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::bernoulli_distribution bit(0.5);
  for (int s = 0; s < specs; ++s) {
    const std::size_t d = dim(rng);
    const auto w = random_weights(rng, d, 0.5, 10.0);
    const auto wt = random_weights(rng, d, 0.5, 10.0);
    const wlsh::BoundSpec spec{metric, w, wt, std::nullopt};
    std::vector<double> x(d), y(d);
    for (int i = 0; i < pairs; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (metric.kind == wlsh::Metric::Kind::kHamming) {
          x[j] = bit(rng);
          y[j] = bit(rng);
        } else {
          x[j] = coord(rng);
          y[j] = coord(rng);
        }
      }
      const std::span<const double> xs(x), ys(y);
      const double rt = wlsh::weighted_distance(metric, std::span<const double>(wt), xs, ys);
      const double rb = wlsh::weighted_distance(metric, std::span<const double>(w), xs, ys);
      if (!(rt > 0.0)) continue;
      const double tol = 1e-9 * (1.0 + rb);
      const auto near = wlsh::derived_bounds(spec, rt, c);
      ++st.near_checks;
      if (rb > near.r_up + tol) ++st.near_violations;
      const auto far = wlsh::derived_bounds(spec, rt / c, c);
      ++st.far_checks;
      if (rb < far.cr_down - tol) ++st.far_violations;
    }
  }
  return st;
}

}  // namespace oracle
