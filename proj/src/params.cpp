#include "wlsh/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wlsh {

double default_gamma(std::size_t n) {
  if (n == 0) throw ConfigError("gamma requires n >= 1");
  return std::clamp(100.0 / static_cast<double>(n), 1e-7, 1.0);
}

SolverContext SolverContext::make(double p, int c, std::size_t n, ValueRange range) {
  SolverContext ctx;
  ctx.metric = Metric::lp(p);
  if (c < 2) throw ConfigError("c must be an integer >= 2");
  ctx.c = c;
  ctx.n = n;
  ctx.gamma = default_gamma(n);
  ctx.range = range;
  return ctx;
}

int ceil_log(double ratio, int c) {
  if (c < 2) throw ConfigError("c must be an integer >= 2");
  int levels = 0;
  double scale = 1.0;
  while (scale < ratio) {
    scale *= c;
    ++levels;
  }
  return levels;
}

RadiusProfile radius_profile(ValueRange range, std::span<const double> w, double p, int c) {
  if (range.hi <= range.lo) throw ConfigError("degenerate value range: hi must exceed lo");
  if (w.empty()) throw ConfigError("empty weight vector");
  if (!(p > 0.0 && p <= 2.0)) throw ConfigError("l_p requires 0 < p <= 2");
  const double span = static_cast<double>(range.hi) - static_cast<double>(range.lo);
  RadiusProfile prof;
  prof.r_min = *std::min_element(w.begin(), w.end());
  if (!(prof.r_min > 0.0)) throw ConfigError("weights must be strictly positive");
  double acc = 0.0;
  for (double wi : w) acc += std::pow(wi * span, p);
  prof.r_max = std::pow(acc, 1.0 / p);
  prof.levels = ceil_log(prof.r_max / prof.r_min, c);
  return prof;
}

BetaMu beta_mu(double p1, double p2, double epsilon, double gamma) {
  if (!(p2 > 0.0 && p2 < p1 && p1 < 1.0)) {
    throw ConfigError("beta_mu requires 0 < P2 < P1 < 1");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 2.0)) throw ConfigError("gamma must lie in (0, 2]");
  const double log_eps = std::log(1.0 / epsilon);
  const double z = std::sqrt(std::log(2.0 / gamma) / log_eps);
  const double gap = p1 - p2;
  const double raw = log_eps * (1.0 + z) * (1.0 + z) / (2.0 * gap * gap);
  BetaMu out;
  // Nearly equal P1 and P2 push beta past int range; saturating keeps the pair
  // far above any tau instead of wrapping negative.
  constexpr double kMaxBeta = std::numeric_limits<int>::max();
  out.beta = raw >= kMaxBeta ? std::numeric_limits<int>::max() : static_cast<int>(std::ceil(raw));
  out.mu = (z * p1 + p2) / (1.0 + z) * out.beta;
  out.z = z;
  return out;
}

BetaMu beta_mu(double p1, double p2, std::size_t n) {
  return beta_mu(p1, p2, 0.01, default_gamma(n));
}

std::optional<VectorParams> vector_params(std::span<const double> base,
                                          std::span<const double> target,
                                          const SolverContext& ctx) {
  if (!ctx.metric.is_lp()) throw ConfigError("parameter solving is defined for l_p only");
  const double p = ctx.metric.p;
  const RadiusProfile prof = radius_profile(ctx.range, target, p, ctx.c);
  const BoundSpec spec{ctx.metric, base, target, ctx.relaxation};
  const double x = prof.r_min;
  const Bounds b = lp_bounds(spec, x, ctx.c);
  if (!(b.r_up < b.cr_down)) return std::nullopt;

  const double w_bucket = *std::min_element(base.begin(), base.end());
  const auto cp = CollisionProbability::lp(p, w_bucket);
  VectorParams vp;
  vp.x_up = b.r_up;
  vp.y_down = b.cr_down;
  vp.p1 = cp(vp.x_up);
  vp.p2 = cp(vp.y_down);
  // A Monte Carlo P can tie for nearby radii; treat that as unusable too.
  if (!(vp.p1 > vp.p2) || !(vp.p2 > 0.0)) return std::nullopt;
  const BetaMu bm = beta_mu(vp.p1, vp.p2, ctx.epsilon, ctx.gamma);
  vp.beta = bm.beta;
  vp.mu = bm.mu;
  const double far_up = lp_bounds(spec, static_cast<double>(ctx.c) * ctx.c * x, ctx.c).r_up;
  vp.mu_reduced = cp(far_up) / vp.p1 * vp.mu;
  vp.r_min = prof.r_min;
  vp.levels = prof.levels;
  return vp;
}

const GroupMember* GroupParams::find(std::uint32_t id) const {
  auto it = std::lower_bound(members.begin(), members.end(), id,
                             [](const GroupMember& m, std::uint32_t v) { return m.id < v; });
  return (it != members.end() && it->id == id) ? &*it : nullptr;
}

GroupParams make_group(std::uint32_t base, std::span<const double> base_weights,
                       std::vector<GroupMember> members) {
  if (members.empty()) throw ConfigError("a group needs at least one member");
  std::sort(members.begin(), members.end(),
            [](const GroupMember& a, const GroupMember& b) { return a.id < b.id; });
  GroupParams g;
  g.base = base;
  g.w_bucket = *std::min_element(base_weights.begin(), base_weights.end());
  for (const auto& m : members) {
    g.beta_group = std::max(g.beta_group, m.params.beta);
    g.b_range_levels = std::max(g.b_range_levels, m.params.levels);
  }
  g.members = std::move(members);
  return g;
}

GroupParams group_params(const WeightVector& base, std::span<const WeightVector> members,
                         const SolverContext& ctx) {
  std::vector<GroupMember> out;
  out.reserve(members.size());
  for (const auto& m : members) {
    auto vp = vector_params(base.weights, m.weights, ctx);
    if (!vp) {
      throw InfeasibleError("weight vector " + std::to_string(m.id) +
                            " cannot be served by base " + std::to_string(base.id));
    }
    out.push_back({m.id, *vp});
  }
  return make_group(base.id, base.weights, std::move(out));
}

int self_beta(std::span<const double> w, const SolverContext& ctx) {
  auto vp = vector_params(w, w, ctx);
  if (!vp) throw ConfigError("self-based parameters are unusable; check c");
  return vp->beta;
}

int tau_min(std::span<const WeightVector> set, const SolverContext& ctx) {
  int best = 0;
  for (const auto& w : set) best = std::max(best, self_beta(w.weights, ctx));
  return best;
}

}  // namespace wlsh
