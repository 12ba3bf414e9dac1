#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wlsh/bounds.hpp"
#include "wlsh/lsh_family.hpp"
#include "wlsh/metric.hpp"

namespace wlsh {

/// 100/n, clamped to [1e-7, 1]. Above 1 the z term of the table-count formula
/// degenerates; below 1e-7 it overflows for no practical gain.
double default_gamma(std::size_t n);

/// Everything the per-vector formulas need besides the two weight vectors.
struct SolverContext {
  Metric metric = Metric::lp(1.0);
  int c = 3;
  std::size_t n = 0;
  double epsilon = 0.01;
  double gamma = 0.0;
  std::optional<Relaxation> relaxation;
  bool reduction = false;
  ValueRange range{};

  /// l_p context with epsilon = 0.01 and gamma = default_gamma(n).
  static SolverContext make(double p, int c, std::size_t n, ValueRange range);
};

struct RadiusProfile {
  double r_min = 0.0;
  double r_max = 0.0;
  int levels = 0;
};

/// Smallest L >= 0 with c^L >= ratio.
int ceil_log(double ratio, int c);

/// r_min = min_i w_i (distinct integer points differ by >= 1 somewhere);
/// r_max = (sum_i (w_i (hi - lo))^p)^(1/p).
RadiusProfile radius_profile(ValueRange range, std::span<const double> w, double p, int c);

struct BetaMu {
  int beta = 0;
  double mu = 0.0;
  double z = 0.0;
};

/// z = sqrt(ln(2/gamma) / ln(1/eps)), beta = ceil(ln(1/eps)(1+z)^2 / (2 (P1-P2)^2)),
/// mu = (z P1 + P2) / (1 + z) * beta. Throws ConfigError unless 0 < P2 < P1 < 1.
BetaMu beta_mu(double p1, double p2, double epsilon, double gamma);
BetaMu beta_mu(double p1, double p2, std::size_t n);

struct VectorParams {
  int beta = 0;
  double mu = 0.0;
  double mu_reduced = 0.0;
  double x_up = 0.0;
  double y_down = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double r_min = 0.0;
  int levels = 0;

  /// Collision threshold actually used by queries.
  double threshold(bool reduction) const { return reduction ? mu_reduced : mu; }
};

/// Parameters of `target` when answered from tables of the `base` family with
/// bucket width r_min(base). std::nullopt when the derived bounds at
/// x = r_min(target), y = c x are not usable.
std::optional<VectorParams> vector_params(std::span<const double> base,
                                          std::span<const double> target,
                                          const SolverContext& ctx);

struct GroupMember {
  std::uint32_t id = 0;
  VectorParams params;
};

struct GroupParams {
  std::uint32_t base = 0;
  std::vector<GroupMember> members;  // ascending by id
  int beta_group = 0;
  double w_bucket = 0.0;
  int b_range_levels = 0;

  const GroupMember* find(std::uint32_t id) const;
};

/// Assembles a group from already computed member parameters.
GroupParams make_group(std::uint32_t base, std::span<const double> base_weights,
                       std::vector<GroupMember> members);

/// Computes member parameters against `base`; throws InfeasibleError naming
/// the first member that cannot be served by the base family.
GroupParams group_params(const WeightVector& base, std::span<const WeightVector> members,
                         const SolverContext& ctx);

/// Self-based table count of one vector (plain C2LSH parameters).
int self_beta(std::span<const double> w, const SolverContext& ctx);

/// Largest self-based table count over the set; the smallest feasible tau.
int tau_min(std::span<const WeightVector> set, const SolverContext& ctx);

}  // namespace wlsh
