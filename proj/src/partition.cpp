#include "wlsh/partition.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "wlsh/parallel.hpp"

namespace wlsh {

namespace {

void check_ids(std::span<const WeightVector> set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].id != i) throw ConfigError("weight vector ids must equal their positions");
  }
}

}  // namespace

BetaTable::BetaTable(std::span<const WeightVector> set, const SolverContext& ctx)
    : m_(set.size()), cells_(set.size() * set.size()) {
  check_ids(set);
  for (const auto& w : set) validate_weights(w);
  parallel_for(m_, [&](std::size_t b) {
    for (std::size_t t = 0; t < m_; ++t) {
      cells_[b * m_ + t] = vector_params(set[b].weights, set[t].weights, ctx);
    }
  });
  for (std::size_t i = 0; i < m_; ++i) {
    if (!cells_[i * m_ + i]) {
      throw ConfigError("weight vector " + std::to_string(i) + " is unusable even as its own base");
    }
  }
}

std::vector<CandidateSet> candidate_sets(const BetaTable& table, int tau) {
  const auto m = static_cast<std::uint32_t>(table.size());
  std::vector<CandidateSet> out;
  std::vector<char> covered(m, 0);
  std::vector<std::pair<int, std::uint32_t>> order;
  for (std::uint32_t b = 0; b < m; ++b) {
    order.clear();
    for (std::uint32_t t = 0; t < m; ++t) {
      const auto& vp = table.at(b, t);
      if (vp && vp->beta <= tau) order.emplace_back(vp->beta, t);
    }
    std::sort(order.begin(), order.end());
    std::vector<std::uint32_t> prefix;
    for (std::size_t j = 0; j < order.size(); ++j) {
      prefix.push_back(order[j].second);
      const bool boundary = j + 1 == order.size() || order[j + 1].first > order[j].first;
      if (!boundary) continue;
      CandidateSet cs;
      cs.base = b;
      cs.members = prefix;
      std::sort(cs.members.begin(), cs.members.end());
      cs.weight = order[j].first;
      out.push_back(std::move(cs));
    }
    for (const auto& [beta, t] : order) covered[t] = 1;
  }
  for (std::uint32_t i = 0; i < m; ++i) {
    if (!covered[i]) {
      throw InfeasibleError("tau=" + std::to_string(tau) + " is below the self-based beta " +
                            std::to_string(table.self_beta(i)) + " of weight vector " +
                            std::to_string(i));
    }
  }
  return out;
}

std::vector<CandidateSet> greedy_weighted_set_cover(std::span<const std::uint32_t> universe,
                                                    std::span<const CandidateSet> candidates) {
  std::vector<std::uint32_t> left(universe.begin(), universe.end());
  std::sort(left.begin(), left.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  std::vector<CandidateSet> cover;
  std::vector<char> used(candidates.size(), 0);
  while (!left.empty()) {
    std::size_t best = candidates.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const auto& cs = candidates[i];
      std::size_t gain = 0;
      for (auto id : cs.members) gain += std::binary_search(left.begin(), left.end(), id);
      if (gain == 0) continue;
      if (best == candidates.size()) {
        best = i;
        best_gain = gain;
        continue;
      }
      const auto& cur = candidates[best];
      // weight / gain compared by cross-multiplication
      const long long lhs = static_cast<long long>(cs.weight) * best_gain;
      const long long rhs = static_cast<long long>(cur.weight) * gain;
      if (lhs < rhs || (lhs == rhs && (cs.weight < cur.weight ||
                                       (cs.weight == cur.weight && cs.base < cur.base)))) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == candidates.size()) {
      throw InfeasibleError("weight vector " + std::to_string(left.front()) +
                            " is not covered by any candidate set");
    }
    used[best] = 1;
    cover.push_back(candidates[best]);
    std::vector<std::uint32_t> rest;
    std::set_difference(left.begin(), left.end(), candidates[best].members.begin(),
                        candidates[best].members.end(), std::back_inserter(rest));
    left = std::move(rest);
  }
  return cover;
}

long long PartitionPlan::total_tables() const {
  long long total = 0;
  for (const auto& g : groups) total += g.beta_group;
  return total;
}

const GroupParams& PartitionPlan::group_of(std::uint32_t weight_id) const {
  if (weight_id >= assignment.size()) {
    throw ConfigError("unknown weight vector id " + std::to_string(weight_id));
  }
  return groups[assignment[weight_id]];
}

PartitionPlan finalize_partition(std::span<const CandidateSet> cover, const BetaTable& table,
                                 std::span<const WeightVector> set) {
  const auto m = static_cast<std::uint32_t>(table.size());
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> choice(m, kNone);
  for (std::uint32_t i = 0; i < m; ++i) {
    int best_beta = std::numeric_limits<int>::max();
    for (std::uint32_t g = 0; g < cover.size(); ++g) {
      const auto& cs = cover[g];
      if (!std::binary_search(cs.members.begin(), cs.members.end(), i)) continue;
      const int beta = table.at(cs.base, i)->beta;
      if (beta < best_beta) {
        best_beta = beta;
        choice[i] = g;
      }
    }
    if (choice[i] == kNone) {
      throw InfeasibleError("weight vector " + std::to_string(i) + " is not covered");
    }
  }
  PartitionPlan plan;
  plan.assignment.assign(m, 0);
  for (std::uint32_t g = 0; g < cover.size(); ++g) {
    std::vector<GroupMember> members;
    for (std::uint32_t i = 0; i < m; ++i) {
      if (choice[i] == g) members.push_back({i, *table.at(cover[g].base, i)});
    }
    if (members.empty()) continue;
    const auto index = static_cast<std::uint32_t>(plan.groups.size());
    for (const auto& mem : members) plan.assignment[mem.id] = index;
    plan.groups.push_back(make_group(cover[g].base, set[cover[g].base].weights, std::move(members)));
  }
  return plan;
}

PartitionPlan partition(std::span<const WeightVector> set, int tau, const BetaTable& table) {
  const auto cands = candidate_sets(table, tau);
  std::vector<std::uint32_t> universe(table.size());
  for (std::uint32_t i = 0; i < universe.size(); ++i) universe[i] = i;
  const auto cover = greedy_weighted_set_cover(universe, cands);
  return finalize_partition(cover, table, set);
}

PartitionPlan partition(std::span<const WeightVector> set, int tau, const SolverContext& ctx) {
  return partition(set, tau, BetaTable(set, ctx));
}

PartitionPlan naive_plan(std::span<const WeightVector> set, const BetaTable& table) {
  PartitionPlan plan;
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    plan.assignment.push_back(i);
    plan.groups.push_back(make_group(i, set[i].weights, {{i, *table.at(i, i)}}));
  }
  return plan;
}

long long naive_total(const BetaTable& table) {
  long long total = 0;
  for (std::uint32_t i = 0; i < table.size(); ++i) total += table.self_beta(i);
  return total;
}

void validate_plan(const PartitionPlan& plan, std::size_t set_size, int tau) {
  if (plan.assignment.size() != set_size) throw ConfigError("plan assignment size mismatch");
  std::vector<int> seen(set_size, 0);
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const auto& grp = plan.groups[g];
    if (grp.members.empty()) throw ConfigError("plan contains an empty group");
    if (grp.beta_group > tau) throw ConfigError("group exceeds tau");
    int max_beta = 0;
    for (const auto& mem : grp.members) {
      if (mem.id >= set_size) throw ConfigError("plan member id out of range");
      if (++seen[mem.id] > 1) throw ConfigError("plan groups overlap");
      if (plan.assignment[mem.id] != g) throw ConfigError("plan assignment disagrees with groups");
      if (mem.params.beta < 1) throw ConfigError("plan member has no hash tables");
      max_beta = std::max(max_beta, mem.params.beta);
    }
    if (max_beta != grp.beta_group) throw ConfigError("group beta is not the member maximum");
  }
  for (std::size_t i = 0; i < set_size; ++i) {
    if (seen[i] != 1) throw ConfigError("plan does not cover weight vector " + std::to_string(i));
  }
}

}  // namespace wlsh
