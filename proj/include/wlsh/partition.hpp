#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wlsh/params.hpp"

namespace wlsh {

/// Parameters of every (base, target) pair of a weight-vector set.
/// Ids must equal positions: set[i].id == i.
class BetaTable {
 public:
  BetaTable() = default;
  BetaTable(std::span<const WeightVector> set, const SolverContext& ctx);

  std::size_t size() const { return m_; }
  const std::optional<VectorParams>& at(std::uint32_t base, std::uint32_t target) const {
    return cells_[static_cast<std::size_t>(base) * m_ + target];
  }
  int self_beta(std::uint32_t id) const { return at(id, id)->beta; }

 private:
  std::size_t m_ = 0;
  std::vector<std::optional<VectorParams>> cells_;
};

struct CandidateSet {
  std::uint32_t base = 0;
  std::vector<std::uint32_t> members;  // ascending
  int weight = 0;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

/// For each base, the maximal prefixes of its usable targets sorted by
/// (beta, id) whose largest beta stays within tau. Throws InfeasibleError
/// naming a vector that no candidate covers.
std::vector<CandidateSet> candidate_sets(const BetaTable& table, int tau);

/// Chvatal's greedy: repeatedly take the set with the least weight per newly
/// covered element; ties go to the smaller weight, then the lower base id,
/// then the earlier position. Throws InfeasibleError if the universe cannot
/// be covered.
std::vector<CandidateSet> greedy_weighted_set_cover(std::span<const std::uint32_t> universe,
                                                    std::span<const CandidateSet> candidates);

struct PartitionPlan {
  std::vector<GroupParams> groups;
  std::vector<std::uint32_t> assignment;  // weight id -> group index

  /// beta_S, the total number of hash tables.
  long long total_tables() const;
  const GroupParams& group_of(std::uint32_t weight_id) const;
};

/// Makes an overlapping cover disjoint: each vector joins the covering group
/// where its beta is smallest (ties: lower group index); emptied groups go.
PartitionPlan finalize_partition(std::span<const CandidateSet> cover, const BetaTable& table,
                                 std::span<const WeightVector> set);

/// candidate_sets + greedy cover + finalize.
PartitionPlan partition(std::span<const WeightVector> set, int tau, const BetaTable& table);
PartitionPlan partition(std::span<const WeightVector> set, int tau, const SolverContext& ctx);

/// One group per vector, each based on itself.
PartitionPlan naive_plan(std::span<const WeightVector> set, const BetaTable& table);

/// Sum of self-based table counts.
long long naive_total(const BetaTable& table);

/// Throws unless the plan's groups are disjoint, cover the set, respect tau
/// and carry consistent parameters.
void validate_plan(const PartitionPlan& plan, std::size_t set_size, int tau);

}  // namespace wlsh
