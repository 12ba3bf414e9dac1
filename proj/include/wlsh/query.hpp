#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wlsh/index.hpp"

namespace wlsh {

struct SearchOptions {
  std::size_t k = 10;
  /// Overrides the index's collision-threshold reduction flag.
  std::optional<bool> reduction;
};

struct QueryResult {
  std::vector<Neighbor> neighbors;  // ascending by (distance, id)
  double radius_final = 0.0;
  std::size_t candidates_checked = 0;
  IoCounter io;
  int rounds = 0;
  std::size_t probes = 0;
};

/// Per-query collision counts and the frequent set C.
class CollisionState {
 public:
  /// A point becomes frequent once its count reaches ceil(threshold) (at least 1).
  CollisionState(std::size_t n, double threshold);

  std::uint32_t count(std::uint32_t id) const { return counts_[id]; }
  bool frequent(std::uint32_t id) const { return counts_[id] >= needed_; }
  std::uint32_t needed() const { return needed_; }
  std::span<const std::uint32_t> frequent_ids() const { return frequent_; }

  /// Adds one collision for each member; returns how many became frequent
  /// (they are appended to frequent_ids()).
  std::size_t add(std::span<const std::uint32_t> members);

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> frequent_;
  std::uint32_t needed_;
};

/// Counts one table's newly exposed bucket members. Each point sits in one
/// bucket per table and level ranges are nested, so a point is never counted
/// twice for the same table.
inline std::size_t count_collisions(CollisionState& state,
                                    std::span<const std::uint32_t> members) {
  return state.add(members);
}

/// (c,k)-WNN query of `q` under weight vector `weight_id`.
QueryResult search(const Index& index, const Dataset& ds, std::span<const double> q,
                   std::uint32_t weight_id, const SearchOptions& options);

}  // namespace wlsh
