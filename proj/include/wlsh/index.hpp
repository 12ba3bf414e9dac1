#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wlsh/lsh_family.hpp"
#include "wlsh/partition.hpp"

namespace wlsh {

inline constexpr std::size_t kPageSize = 4096;
inline constexpr std::size_t kEntryBytes = 8;  // (u32 bucket ordinal, u32 point id)
inline constexpr std::size_t kEntriesPerPage = kPageSize / kEntryBytes;

struct IoCounter {
  std::uint64_t bucket_blocks_read = 0;
  std::uint64_t candidate_blocks_read = 0;

  std::uint64_t total() const { return bucket_blocks_read + candidate_blocks_read; }
  friend bool operator==(const IoCounter&, const IoCounter&) = default;
};

/// Pages touched by a contiguous run of `entries` bucket entries.
inline std::uint64_t data_pages(std::size_t entries) {
  return (entries * kEntryBytes + kPageSize - 1) / kPageSize;
}

/// Pages holding one stored point (4 bytes per coordinate).
inline std::uint64_t point_pages(std::size_t d) { return (4 * d + kPageSize - 1) / kPageSize; }

/// Half-open range of entry positions inside one table.
struct EntryRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
};

/// One hash table: entries sorted by (level-1 bucket, point id).
class HashTable {
 public:
  HashTable() = default;
  HashTable(LpHashFunction fn, std::vector<std::int64_t> keys, std::vector<std::uint32_t> ids);

  /// Hashes every row of `ds` with `fn`.
  static HashTable build(const Dataset& ds, LpHashFunction fn);

  const LpHashFunction& function() const { return fn_; }
  std::size_t entries() const { return ids_.size(); }
  std::span<const std::int64_t> keys() const { return keys_; }
  std::span<const std::uint32_t> ids() const { return ids_; }

  /// Entries whose level-1 bucket lies in [level_bucket * l, level_bucket * l + l - 1].
  EntryRange level_range(std::int64_t level_bucket_id, std::int64_t l) const;

  std::size_t bucket_count() const;

 private:
  LpHashFunction fn_;
  std::vector<std::int64_t> keys_;
  std::vector<std::uint32_t> ids_;
};

/// Settings fixed at build time and recorded in the index header.
struct IndexConfig {
  SolverContext ctx;
  int tau = 0;
  std::uint64_t seed = 0;
};

class Index {
 public:
  /// Builds the tables of every group, or only of `only_groups` when given.
  static Index build(const Dataset& ds, std::vector<WeightVector> weights, PartitionPlan plan,
                     const IndexConfig& config,
                     const std::optional<std::vector<std::uint32_t>>& only_groups = std::nullopt);

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static Index load(std::istream& in);
  static Index load(const std::string& path);

  const IndexConfig& config() const { return config_; }
  const PartitionPlan& plan() const { return plan_; }
  const std::vector<WeightVector>& weights() const { return weights_; }
  std::uint64_t dataset_digest() const { return digest_; }
  std::size_t n() const { return n_; }
  std::size_t dim() const { return d_; }

  bool group_built(std::uint32_t group) const { return !tables_.at(group).empty(); }
  std::span<const HashTable> tables(std::uint32_t group) const { return tables_.at(group); }
  const HashTable& table(std::uint32_t group, std::uint32_t t) const;
  std::size_t built_tables() const;

  /// Throws ConfigError unless `ds` is the dataset the index was built from.
  void check_dataset(const Dataset& ds) const;

 private:
  IndexConfig config_;
  std::uint64_t digest_ = 0;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<WeightVector> weights_;
  PartitionPlan plan_;
  std::vector<std::vector<HashTable>> tables_;  // per group; empty when not built
};

/// Seed of table t in group g.
std::uint64_t table_seed(std::uint64_t seed, std::uint32_t group, std::uint32_t t);

/// Point ids of a level-l bucket. Charges one directory page plus the data
/// pages of the run; an empty bucket costs the directory page only.
std::vector<std::uint32_t> read_bucket(const Index& index, std::uint32_t group, std::uint32_t t,
                                       std::int64_t level, std::int64_t level_bucket_id,
                                       IoCounter& counter);

/// Incremental probe of one table as the level widens from l to c*l: the new
/// range contains the old one, so at most two side runs are newly exposed.
struct WidenResult {
  EntryRange left;
  EntryRange right;
};
WidenResult widen_range(const HashTable& table, EntryRange previous, std::int64_t level_bucket_id,
                        std::int64_t level, IoCounter& counter);

/// Candidate fetch with per-query deduplication; charges point_pages(d) once
/// per distinct point.
class PointFetcher {
 public:
  explicit PointFetcher(const Dataset& ds) : ds_(&ds) {}

  std::span<const std::int32_t> fetch(std::uint32_t id, IoCounter& counter);
  std::size_t distinct() const { return seen_.size(); }

 private:
  const Dataset* ds_;
  std::unordered_set<std::uint32_t> seen_;
};

}  // namespace wlsh
