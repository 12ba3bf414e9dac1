#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wlsh/query.hpp"

namespace wlsh {

/// n*d i.i.d. uniform integers in [range.lo, range.hi].
Dataset gen_synthetic_dataset(std::size_t n, std::size_t d, ValueRange range, std::uint64_t seed);

struct WeightGenSpec {
  std::size_t cardinality = 64;  // |S|
  std::size_t n_subset = 8;
  std::size_t n_subrange = 8;
  std::size_t d = 32;
  double lo = 1.0;
  double hi = 10.0;
  std::uint64_t seed = 1;
};

/// |S| / n_subset vectors per subset. Each subset picks one of n_subrange
/// equal-width subranges of [lo, hi] per dimension; members draw each weight
/// uniformly inside that dimension's subrange.
std::vector<WeightVector> gen_weight_vectors(const WeightGenSpec& spec);

struct Query {
  std::uint32_t point_id = 0;  // row in the original dataset
  std::uint32_t weight_id = 0;
  std::vector<double> coords;
};

struct QuerySet {
  Dataset data;  // original dataset minus the query points, renumbered
  std::vector<Query> queries;
};

/// Removes n_points random points and crosses them with n_vectors distinct
/// random weight ids out of [0, set_size).
QuerySet gen_query_set(const Dataset& ds, std::size_t set_size, std::size_t n_points,
                       std::size_t n_vectors, std::uint64_t seed);

struct RatioResult {
  double ratio = 0.0;        // mean over used ranks
  std::vector<double> per_rank;
  std::size_t excluded = 0;  // ranks with true distance 0 but reported > 0
  std::size_t missing = 0;   // ranks the search did not fill
};

/// Mean of reported_i / true_i over ranks. A zero true distance counts as 1
/// when the reported distance is also 0 and is excluded otherwise.
RatioResult overall_ratio(std::span<const Neighbor> reported, std::span<const Neighbor> truth);

enum class AlshKind { kSL, kS2 };

struct RhoGrid {
  std::size_t w_points = 128;
  double w_lo = 0.5;
  double w_hi = 50.0;
  std::size_t v_points = 128;
};

struct RhoResult {
  double rho = 0.0;
  double tables = 0.0;  // n^rho
  double w = 0.0;       // minimizing bucket width (SL only)
  double v = 0.0;       // minimizing V
};

/// Exponent of the asymmetric-LSH baselines for a single radius R, minimized
/// over the grid. Weights are rescaled to unit l1 norm and
/// eta = sqrt(d) * ||W||_2. Throws InfeasibleError if no grid point is valid.
RhoResult alsh_rho(AlshKind kind, std::span<const WeightVector> set, double R, int c,
                   std::size_t n, const RhoGrid& grid = {});

struct BenchConfig {
  std::size_t n = 10000;
  std::size_t d = 32;
  std::size_t set_size = 64;
  std::size_t n_subset = 8;
  std::size_t n_subrange = 8;
  double p = 1.0;
  int c = 3;
  std::size_t k = 10;
  int tau = 0;  // 0 selects 1000 for l1 and 500 otherwise
  std::optional<Relaxation> relaxation;
  bool reduction = false;
  bool naive = false;  // one group per vector instead of table sharing
  std::size_t query_points = 50;
  std::size_t query_vectors = 10;
  std::uint64_t seed = 1;
  bool plan_only = false;
};

int default_tau(double p);

struct QueryRecord {
  std::uint32_t query_point_id = 0;
  std::uint32_t weight_id = 0;
  std::size_t k = 0;
  std::uint64_t io_bucket = 0;
  std::uint64_t io_candidate = 0;
  double ratio = 0.0;
  double radius_final = 0.0;
  std::size_t candidates_checked = 0;
  double min_rank_ratio = 0.0;
  std::size_t ranks_within_c = 0;
  std::size_t ranks_used = 0;
  std::size_t ranks_excluded = 0;
  std::size_t ranks_missing = 0;
};

struct BenchReport {
  long long beta_total = 0;
  long long naive_total = 0;
  int tau = 0;
  int tau_min = 0;
  std::size_t groups = 0;
  std::size_t tables_built = 0;
  std::size_t queries = 0;
  double avg_io = 0.0;
  double avg_io_bucket = 0.0;
  double avg_io_candidate = 0.0;
  double avg_overall_ratio = 0.0;
  double min_rank_ratio = 0.0;
  double frac_ranks_within_c = 0.0;
  std::size_t ranks_excluded = 0;
  std::size_t ranks_missing = 0;
  double seconds = 0.0;
  std::vector<QueryRecord> records;
};

/// Generates data, weights and queries, plans, builds the tables of the
/// groups that serve queries (one group at a time) and runs the query set.
BenchReport run_benchmark(const BenchConfig& config);

void write_report_csv(std::ostream& out, const BenchReport& report);
/// JSON summary (no per-query records).
std::string report_summary_json(const BenchConfig& config, const BenchReport& report);

// Text formats shared with the command-line tool.
void save_weights(const std::string& path, std::span<const WeightVector> set);
std::vector<WeightVector> load_weights(const std::string& path);
void save_queries(const std::string& path, std::span<const Query> queries);
std::vector<Query> load_queries(const std::string& path);

}  // namespace wlsh
