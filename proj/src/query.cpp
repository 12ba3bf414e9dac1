#include "wlsh/query.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wlsh {

CollisionState::CollisionState(std::size_t n, double threshold)
    : counts_(n, 0),
      needed_(static_cast<std::uint32_t>(std::max(1.0, std::ceil(threshold)))) {}

std::size_t CollisionState::add(std::span<const std::uint32_t> members) {
  std::size_t promoted = 0;
  for (std::uint32_t id : members) {
    if (++counts_[id] == needed_) {
      frequent_.push_back(id);
      ++promoted;
    }
  }
  return promoted;
}

QueryResult search(const Index& index, const Dataset& ds, std::span<const double> q,
                   std::uint32_t weight_id, const SearchOptions& options) {
  const auto& cfg = index.config();
  const auto& ctx = cfg.ctx;
  if (q.size() != index.dim()) throw ConfigError("query dimensionality mismatch");
  if (options.k == 0) throw ConfigError("k must be at least 1");
  if (options.k > ds.size()) throw ConfigError("k exceeds the dataset size");
  if (ds.size() != index.n() || ds.dim() != index.dim()) {
    throw ConfigError("dataset does not match the index");
  }
  if (weight_id >= index.weights().size()) {
    throw ConfigError("unknown weight vector id " + std::to_string(weight_id));
  }
  const std::uint32_t g = index.plan().assignment[weight_id];
  const GroupParams& grp = index.plan().groups[g];
  const GroupMember* member = grp.find(weight_id);
  if (member == nullptr) throw ConfigError("plan does not list weight vector");
  if (!index.group_built(g)) {
    throw ConfigError("tables of the group serving weight vector " + std::to_string(weight_id) +
                      " were not built");
  }
  const VectorParams& vp = member->params;
  const auto tables = index.tables(g);
  const auto beta = static_cast<std::size_t>(vp.beta);
  const std::span<const double> w = index.weights()[weight_id].weights;
  const bool reduce = options.reduction.value_or(ctx.reduction);

  QueryResult res;
  CollisionState state(ds.size(), vp.threshold(reduce));
  PointFetcher fetcher(ds);
  std::vector<double> dist;  // parallel to state.frequent_ids()
  const std::size_t k = options.k;
  const double limit = static_cast<double>(k) + ctx.gamma * static_cast<double>(ds.size());

  std::vector<std::int64_t> qhash(beta);
  for (std::size_t t = 0; t < beta; ++t) qhash[t] = hash_bucket(tables[t].function(), q);
  std::vector<EntryRange> ranges(beta);

  double R = vp.r_min;
  std::int64_t l = 1;
  std::size_t near = 0;
  bool done = false;
  for (int round = 0; round <= vp.levels && !done; ++round) {
    res.rounds = round + 1;
    res.radius_final = R;
    const double cr = ctx.c * R;
    near = static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(),
                                                  [cr](double x) { return x <= cr; }));
    for (std::size_t t = 0; t < beta; ++t) {
      const HashTable& table = tables[t];
      const WidenResult wr =
          widen_range(table, ranges[t], level_bucket(qhash[t], l), l, res.io);
      ++res.probes;
      ranges[t] = {wr.left.begin, wr.right.end};
      const auto ids = table.ids();
      const std::size_t before = state.frequent_ids().size();
      count_collisions(state, ids.subspan(wr.left.begin, wr.left.size()));
      count_collisions(state, ids.subspan(wr.right.begin, wr.right.size()));
      const auto freq = state.frequent_ids();
      for (std::size_t i = before; i < freq.size(); ++i) {
        const auto row = fetcher.fetch(freq[i], res.io);
        const double d = weighted_distance(ctx.metric, w, row, q);
        dist.push_back(d);
        near += d <= cr;
      }
      if (near >= k || static_cast<double>(freq.size()) >= limit) {
        done = true;
        break;
      }
    }
    if (!done) {
      R *= ctx.c;
      l *= ctx.c;
    }
  }

  const auto freq = state.frequent_ids();
  res.candidates_checked = freq.size();
  std::vector<Neighbor> all(freq.size());
  for (std::size_t i = 0; i < freq.size(); ++i) all[i] = {freq[i], dist[i]};
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
  all.resize(take);
  res.neighbors = std::move(all);
  return res;
}

}  // namespace wlsh
