#include "wlsh/index.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "wlsh/binary_io.hpp"
#include "wlsh/parallel.hpp"

namespace wlsh {

namespace {

constexpr std::string_view kMagic = "WLSHIDX1";
constexpr std::uint32_t kVersion = 1;

std::int64_t clamp_i128(__int128 v) {
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  if (v < lo) return lo;
  if (v > hi) return hi;
  return static_cast<std::int64_t>(v);
}

void write_vector_params(std::ostream& out, const GroupMember& m) {
  io::put<std::uint32_t>(out, m.id);
  io::put<std::int32_t>(out, m.params.beta);
  for (double v : {m.params.mu, m.params.mu_reduced, m.params.x_up, m.params.y_down,
                   m.params.p1, m.params.p2, m.params.r_min}) {
    io::put<double>(out, v);
  }
  io::put<std::int32_t>(out, m.params.levels);
}

GroupMember read_vector_params(std::istream& in) {
  GroupMember m;
  m.id = io::get<std::uint32_t>(in);
  m.params.beta = io::get<std::int32_t>(in);
  m.params.mu = io::get<double>(in);
  m.params.mu_reduced = io::get<double>(in);
  m.params.x_up = io::get<double>(in);
  m.params.y_down = io::get<double>(in);
  m.params.p1 = io::get<double>(in);
  m.params.p2 = io::get<double>(in);
  m.params.r_min = io::get<double>(in);
  m.params.levels = io::get<std::int32_t>(in);
  return m;
}

void write_table(std::ostream& out, const HashTable& table) {
  write_hash_function(out, table.function());
  const auto keys = table.keys();
  const auto ids = table.ids();
  // Directory: one record per distinct bucket.
  std::vector<std::uint32_t> ordinal(keys.size());
  std::vector<std::pair<std::int64_t, std::uint32_t>> dir;  // (bucket, start)
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i == 0 || keys[i] != keys[i - 1]) dir.emplace_back(keys[i], static_cast<std::uint32_t>(i));
    ordinal[i] = static_cast<std::uint32_t>(dir.size() - 1);
  }
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(dir.size()));
  for (std::size_t b = 0; b < dir.size(); ++b) {
    const std::uint32_t end =
        b + 1 < dir.size() ? dir[b + 1].second : static_cast<std::uint32_t>(keys.size());
    io::put<std::int64_t>(out, dir[b].first);
    io::put<std::uint32_t>(out, dir[b].second);
    io::put<std::uint32_t>(out, end - dir[b].second);
  }
  const std::size_t pages = data_pages(keys.size());
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(pages));
  std::vector<std::uint32_t> page(kEntriesPerPage * 2);
  for (std::size_t p = 0; p < pages; ++p) {
    std::fill(page.begin(), page.end(), 0u);
    for (std::size_t j = 0; j < kEntriesPerPage; ++j) {
      const std::size_t i = p * kEntriesPerPage + j;
      if (i >= keys.size()) break;
      page[2 * j] = ordinal[i];
      page[2 * j + 1] = ids[i];
    }
    io::put_span<std::uint32_t>(out, page);
  }
}

HashTable read_table(std::istream& in, std::span<const double> base_weights, std::size_t n) {
  LpHashFunction fn = read_hash_function(in, base_weights);
  const auto buckets = io::get<std::uint32_t>(in);
  std::vector<std::int64_t> bucket_id(buckets);
  std::size_t expected = 0;
  for (std::uint32_t b = 0; b < buckets; ++b) {
    bucket_id[b] = io::get<std::int64_t>(in);
    const auto start = io::get<std::uint32_t>(in);
    const auto count = io::get<std::uint32_t>(in);
    if (start != expected || count == 0) throw IoError("corrupt bucket directory");
    if (b > 0 && bucket_id[b] <= bucket_id[b - 1]) throw IoError("unsorted bucket directory");
    expected += count;
  }
  if (expected != n) throw IoError("bucket directory does not cover the dataset");
  const auto pages = io::get<std::uint32_t>(in);
  if (pages != data_pages(n)) throw IoError("unexpected page count");
  std::vector<std::int64_t> keys(n);
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t p = 0; p < pages; ++p) {
    const auto page = io::get_vector<std::uint32_t>(in, kEntriesPerPage * 2);
    for (std::size_t j = 0; j < kEntriesPerPage; ++j) {
      const std::size_t i = p * kEntriesPerPage + j;
      if (i >= n) break;
      if (page[2 * j] >= buckets || page[2 * j + 1] >= n) throw IoError("corrupt bucket page");
      keys[i] = bucket_id[page[2 * j]];
      ids[i] = page[2 * j + 1];
    }
  }
  return HashTable(std::move(fn), std::move(keys), std::move(ids));
}

}  // namespace

HashTable::HashTable(LpHashFunction fn, std::vector<std::int64_t> keys,
                     std::vector<std::uint32_t> ids)
    : fn_(std::move(fn)), keys_(std::move(keys)), ids_(std::move(ids)) {
  if (keys_.size() != ids_.size()) throw ConfigError("hash table keys and ids differ in size");
}

HashTable HashTable::build(const Dataset& ds, LpHashFunction fn) {
  if (fn.dim() != ds.dim()) throw ConfigError("hash function and dataset dimensionality differ");
  const std::size_t n = ds.size();
  std::vector<std::int64_t> bucket(n);
  for (std::size_t i = 0; i < n; ++i) bucket[i] = hash_bucket(fn, ds.row(i));
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return bucket[a] < bucket[b] || (bucket[a] == bucket[b] && a < b);
  });
  std::vector<std::int64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = bucket[order[i]];
  return HashTable(std::move(fn), std::move(keys), std::move(order));
}

EntryRange HashTable::level_range(std::int64_t level_bucket_id, std::int64_t l) const {
  if (l < 1) throw ConfigError("bucket level must be >= 1");
  const __int128 lo = static_cast<__int128>(level_bucket_id) * l;
  const std::int64_t first = clamp_i128(lo);
  const std::int64_t last = clamp_i128(lo + l - 1);
  const auto b = std::lower_bound(keys_.begin(), keys_.end(), first);
  const auto e = std::upper_bound(b, keys_.end(), last);
  return {static_cast<std::size_t>(b - keys_.begin()), static_cast<std::size_t>(e - keys_.begin())};
}

std::size_t HashTable::bucket_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < keys_.size(); ++i) count += (i == 0 || keys_[i] != keys_[i - 1]);
  return count;
}

std::uint64_t table_seed(std::uint64_t seed, std::uint32_t group, std::uint32_t t) {
  return mix_seed(seed, 0x7ab1e000ULL + group, t);
}

Index Index::build(const Dataset& ds, std::vector<WeightVector> weights, PartitionPlan plan,
                   const IndexConfig& config,
                   const std::optional<std::vector<std::uint32_t>>& only_groups) {
  if (ds.size() == 0) throw ConfigError("cannot index an empty dataset");
  if (ds.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("dataset too large for 32-bit point ids");
  }
  for (const auto& w : weights) {
    if (w.dim() != ds.dim()) throw ConfigError("weight vector and dataset dimensionality differ");
  }
  validate_plan(plan, weights.size(), config.tau);
  Index index;
  index.config_ = config;
  index.config_.ctx.range = ds.range();
  index.digest_ = ds.digest();
  index.n_ = ds.size();
  index.d_ = ds.dim();
  index.weights_ = std::move(weights);
  index.plan_ = std::move(plan);
  index.tables_.resize(index.plan_.groups.size());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> jobs;  // (group, table)
  for (std::uint32_t g = 0; g < index.plan_.groups.size(); ++g) {
    if (only_groups && std::find(only_groups->begin(), only_groups->end(), g) == only_groups->end()) {
      continue;
    }
    index.tables_[g].resize(static_cast<std::size_t>(index.plan_.groups[g].beta_group));
    for (std::uint32_t t = 0; t < index.tables_[g].size(); ++t) jobs.emplace_back(g, t);
  }
  const auto& ctx = index.config_.ctx;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [g, t] = jobs[j];
    const auto& grp = index.plan_.groups[g];
    auto fn = sample_hash_function(ctx.metric.p, ds.dim(), grp.w_bucket, grp.b_range_levels, ctx.c,
                                   index.weights_[grp.base], table_seed(config.seed, g, t));
    index.tables_[g][t] = HashTable::build(ds, std::move(fn));
  });
  return index;
}

const HashTable& Index::table(std::uint32_t group, std::uint32_t t) const {
  if (group >= tables_.size()) throw ConfigError("unknown group " + std::to_string(group));
  const auto& tabs = tables_[group];
  if (tabs.empty()) throw ConfigError("group " + std::to_string(group) + " was not built");
  if (t >= tabs.size()) throw ConfigError("unknown table " + std::to_string(t));
  return tabs[t];
}

std::size_t Index::built_tables() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.size();
  return total;
}

void Index::check_dataset(const Dataset& ds) const {
  if (ds.size() != n_ || ds.dim() != d_ || ds.digest() != digest_) {
    throw ConfigError("dataset does not match the one the index was built from");
  }
}

void Index::save(std::ostream& out) const {
  const auto& ctx = config_.ctx;
  io::put_magic(out, kMagic);
  io::put<std::uint32_t>(out, kVersion);
  io::put<std::uint64_t>(out, digest_);
  io::put<double>(out, ctx.metric.p);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(ctx.c));
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(config_.tau));
  io::put<std::uint64_t>(out, config_.seed);
  io::put<std::uint8_t>(out, ctx.relaxation ? 1 : 0);
  io::put<std::int32_t>(out, ctx.relaxation ? ctx.relaxation->v : 0);
  io::put<std::int32_t>(out, ctx.relaxation ? ctx.relaxation->v_prime : 0);
  io::put<std::uint8_t>(out, ctx.reduction ? 1 : 0);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(n_));
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(d_));
  io::put<double>(out, ctx.epsilon);
  io::put<double>(out, ctx.gamma);
  io::put<std::int32_t>(out, ctx.range.lo);
  io::put<std::int32_t>(out, ctx.range.hi);

  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(weights_.size()));
  for (const auto& w : weights_) io::put_span<double>(out, w.weights);

  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(plan_.groups.size()));
  for (std::size_t g = 0; g < plan_.groups.size(); ++g) {
    const auto& grp = plan_.groups[g];
    io::put<std::uint32_t>(out, grp.base);
    io::put<std::int32_t>(out, grp.b_range_levels);
    io::put<double>(out, grp.w_bucket);
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(grp.beta_group));
    io::put<std::uint8_t>(out, tables_[g].empty() ? 0 : 1);
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(grp.members.size()));
    for (const auto& m : grp.members) write_vector_params(out, m);
  }
  for (const auto& tabs : tables_) {
    for (const auto& t : tabs) write_table(out, t);
  }
  if (!out) throw IoError("failed to write index");
}

void Index::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save(out);
}

Index Index::load(std::istream& in) {
  io::expect_magic(in, kMagic);
  if (io::get<std::uint32_t>(in) != kVersion) throw IoError("unsupported index version");
  Index index;
  index.digest_ = io::get<std::uint64_t>(in);
  auto& cfg = index.config_;
  const double p = io::get<double>(in);
  const auto c = static_cast<int>(io::get<std::uint32_t>(in));
  cfg.tau = static_cast<int>(io::get<std::uint32_t>(in));
  cfg.seed = io::get<std::uint64_t>(in);
  const bool relaxed = io::get<std::uint8_t>(in) != 0;
  const auto v = io::get<std::int32_t>(in);
  const auto vp = io::get<std::int32_t>(in);
  const bool reduction = io::get<std::uint8_t>(in) != 0;
  index.n_ = io::get<std::uint32_t>(in);
  index.d_ = io::get<std::uint32_t>(in);
  const double epsilon = io::get<double>(in);
  const double gamma = io::get<double>(in);
  ValueRange range;
  range.lo = io::get<std::int32_t>(in);
  range.hi = io::get<std::int32_t>(in);
  try {
    cfg.ctx = SolverContext::make(p, c, index.n_, range);
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt index header: ") + e.what());
  }
  cfg.ctx.epsilon = epsilon;
  cfg.ctx.gamma = gamma;
  cfg.ctx.reduction = reduction;
  if (relaxed) cfg.ctx.relaxation = Relaxation{v, vp};

  const auto m = io::get<std::uint32_t>(in);
  index.weights_.resize(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    index.weights_[i].id = i;
    index.weights_[i].weights = io::get_vector<double>(in, index.d_);
  }

  const auto groups = io::get<std::uint32_t>(in);
  auto& plan = index.plan_;
  plan.assignment.assign(m, 0);
  std::vector<char> built(groups, 0);
  for (std::uint32_t g = 0; g < groups; ++g) {
    GroupParams grp;
    grp.base = io::get<std::uint32_t>(in);
    grp.b_range_levels = io::get<std::int32_t>(in);
    grp.w_bucket = io::get<double>(in);
    grp.beta_group = static_cast<int>(io::get<std::uint32_t>(in));
    built[g] = static_cast<char>(io::get<std::uint8_t>(in));
    const auto members = io::get<std::uint32_t>(in);
    for (std::uint32_t j = 0; j < members; ++j) {
      grp.members.push_back(read_vector_params(in));
      if (grp.members.back().id >= m) throw IoError("plan member id out of range");
      plan.assignment[grp.members.back().id] = g;
    }
    if (grp.base >= m) throw IoError("plan base id out of range");
    plan.groups.push_back(std::move(grp));
  }
  try {
    validate_plan(plan, m, cfg.tau);
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt plan section: ") + e.what());
  }
  index.tables_.resize(groups);
  for (std::uint32_t g = 0; g < groups; ++g) {
    if (!built[g]) continue;
    const auto& grp = plan.groups[g];
    auto& tabs = index.tables_[g];
    tabs.reserve(static_cast<std::size_t>(grp.beta_group));
    for (int t = 0; t < grp.beta_group; ++t) {
      tabs.push_back(read_table(in, index.weights_[grp.base].weights, index.n_));
    }
  }
  return index;
}

Index Index::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

std::vector<std::uint32_t> read_bucket(const Index& index, std::uint32_t group, std::uint32_t t,
                                       std::int64_t level, std::int64_t level_bucket_id,
                                       IoCounter& counter) {
  const HashTable& table = index.table(group, t);
  const EntryRange r = table.level_range(level_bucket_id, level);
  counter.bucket_blocks_read += 1 + data_pages(r.size());
  const auto ids = table.ids();
  return {ids.begin() + static_cast<std::ptrdiff_t>(r.begin),
          ids.begin() + static_cast<std::ptrdiff_t>(r.end)};
}

WidenResult widen_range(const HashTable& table, EntryRange previous, std::int64_t level_bucket_id,
                        std::int64_t level, IoCounter& counter) {
  const EntryRange now = table.level_range(level_bucket_id, level);
  WidenResult out;
  if (previous.empty()) {
    out.left = now;
    out.right = {now.end, now.end};
  } else {
    if (previous.begin < now.begin || previous.end > now.end) {
      throw ConfigError("widened bucket does not contain the previous one");
    }
    out.left = {now.begin, previous.begin};
    out.right = {previous.end, now.end};
  }
  counter.bucket_blocks_read += 1 + data_pages(out.left.size()) + data_pages(out.right.size());
  return out;
}

std::span<const std::int32_t> PointFetcher::fetch(std::uint32_t id, IoCounter& counter) {
  if (id >= ds_->size()) throw ConfigError("point id out of range");
  if (seen_.insert(id).second) counter.candidate_blocks_read += point_pages(ds_->dim());
  return ds_->row(id);
}

}  // namespace wlsh
