#include "wlsh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wlsh/parallel.hpp"

namespace wlsh {

namespace {

// First `count` entries of a seeded Fisher-Yates shuffle of [0, n).
std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                      std::mt19937_64& rng) {
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

// The l2 collision probability in closed form; it is evaluated millions of
// times by the rho grid search.
double p_l2(double w, double r) {
  const double s = w / r;
  const double tail = 0.5 * std::erfc(s / std::numbers::sqrt2);
  return 1.0 - 2.0 * tail -
         2.0 / (std::sqrt(2.0 * std::numbers::pi) * s) * (1.0 - std::exp(-0.5 * s * s));
}

std::vector<double> etas(std::span<const WeightVector> set) {
  std::vector<double> out;
  for (const auto& w : set) {
    validate_weights(w);
    double l1 = 0.0, l2 = 0.0;
    for (double x : w.weights) l1 += x;
    for (double x : w.weights) l2 += (x / l1) * (x / l1);
    out.push_back(std::sqrt(static_cast<double>(w.dim())) * std::sqrt(l2));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> split_numbers(const std::string& line) {
  std::istringstream ss(line);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  if (!ss.eof()) throw IoError("malformed number in line: " + line);
  return out;
}

}  // namespace

Dataset gen_synthetic_dataset(std::size_t n, std::size_t d, ValueRange range, std::uint64_t seed) {
  if (d == 0) throw ConfigError("dimensionality must be positive");
  if (range.hi < range.lo) throw ConfigError("invalid value range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int32_t> dist(range.lo, range.hi);
  std::vector<std::int32_t> coords(n * d);
  for (auto& v : coords) v = dist(rng);
  return Dataset(d, range, std::move(coords));
}

std::vector<WeightVector> gen_weight_vectors(const WeightGenSpec& spec) {
  if (spec.cardinality == 0 || spec.n_subset == 0 || spec.n_subrange == 0 || spec.d == 0) {
    throw ConfigError("weight generation sizes must be positive");
  }
  if (spec.cardinality % spec.n_subset != 0) {
    throw ConfigError("|S| must be divisible by #Subset");
  }
  if (!(spec.lo > 0.0 && spec.hi > spec.lo)) throw ConfigError("weight range must be 0 < lo < hi");
  std::mt19937_64 rng(spec.seed);
  const double width = (spec.hi - spec.lo) / static_cast<double>(spec.n_subrange);
  const std::size_t per_subset = spec.cardinality / spec.n_subset;
  std::uniform_int_distribution<std::size_t> pick(0, spec.n_subrange - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<WeightVector> out;
  out.reserve(spec.cardinality);
  std::vector<std::size_t> sub(spec.d);
  for (std::size_t s = 0; s < spec.n_subset; ++s) {
    for (auto& j : sub) j = pick(rng);
    for (std::size_t m = 0; m < per_subset; ++m) {
      WeightVector w;
      w.id = static_cast<std::uint32_t>(out.size());
      w.weights.resize(spec.d);
      for (std::size_t i = 0; i < spec.d; ++i) {
        const double lo = spec.lo + static_cast<double>(sub[i]) * width;
        w.weights[i] = lo + unit(rng) * width;
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

QuerySet gen_query_set(const Dataset& ds, std::size_t set_size, std::size_t n_points,
                       std::size_t n_vectors, std::uint64_t seed) {
  if (n_points >= ds.size()) throw ConfigError("cannot remove that many query points");
  if (n_vectors > set_size) throw ConfigError("more query vectors than weight vectors");
  std::mt19937_64 rng(seed);
  auto points = sample_without_replacement(ds.size(), n_points, rng);
  auto vectors = sample_without_replacement(set_size, n_vectors, rng);
  std::sort(points.begin(), points.end());
  std::sort(vectors.begin(), vectors.end());

  QuerySet qs;
  std::vector<std::int32_t> kept;
  kept.reserve((ds.size() - n_points) * ds.dim());
  std::size_t next = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.row(i);
    if (next < points.size() && points[next] == i) {
      ++next;
      continue;
    }
    kept.insert(kept.end(), row.begin(), row.end());
  }
  qs.data = Dataset(ds.dim(), ds.range(), std::move(kept));
  for (auto pid : points) {
    const auto row = ds.row(pid);
    for (auto wid : vectors) {
      Query q;
      q.point_id = pid;
      q.weight_id = wid;
      q.coords.assign(row.begin(), row.end());
      qs.queries.push_back(std::move(q));
    }
  }
  return qs;
}

RatioResult overall_ratio(std::span<const Neighbor> reported, std::span<const Neighbor> truth) {
  RatioResult out;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (i >= reported.size()) {
      ++out.missing;
      continue;
    }
    double r;
    if (truth[i].distance == 0.0) {
      if (reported[i].distance != 0.0) {
        ++out.excluded;
        continue;
      }
      r = 1.0;
    } else {
      r = reported[i].distance / truth[i].distance;
    }
    out.per_rank.push_back(r);
    sum += r;
    ++used;
  }
  out.ratio = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

RhoResult alsh_rho(AlshKind kind, std::span<const WeightVector> set, double R, int c,
                   std::size_t n, const RhoGrid& grid) {
  if (set.empty()) throw ConfigError("empty weight vector set");
  if (!(R > 0.0) || c < 2) throw ConfigError("rho requires R > 0 and c >= 2");
  if (grid.v_points == 0 || grid.w_points == 0) throw ConfigError("empty rho grid");
  const auto eta = etas(set);
  RhoResult best;
  best.rho = std::numeric_limits<double>::infinity();
  std::vector<double> ws;
  if (kind == AlshKind::kSL) {
    if (!(grid.w_lo > 0.0 && grid.w_hi >= grid.w_lo)) throw ConfigError("invalid w grid");
    for (std::size_t i = 0; i < grid.w_points; ++i) {
      const double t = grid.w_points == 1 ? 0.0 : static_cast<double>(i) / (grid.w_points - 1);
      ws.push_back(grid.w_lo * std::pow(grid.w_hi / grid.w_lo, t));
    }
  } else {
    ws.push_back(0.0);
  }
  for (double w : ws) {
    for (std::size_t j = 1; j <= grid.v_points; ++j) {
      const double V = std::numbers::pi * static_cast<double>(j) / grid.v_points;
      const double v4 = V * V * V * V;
      if (!(c * R - v4 / 12.0 > R)) continue;
      double rho = 0.0;
      bool ok = true;
      for (double e : eta) {
        double num, den;
        if (kind == AlshKind::kSL) {
          const double near = 2.0 * e - 2.0 + R;
          const double far = 2.0 * e - 2.0 + c * R - v4 / 12.0;
          if (!(near > 0.0 && far > 0.0)) {
            ok = false;
            break;
          }
          num = std::log(p_l2(w, std::sqrt(near)));
          den = std::log(p_l2(w, std::sqrt(far)));
        } else {
          const double a1 = (1.0 - 0.5 * R) / e;
          const double a2 = (1.0 - 0.5 * c * R + v4 / 24.0) / e;
          if (!(a1 > -1.0 && a1 <= 1.0 && a2 > -1.0 && a2 <= 1.0)) {
            ok = false;
            break;
          }
          num = std::log(1.0 - std::acos(a1) / std::numbers::pi);
          den = std::log(1.0 - std::acos(a2) / std::numbers::pi);
        }
        if (!std::isfinite(num) || !std::isfinite(den) || !(den < 0.0)) {
          ok = false;
          break;
        }
        rho = std::max(rho, num / den);
      }
      if (ok && rho < best.rho) {
        best.rho = rho;
        best.w = w;
        best.v = V;
      }
    }
  }
  if (!std::isfinite(best.rho)) {
    throw InfeasibleError("no feasible (w, V) for the requested R and c");
  }
  best.tables = std::pow(static_cast<double>(n), best.rho);
  return best;
}

int default_tau(double p) { return p == 1.0 ? 1000 : 500; }

BenchReport run_benchmark(const BenchConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  BenchReport report;
  report.tau = config.tau > 0 ? config.tau : default_tau(config.p);
  const ValueRange range{0, 10000};
  const Dataset full =
      gen_synthetic_dataset(config.n + config.query_points, config.d, range, mix_seed(config.seed, 1));
  const auto weights = gen_weight_vectors({config.set_size, config.n_subset, config.n_subrange,
                                           config.d, 1.0, 10.0, mix_seed(config.seed, 2)});
  QuerySet qs = gen_query_set(full, weights.size(), config.query_points, config.query_vectors,
                              mix_seed(config.seed, 3));

  SolverContext ctx = SolverContext::make(config.p, config.c, qs.data.size(), range);
  ctx.relaxation = config.relaxation;
  ctx.reduction = config.reduction;
  const BetaTable table(weights, ctx);
  report.naive_total = naive_total(table);
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    report.tau_min = std::max(report.tau_min, table.self_beta(i));
  }
  if (report.tau < report.tau_min) {
    throw InfeasibleError("tau=" + std::to_string(report.tau) + " is below tau_min=" +
                          std::to_string(report.tau_min));
  }
  PartitionPlan plan = config.naive ? naive_plan(weights, table) : partition(weights, report.tau, table);
  report.beta_total = plan.total_tables();
  report.groups = plan.groups.size();
  if (config.plan_only) {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  }

  const auto& queries = qs.queries;
  report.queries = queries.size();
  report.records.resize(queries.size());
  std::vector<std::vector<std::size_t>> by_group(plan.groups.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    by_group[plan.assignment[queries[i].weight_id]].push_back(i);
  }
  const IndexConfig icfg{ctx, report.tau, mix_seed(config.seed, 4)};
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t within = 0, ranks_total = 0;
  for (std::uint32_t g = 0; g < by_group.size(); ++g) {
    if (by_group[g].empty()) continue;
    // One group at a time keeps memory at a single group's tables.
    const Index index = Index::build(qs.data, weights, plan, icfg, std::vector<std::uint32_t>{g});
    report.tables_built += index.built_tables();
    const auto& ids = by_group[g];
    parallel_for(ids.size(), [&](std::size_t j) {
      const Query& q = queries[ids[j]];
      const QueryResult res = search(index, qs.data, q.coords, q.weight_id, {config.k, std::nullopt});
      const auto truth =
          brute_force_knn(qs.data, ctx.metric, weights[q.weight_id], q.coords, config.k);
      const RatioResult rr = overall_ratio(res.neighbors, truth);
      QueryRecord& rec = report.records[ids[j]];
      rec.query_point_id = q.point_id;
      rec.weight_id = q.weight_id;
      rec.k = config.k;
      rec.io_bucket = res.io.bucket_blocks_read;
      rec.io_candidate = res.io.candidate_blocks_read;
      rec.ratio = rr.ratio;
      rec.radius_final = res.radius_final;
      rec.candidates_checked = res.candidates_checked;
      rec.ranks_used = rr.per_rank.size();
      rec.ranks_excluded = rr.excluded;
      rec.ranks_missing = rr.missing;
      rec.min_rank_ratio = rr.per_rank.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : *std::min_element(rr.per_rank.begin(), rr.per_rank.end());
      for (double r : rr.per_rank) rec.ranks_within_c += r <= config.c;
    });
  }
  double ratio_sum = 0.0;
  std::size_t ratio_count = 0;
  for (const auto& rec : report.records) {
    report.avg_io_bucket += static_cast<double>(rec.io_bucket);
    report.avg_io_candidate += static_cast<double>(rec.io_candidate);
    if (rec.ranks_used > 0) {
      ratio_sum += rec.ratio;
      ++ratio_count;
      min_ratio = std::min(min_ratio, rec.min_rank_ratio);
    }
    within += rec.ranks_within_c;
    ranks_total += rec.k;
    report.ranks_excluded += rec.ranks_excluded;
    report.ranks_missing += rec.ranks_missing;
  }
  const double nq = static_cast<double>(std::max<std::size_t>(1, report.records.size()));
  report.avg_io_bucket /= nq;
  report.avg_io_candidate /= nq;
  report.avg_io = report.avg_io_bucket + report.avg_io_candidate;
  report.avg_overall_ratio = ratio_count ? ratio_sum / static_cast<double>(ratio_count) : 0.0;
  report.min_rank_ratio = min_ratio;
  report.frac_ranks_within_c =
      ranks_total ? static_cast<double>(within) / static_cast<double>(ranks_total) : 0.0;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
  out << "query_point_id,weight_id,k,io_bucket,io_candidate,ratio,radius_final,candidates_checked\n";
  out.precision(10);
  for (const auto& r : report.records) {
    out << r.query_point_id << ',' << r.weight_id << ',' << r.k << ',' << r.io_bucket << ','
        << r.io_candidate << ',' << r.ratio << ',' << r.radius_final << ','
        << r.candidates_checked << '\n';
  }
}

std::string report_summary_json(const BenchConfig& config, const BenchReport& report) {
  nlohmann::json j;
  j["config"] = {{"n", config.n},
                 {"d", config.d},
                 {"set_size", config.set_size},
                 {"n_subset", config.n_subset},
                 {"n_subrange", config.n_subrange},
                 {"p", config.p},
                 {"c", config.c},
                 {"k", config.k},
                 {"tau", report.tau},
                 {"relaxation", config.relaxation
                                    ? nlohmann::json{config.relaxation->v, config.relaxation->v_prime}
                                    : nlohmann::json(nullptr)},
                 {"reduction", config.reduction},
                 {"naive", config.naive},
                 {"seed", config.seed}};
  j["beta_total"] = report.beta_total;
  j["naive_total"] = report.naive_total;
  j["tau_min"] = report.tau_min;
  j["groups"] = report.groups;
  j["tables_built"] = report.tables_built;
  j["queries"] = report.queries;
  j["avg_io"] = report.avg_io;
  j["avg_io_bucket"] = report.avg_io_bucket;
  j["avg_io_candidate"] = report.avg_io_candidate;
  j["avg_overall_ratio"] = report.avg_overall_ratio;
  j["min_rank_ratio"] = std::isfinite(report.min_rank_ratio) ? nlohmann::json(report.min_rank_ratio)
                                                             : nlohmann::json(nullptr);
  j["frac_ranks_within_c"] = report.frac_ranks_within_c;
  j["ranks_excluded"] = report.ranks_excluded;
  j["ranks_missing"] = report.ranks_missing;
  j["seconds"] = report.seconds;
  return j.dump(2);
}

void save_weights(const std::string& path, std::span<const WeightVector> set) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  for (const auto& w : set) {
    for (std::size_t i = 0; i < w.dim(); ++i) out << (i ? " " : "") << w.weights[i];
    out << '\n';
  }
  if (!out) throw IoError("failed to write " + path);
}

std::vector<WeightVector> load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<WeightVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    WeightVector w;
    w.id = static_cast<std::uint32_t>(out.size());
    w.weights = split_numbers(line);
    if (!out.empty() && w.dim() != out.front().dim()) {
      throw IoError("weight vectors differ in dimensionality in " + path);
    }
    try {
      validate_weights(w);
    } catch (const ConfigError& e) {
      throw IoError(path + ": " + e.what());
    }
    out.push_back(std::move(w));
  }
  if (out.empty()) throw IoError("no weight vectors in " + path);
  return out;
}

void save_queries(const std::string& path, std::span<const Query> queries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  for (const auto& q : queries) {
    out << q.point_id << ' ' << q.weight_id;
    for (double x : q.coords) out << ' ' << x;
    out << '\n';
  }
  if (!out) throw IoError("failed to write " + path);
}

std::vector<Query> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Query> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto nums = split_numbers(line);
    if (nums.size() < 3) throw IoError("query line needs point id, weight id and coordinates");
    Query q;
    q.point_id = static_cast<std::uint32_t>(nums[0]);
    q.weight_id = static_cast<std::uint32_t>(nums[1]);
    q.coords.assign(nums.begin() + 2, nums.end());
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace wlsh
