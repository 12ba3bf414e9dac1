// Command-line front end: data generation, planning, index build, queries,
// benchmark runs and the asymmetric-LSH exponent calculator.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wlsh/bench.hpp"
#include "wlsh/binary_io.hpp"

namespace {

using namespace wlsh;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

std::optional<Relaxation> parse_relax(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Relaxation r;
  char comma = 0;
  std::istringstream ss(text);
  if (!(ss >> r.v >> comma >> r.v_prime) || comma != ',' || !ss.eof()) {
    throw ConfigError("--relax expects v,v' (for example 8,8)");
  }
  return r;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t weights_digest(std::span<const WeightVector> set) {
  io::Fnv1a h;
  h.update<std::uint64_t>(set.size());
  for (const auto& w : set) {
    for (double x : w.weights) h.update(x);
  }
  return h.value();
}

// Shared planning flags.
struct PlanFlags {
  double p = 1.0;
  int c = 3;
  int tau = 0;
  std::string relax;
  bool reduce = false;
  bool naive = false;

  void add(CLI::App* app) {
    app->add_option("--p", p, "l_p exponent in (0, 2]")->capture_default_str();
    app->add_option("--c", c, "approximation ratio (integer >= 2)")->capture_default_str();
    app->add_option("--tau", tau, "per-group table cap (default 1000 for l1, 500 otherwise)");
    app->add_option("--relax", relax, "bound relaxation v,v'");
    app->add_flag("--reduce-threshold", reduce, "use the reduced collision threshold");
    app->add_flag("--naive", naive, "one group per weight vector");
  }

  SolverContext context(const Dataset& ds) const {
    auto ctx = SolverContext::make(p, c, ds.size(), ds.range());
    ctx.relaxation = parse_relax(relax);
    ctx.reduction = reduce;
    return ctx;
  }
  int effective_tau() const { return tau > 0 ? tau : default_tau(p); }
};

PartitionPlan make_plan(const PlanFlags& f, std::span<const WeightVector> weights,
                        const BetaTable& table) {
  if (!f.naive) return partition(weights, f.effective_tau(), table);
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    if (table.self_beta(i) > f.effective_tau()) {
      throw InfeasibleError("tau=" + std::to_string(f.effective_tau()) +
                            " is below the self-based beta of weight vector " + std::to_string(i));
    }
  }
  return naive_plan(weights, table);
}

void print_neighbors(const QueryResult& res, std::size_t qi, const Query& q) {
  std::printf("query %zu point %u weight %u io_bucket %llu io_candidate %llu radius %.17g "
              "candidates %zu\n",
              qi, q.point_id, q.weight_id,
              static_cast<unsigned long long>(res.io.bucket_blocks_read),
              static_cast<unsigned long long>(res.io.candidate_blocks_read), res.radius_final,
              res.candidates_checked);
  for (std::size_t r = 0; r < res.neighbors.size(); ++r) {
    std::printf("  %zu %u %.17g\n", r + 1, res.neighbors[r].id, res.neighbors[r].distance);
  }
}

std::vector<std::vector<double>> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof()) throw IoError("malformed truth line: " + line);
    out.push_back(std::move(row));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Weighted LSH: approximate k-NN under many weighted l_p distances"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "random seed")->capture_default_str();

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "generate a uniform integer dataset");
  std::size_t gd_n = 10000, gd_d = 32;
  std::int32_t gd_lo = 0, gd_hi = 10000;
  std::string gd_out;
  gen_data->add_option("--n", gd_n)->capture_default_str();
  gen_data->add_option("--d", gd_d)->capture_default_str();
  gen_data->add_option("--lo", gd_lo)->capture_default_str();
  gen_data->add_option("--hi", gd_hi)->capture_default_str();
  gen_data->add_option("--out", gd_out)->required();

  // gen-weights
  auto* gen_w = app.add_subcommand("gen-weights", "generate a weight vector set");
  WeightGenSpec wspec;
  std::string gw_out;
  gen_w->add_option("--size", wspec.cardinality, "|S|")->capture_default_str();
  gen_w->add_option("--subsets", wspec.n_subset, "#Subset")->capture_default_str();
  gen_w->add_option("--subranges", wspec.n_subrange, "#Subrange")->capture_default_str();
  gen_w->add_option("--d", wspec.d)->capture_default_str();
  gen_w->add_option("--out", gw_out)->required();

  // gen-queries
  auto* gen_q = app.add_subcommand("gen-queries", "remove query points and pair them with weights");
  std::string gq_data, gq_weights, gq_out_data, gq_out_queries;
  std::size_t gq_points = 50, gq_vectors = 10;
  gen_q->add_option("--data", gq_data)->required();
  gen_q->add_option("--weights", gq_weights)->required();
  gen_q->add_option("--points", gq_points)->capture_default_str();
  gen_q->add_option("--vectors", gq_vectors)->capture_default_str();
  gen_q->add_option("--out-data", gq_out_data)->required();
  gen_q->add_option("--out-queries", gq_out_queries)->required();

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "partition the weight vectors and print the plan");
  std::string pl_data, pl_weights;
  PlanFlags pl_flags;
  pl_flags.add(plan_cmd);
  plan_cmd->add_option("--data", pl_data, "dataset (for n and the value range)")->required();
  plan_cmd->add_option("--weights", pl_weights)->required();

  // build
  auto* build_cmd = app.add_subcommand("build", "build and save an index");
  std::string bd_data, bd_weights, bd_out;
  PlanFlags bd_flags;
  bd_flags.add(build_cmd);
  build_cmd->add_option("--data", bd_data)->required();
  build_cmd->add_option("--weights", bd_weights)->required();
  build_cmd->add_option("--out", bd_out)->required();

  // query
  auto* query_cmd = app.add_subcommand("query", "answer (c,k)-WNN queries from a saved index");
  std::string q_index, q_data, q_queries, q_truth, q_point;
  std::size_t q_k = 10;
  std::int64_t q_weight = -1;
  bool q_exact = false;
  query_cmd->add_option("--index", q_index)->required();
  query_cmd->add_option("--data", q_data)->required();
  query_cmd->add_option("--queries", q_queries, "queries file");
  query_cmd->add_option("--point", q_point, "single query coordinates, space separated");
  query_cmd->add_option("--weight-id", q_weight, "weight vector of the single query");
  query_cmd->add_option("--k", q_k)->capture_default_str();
  query_cmd->add_option("--truth", q_truth, "file with the exact k distances per query line");
  query_cmd->add_flag("--exact", q_exact, "compute exact neighbors and report the overall ratio");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the synthetic benchmark protocol");
  BenchConfig bc;
  std::string b_relax, b_csv, b_json;
  bench_cmd->add_option("--n", bc.n)->capture_default_str();
  bench_cmd->add_option("--d", bc.d)->capture_default_str();
  bench_cmd->add_option("--size", bc.set_size, "|S|")->capture_default_str();
  bench_cmd->add_option("--subsets", bc.n_subset, "#Subset")->capture_default_str();
  bench_cmd->add_option("--subranges", bc.n_subrange, "#Subrange")->capture_default_str();
  bench_cmd->add_option("--p", bc.p)->capture_default_str();
  bench_cmd->add_option("--c", bc.c)->capture_default_str();
  bench_cmd->add_option("--k", bc.k)->capture_default_str();
  bench_cmd->add_option("--tau", bc.tau, "table cap (default 1000 for l1, 500 otherwise)");
  bench_cmd->add_option("--relax", b_relax, "bound relaxation v,v'");
  bench_cmd->add_flag("--reduce-threshold", bc.reduction);
  bench_cmd->add_flag("--naive", bc.naive);
  bench_cmd->add_flag("--plan-only", bc.plan_only, "stop after planning");
  bench_cmd->add_flag("--full-grid", "large-scale defaults: n=400k, d=400, |S|=5k, #Subset=200, #Subrange=20");
  bench_cmd->add_option("--csv", b_csv, "per-query CSV output");
  bench_cmd->add_option("--json", b_json, "JSON summary output (stdout when omitted)");

  // alsh-rho
  auto* rho_cmd = app.add_subcommand("alsh-rho", "rho and table count of the asymmetric baselines");
  std::string r_kind = "sl", r_weights;
  double r_R = 1000.0;
  int r_c = 3;
  std::size_t r_n = 400000;
  RhoGrid r_grid;
  WeightGenSpec r_spec;
  rho_cmd->add_option("--kind", r_kind, "sl or s2")->capture_default_str();
  rho_cmd->add_option("--weights", r_weights, "weights file (generated when omitted)");
  rho_cmd->add_option("--R", r_R)->capture_default_str();
  rho_cmd->add_option("--c", r_c)->capture_default_str();
  rho_cmd->add_option("--n", r_n)->capture_default_str();
  rho_cmd->add_option("--w-points", r_grid.w_points)->capture_default_str();
  rho_cmd->add_option("--v-points", r_grid.v_points)->capture_default_str();
  rho_cmd->add_option("--size", r_spec.cardinality)->capture_default_str();
  rho_cmd->add_option("--subsets", r_spec.n_subset)->capture_default_str();
  rho_cmd->add_option("--subranges", r_spec.n_subrange)->capture_default_str();
  rho_cmd->add_option("--d", r_spec.d)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*gen_data) {
    const Dataset ds = gen_synthetic_dataset(gd_n, gd_d, {gd_lo, gd_hi}, seed);
    save_dataset(gd_out, ds);
    std::printf("dataset n=%zu d=%zu digest=%s\n", ds.size(), ds.dim(), hex(ds.digest()).c_str());
  } else if (*gen_w) {
    wspec.seed = seed;
    const auto set = gen_weight_vectors(wspec);
    save_weights(gw_out, set);
    std::printf("weights |S|=%zu d=%zu digest=%s\n", set.size(), wspec.d,
                hex(weights_digest(set)).c_str());
  } else if (*gen_q) {
    const Dataset ds = load_dataset(gq_data);
    const auto set = load_weights(gq_weights);
    const QuerySet qs = gen_query_set(ds, set.size(), gq_points, gq_vectors, seed);
    save_dataset(gq_out_data, qs.data);
    save_queries(gq_out_queries, qs.queries);
    std::printf("queries=%zu remaining n=%zu digest=%s\n", qs.queries.size(), qs.data.size(),
                hex(qs.data.digest()).c_str());
  } else if (*plan_cmd) {
    const Dataset ds = load_dataset(pl_data);
    const auto set = load_weights(pl_weights);
    const auto ctx = pl_flags.context(ds);
    const BetaTable table(set, ctx);
    long long naive = naive_total(table);
    int tmin = 0;
    for (std::uint32_t i = 0; i < table.size(); ++i) tmin = std::max(tmin, table.self_beta(i));
    const PartitionPlan plan = make_plan(pl_flags, set, table);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
      const auto& grp = plan.groups[g];
      std::printf("group %zu base %u members %zu beta %d w %.6g b_levels %d\n", g, grp.base,
                  grp.members.size(), grp.beta_group, grp.w_bucket, grp.b_range_levels);
    }
    std::printf("beta_S %lld naive %lld tau %d tau_min %d groups %zu\n", plan.total_tables(), naive,
                pl_flags.effective_tau(), tmin, plan.groups.size());
  } else if (*build_cmd) {
    const Dataset ds = load_dataset(bd_data);
    auto set = load_weights(bd_weights);
    if (set.front().dim() != ds.dim()) throw ConfigError("weights and dataset dimensionality differ");
    const auto ctx = bd_flags.context(ds);
    const BetaTable table(set, ctx);
    PartitionPlan plan = make_plan(bd_flags, set, table);
    const Index index =
        Index::build(ds, std::move(set), std::move(plan), {ctx, bd_flags.effective_tau(), seed});
    index.save(bd_out);
    std::printf("index groups=%zu tables=%zu dataset=%s\n", index.plan().groups.size(),
                index.built_tables(), hex(index.dataset_digest()).c_str());
  } else if (*query_cmd) {
    const Index index = Index::load(q_index);
    const Dataset ds = load_dataset(q_data);
    index.check_dataset(ds);
    std::vector<Query> queries;
    if (!q_queries.empty()) {
      queries = load_queries(q_queries);
    } else {
      if (q_point.empty() || q_weight < 0) {
        throw ConfigError("give --queries or both --point and --weight-id");
      }
      Query q;
      q.weight_id = static_cast<std::uint32_t>(q_weight);
      std::istringstream ss(q_point);
      double v;
      while (ss >> v) q.coords.push_back(v);
      queries.push_back(std::move(q));
    }
    std::vector<std::vector<double>> truth;
    if (!q_truth.empty()) truth = load_truth(q_truth);
    double ratio_sum = 0.0;
    std::size_t ratio_n = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const Query& q = queries[i];
      const QueryResult res = search(index, ds, q.coords, q.weight_id, {q_k, std::nullopt});
      print_neighbors(res, i, q);
      std::vector<Neighbor> exact;
      if (q_exact) {
        exact = brute_force_knn(ds, index.config().ctx.metric, index.weights().at(q.weight_id),
                                q.coords, q_k);
      } else if (i < truth.size()) {
        for (double d : truth[i]) exact.push_back({0, d});
      }
      if (!exact.empty()) {
        const RatioResult rr = overall_ratio(res.neighbors, exact);
        std::printf("  ratio %.17g excluded %zu missing %zu\n", rr.ratio, rr.excluded, rr.missing);
        if (!rr.per_rank.empty()) {
          ratio_sum += rr.ratio;
          ++ratio_n;
        }
      }
    }
    if (ratio_n > 0) std::printf("avg_ratio %.17g\n", ratio_sum / static_cast<double>(ratio_n));
  } else if (*bench_cmd) {
    if (bench_cmd->count("--full-grid") > 0) {
      bc.n = 400000;
      bc.d = 400;
      bc.set_size = 5000;
      bc.n_subset = 200;
      bc.n_subrange = 20;
    }
    bc.relaxation = parse_relax(b_relax);
    bc.seed = seed;
    const BenchReport report = run_benchmark(bc);
    if (!b_csv.empty()) {
      std::ofstream out(b_csv);
      if (!out) throw IoError("cannot open " + b_csv);
      write_report_csv(out, report);
    }
    const std::string summary = report_summary_json(bc, report);
    if (b_json.empty()) {
      std::printf("%s\n", summary.c_str());
    } else {
      std::ofstream out(b_json);
      if (!out) throw IoError("cannot open " + b_json);
      out << summary << '\n';
    }
  } else if (*rho_cmd) {
    AlshKind kind;
    if (r_kind == "sl") {
      kind = AlshKind::kSL;
    } else if (r_kind == "s2") {
      kind = AlshKind::kS2;
    } else {
      throw ConfigError("--kind must be sl or s2");
    }
    std::vector<WeightVector> set;
    if (r_weights.empty()) {
      r_spec.seed = seed;
      set = gen_weight_vectors(r_spec);
    } else {
      set = load_weights(r_weights);
    }
    const RhoResult rr = alsh_rho(kind, set, r_R, r_c, r_n, r_grid);
    std::printf("rho %.9f tables %.1f w %.6g V %.6g\n", rr.rho, rr.tables, rr.w, rr.v);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wlsh::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const wlsh::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const wlsh::ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
