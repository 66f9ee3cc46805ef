#include "fogplace/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

#include "fogplace/errors.hpp"
#include "fogplace/io.hpp"

namespace fogplace {

namespace {

const std::vector<std::string> kKnownSolvers = {"tscp", "random_explore", "greedy", "psf",
                                                "optimal"};

[[noreturn]] void bad_field(const std::string& key, const char* expected) {
  throw SchemaError("config field '" + key + "': expected " + expected);
}

double get_num(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad_field(key, "a number");
  return j[key].get<double>();
}

int get_int(const nlohmann::json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) bad_field(key, "an integer");
  return j[key].get<int>();
}

bool get_bool(const nlohmann::json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) bad_field(key, "a boolean");
  return j[key].get<bool>();
}

std::string get_str(const nlohmann::json& j, const std::string& key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) bad_field(key, "a string");
  return j[key].get<std::string>();
}

template <typename T>
std::vector<T> get_array(const nlohmann::json& j, const std::string& key,
                         std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array()) bad_field(key, "an array");
  std::vector<T> out;
  for (const auto& e : j[key]) {
    if (!e.is_number()) bad_field(key, "an array of numbers");
    out.push_back(e.get<T>());
  }
  return out;
}

void read_workload_params(const nlohmann::json& j, WorkloadParams& p) {
  p.num_types = get_int(j, "num_types", p.num_types);
  p.vnfs_min = get_int(j, "vnfs_min", p.vnfs_min);
  p.vnfs_max = get_int(j, "vnfs_max", p.vnfs_max);
  p.heights = get_array<int>(j, "heights", p.heights);
  p.edge_ratios = get_array<double>(j, "edge_ratios", p.edge_ratios);
  p.sel_ratios = get_array<double>(j, "sel_ratios", p.sel_ratios);
  p.users_min = get_int(j, "users_min", p.users_min);
  p.users_max = get_int(j, "users_max", p.users_max);
  p.iot_vnf_fraction = get_num(j, "iot_vnf_fraction", p.iot_vnf_fraction);
  p.traffic_min = get_num(j, "traffic_min", p.traffic_min);
  p.traffic_max = get_num(j, "traffic_max", p.traffic_max);
  p.instances_per_type = get_int(j, "instances_per_type", p.instances_per_type);
  p.resource_req_min = get_num(j, "resource_req_min", p.resource_req_min);
  p.resource_req_max = get_num(j, "resource_req_max", p.resource_req_max);
  p.capacity_gb_min = get_num(j, "capacity_gb_min", p.capacity_gb_min);
  p.capacity_gb_max = get_num(j, "capacity_gb_max", p.capacity_gb_max);
  p.license_cost = get_num(j, "license_cost", p.license_cost);
  p.util_threshold = get_num(j, "util_threshold", p.util_threshold);
}

// Runs fn(0..n_jobs-1) across a fixed-size pool; the caller's thread counts
// as one worker.
void run_pool(std::size_t n_jobs, int requested, const std::function<void(std::size_t)>& fn) {
  if (n_jobs == 0) return;
  std::size_t workers = requested > 0 ? static_cast<std::size_t>(requested)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n_jobs;) {
      if (failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lk(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Context {
  Workload wl;
  NetworkModel net;
  ExpectedLinkCache cache;
  std::unique_ptr<Evaluator> ev;
};

struct Cell {
  int ctx{0};
  std::size_t row{0};
  std::string solver;
  double alpha{0.5};
  std::uint64_t seed{0};
};

std::string csv_prefix(const ResultRow& r) {
  return r.scenario + "," + r.solver + "," + std::to_string(r.seed) + "," + fmt_double(r.alpha) +
         "," + std::to_string(r.requests) + "," + fmt_double(r.p_static);
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.preset = get_str(doc, "preset", cfg.preset);
  cfg.tier_filter = get_str(doc, "tier_filter", cfg.tier_filter);
  if (cfg.tier_filter != "hybrid" && cfg.tier_filter != "cloud" && cfg.tier_filter != "fog") {
    throw SchemaError("config field 'tier_filter': expected hybrid, cloud or fog");
  }
  cfg.quadrature_grid = get_int(doc, "quadrature_grid", cfg.quadrature_grid);
  if (cfg.quadrature_grid < 2) throw SchemaError("config field 'quadrature_grid': too small");
  cfg.fog_velocity = get_num(doc, "fog_velocity", cfg.fog_velocity);
  cfg.fog_pause = get_num(doc, "fog_pause", cfg.fog_pause);
  cfg.link_jitter = get_num(doc, "link_jitter", cfg.link_jitter);
  cfg.default_p_static = get_num(doc, "p_static", cfg.default_p_static);
  cfg.request_count = get_int(doc, "request_count", cfg.request_count);
  if (cfg.request_count < 1) throw SchemaError("config field 'request_count': must be positive");

  if (doc.contains("workload")) {
    if (!doc["workload"].is_object()) bad_field("workload", "an object");
    read_workload_params(doc["workload"], cfg.workload);
  }

  if (doc.contains("solvers")) {
    if (!doc["solvers"].is_array()) bad_field("solvers", "an array of names");
    cfg.solvers.clear();
    for (const auto& s : doc["solvers"]) {
      if (!s.is_string()) bad_field("solvers", "an array of names");
      cfg.solvers.push_back(s.get<std::string>());
    }
  }
  for (const std::string& s : cfg.solvers) {
    if (std::find(kKnownSolvers.begin(), kKnownSolvers.end(), s) == kKnownSolvers.end()) {
      throw SchemaError("config field 'solvers': unknown solver '" + s + "'");
    }
  }
  if (cfg.solvers.empty()) throw SchemaError("config field 'solvers': need at least one");

  cfg.alphas = get_array<double>(doc, "alphas", cfg.alphas);
  for (double a : cfg.alphas) {
    if (a < 0.0 || a > 1.0) throw SchemaError("config field 'alphas': values must be in [0, 1]");
  }
  cfg.p_statics = get_array<double>(doc, "p_statics", cfg.p_statics);
  for (double p : cfg.p_statics) {
    if (p < 0.0 || p > 1.0) throw SchemaError("config field 'p_statics': values must be in [0, 1]");
  }
  cfg.request_counts = get_array<int>(doc, "request_counts", cfg.request_counts);
  for (int c : cfg.request_counts) {
    if (c < 1) throw SchemaError("config field 'request_counts': values must be positive");
  }
  cfg.seeds = get_array<std::uint64_t>(doc, "seeds", cfg.seeds);
  if (cfg.seeds.empty()) throw SchemaError("config field 'seeds': need at least one");

  if (doc.contains("tabu")) {
    const auto& jt = doc["tabu"];
    if (!jt.is_object()) bad_field("tabu", "an object");
    cfg.tabu.tenure = get_int(jt, "tenure", cfg.tabu.tenure);
    cfg.tabu.stop_after = get_int(jt, "stop_after", cfg.tabu.stop_after);
    cfg.tabu.neighborhood = get_int(jt, "neighborhood", cfg.tabu.neighborhood);
    cfg.tabu.max_iterations = get_int(jt, "max_iterations",
                                      static_cast<int>(cfg.tabu.max_iterations));
  }
  if (doc.contains("limits")) {
    const auto& jl = doc["limits"];
    if (!jl.is_object()) bad_field("limits", "an object");
    cfg.limits.max_nodes = get_int(jl, "max_nodes", cfg.limits.max_nodes);
    cfg.limits.max_types = get_int(jl, "max_types", cfg.limits.max_types);
    cfg.limits.max_instances = get_int(jl, "max_instances", cfg.limits.max_instances);
    cfg.limits.max_requests = get_int(jl, "max_requests", cfg.limits.max_requests);
  }
  cfg.jobs = get_int(doc, "jobs", cfg.jobs);
  cfg.normalize = get_bool(doc, "normalize", cfg.normalize);
  return cfg;
}

SolveResult run_solver(const std::string& solver, const Evaluator& ev, double alpha,
                       const TabuParams& params, const ExhaustiveLimits& limits) {
  if (solver == "tscp") return tabu_search(ev, alpha, params, TargetPolicy::guided);
  if (solver == "random_explore") return tabu_search(ev, alpha, params, TargetPolicy::uniform);
  if (solver == "greedy") return greedy_place(ev, alpha, params.seed);
  if (solver == "psf") return psf_place(ev.network(), ev.workload(), alpha, params);
  if (solver == "optimal") return exhaustive_optimal(ev, alpha, params.seed, limits);
  throw DomainError("unknown solver '" + solver + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  for (const std::string& s : cfg.solvers) {
    if (std::find(kKnownSolvers.begin(), kKnownSolvers.end(), s) == kKnownSolvers.end()) {
      throw DomainError("unknown solver '" + s + "'");
    }
  }
  const std::vector<int> counts =
      cfg.request_counts.empty() ? std::vector<int>{cfg.request_count} : cfg.request_counts;
  const std::vector<double> p_statics =
      cfg.p_statics.empty() ? std::vector<double>{cfg.default_p_static} : cfg.p_statics;

  // Phase 1: one context per (request_count, p_static, seed). The expected
  // link cache dominates the cost, so contexts build on the pool.
  std::map<std::tuple<int, double, std::uint64_t>, int> ctx_index;
  std::vector<std::tuple<int, double, std::uint64_t>> ctx_keys;
  for (int count : counts) {
    for (double ps : p_statics) {
      for (std::uint64_t seed : cfg.seeds) {
        const auto key = std::make_tuple(count, ps, seed);
        if (ctx_index.emplace(key, static_cast<int>(ctx_keys.size())).second) {
          ctx_keys.push_back(key);
        }
      }
    }
  }
  std::vector<std::unique_ptr<Context>> contexts(ctx_keys.size());
  run_pool(ctx_keys.size(), cfg.jobs, [&](std::size_t i) {
    const auto [count, ps, seed] = ctx_keys[i];
    auto ctx = std::make_unique<Context>();
    ctx->wl = generate_workload(count, seed, cfg.workload);
    ScenarioOptions so;
    so.fog_p_static = ps;
    so.fog_velocity = cfg.fog_velocity;
    so.fog_pause = cfg.fog_pause;
    so.quadrature_grid = cfg.quadrature_grid;
    so.link_jitter = cfg.link_jitter;
    so.tier_filter = cfg.tier_filter;
    ctx->net = scenario_preset(cfg.preset, seed, so);
    register_users(ctx->net, ctx->wl);
    ctx->cache = build_cache(ctx->net);
    ctx->ev = std::make_unique<Evaluator>(ctx->net, ctx->wl, ctx->cache);
    contexts[i] = std::move(ctx);
  });

  // Phase 2: solver cells, row slots fixed up front.
  std::vector<Cell> cells;
  ExperimentResult result;
  for (int count : counts) {
    for (double ps : p_statics) {
      for (std::uint64_t seed : cfg.seeds) {
        const int ci = ctx_index.at(std::make_tuple(count, ps, seed));
        for (double alpha : cfg.alphas) {
          for (const std::string& solver : cfg.solvers) {
            ResultRow row;
            row.scenario = contexts[static_cast<std::size_t>(ci)]->net.name;
            row.solver = solver;
            row.seed = seed;
            row.alpha = alpha;
            row.requests = count;
            row.p_static = ps;
            cells.push_back({ci, result.rows.size(), solver, alpha, seed});
            result.rows.push_back(std::move(row));
          }
        }
      }
    }
  }

  run_pool(cells.size(), cfg.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    ResultRow& row = result.rows[cell.row];
    const Context& ctx = *contexts[static_cast<std::size_t>(cell.ctx)];
    const Evaluator& ev = *ctx.ev;
    TabuParams tp = cfg.tabu;
    tp.seed = cell.seed;
    SolveResult res;
    try {
      res = run_solver(cell.solver, ev, cell.alpha, tp, cfg.limits);
    } catch (const TooLarge&) {
      row.status = "too_large";
      return;
    }
    // Re-score under the true mobility model with the shared penalty scale so
    // numbers are comparable across solvers on the same cell.
    const Placement init = initial_placement(ev, cell.seed);
    const double scale = ev.evaluate(init, {cell.alpha, 0.0, 1.0, 1.0}).objective;
    const EvaluationReport rep = ev.evaluate(res.best, {cell.alpha, scale, 1.0, 1.0});
    row.makespan_s = rep.makespan_sum;
    row.comm_cost = rep.comm_cost_sum;
    row.deploy_cost = rep.license_cost + rep.hosting_cost;
    row.objective = rep.objective;
    row.fitness = rep.fitness;
    row.feasible = rep.feasible();
    row.wall_ms = res.wall_ms;
    const auto [fog, cloud] = tier_usage(ev, res.best);
    row.fog_pct = fog;
    row.cloud_pct = cloud;
    row.status = res.status;
  });
  return result;
}

std::string results_csv(const std::vector<ResultRow>& rows, bool normalize) {
  std::string out =
      "scenario,solver,seed,alpha,requests,p_static,makespan_s,comm_cost,deploy_cost,"
      "objective,fitness,feasible,fog_pct,cloud_pct,status";
  double max_mk = 0.0, max_cost = 0.0, max_obj = 0.0;
  if (normalize) {
    out += ",makespan_rel,cost_rel,objective_rel";
    for (const ResultRow& r : rows) {
      if (r.status != "ok") continue;
      max_mk = std::max(max_mk, r.makespan_s);
      max_cost = std::max(max_cost, r.comm_cost + r.deploy_cost);
      max_obj = std::max(max_obj, r.objective);
    }
  }
  out += "\n";
  for (const ResultRow& r : rows) {
    out += csv_prefix(r) + "," + fmt_double(r.makespan_s) + "," + fmt_double(r.comm_cost) + "," +
           fmt_double(r.deploy_cost) + "," + fmt_double(r.objective) + "," +
           fmt_double(r.fitness) + "," + (r.feasible ? "1" : "0") + "," + fmt_double(r.fog_pct) +
           "," + fmt_double(r.cloud_pct) + "," + r.status;
    if (normalize) {
      auto rel = [](double v, double mx) { return mx > 0.0 ? v / mx : 0.0; };
      out += "," + fmt_double(rel(r.makespan_s, max_mk)) + "," +
             fmt_double(rel(r.comm_cost + r.deploy_cost, max_cost)) + "," +
             fmt_double(rel(r.objective, max_obj));
    }
    out += "\n";
  }
  return out;
}

std::string timings_csv(const std::vector<ResultRow>& rows) {
  std::string out = "scenario,solver,seed,alpha,requests,p_static,wall_ms\n";
  for (const ResultRow& r : rows) {
    out += csv_prefix(r) + "," + fmt_double(r.wall_ms) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,fitness,best_fitness,move,moved,elapsed_ms\n";
  for (const TraceRow& t : trace) {
    out += std::to_string(t.iteration) + "," + fmt_double(t.fitness) + "," +
           fmt_double(t.best_fitness) + "," + to_string(t.kind) + "," + (t.moved ? "1" : "0") +
           "," + fmt_double(t.elapsed_ms) + "\n";
  }
  return out;
}

}  // namespace fogplace
