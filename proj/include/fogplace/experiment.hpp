#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogplace/evaluator.hpp"
#include "fogplace/infra.hpp"
#include "fogplace/solvers.hpp"
#include "fogplace/vnffg.hpp"

namespace fogplace {

// One sweep: the cross product solvers x alphas x request_counts x p_statics
// x seeds against a single scenario preset. Empty p_statics/request_counts
// collapse to the scalar defaults.
struct ExperimentConfig {
  std::string preset{"topology-10"};
  std::string tier_filter{"hybrid"};  // hybrid | cloud | fog
  int quadrature_grid{24};
  double fog_velocity{1.0};
  double fog_pause{kExpectedLegLength};
  double link_jitter{0.0};
  double default_p_static{0.5};

  WorkloadParams workload;
  int request_count{15};

  std::vector<std::string> solvers{"tscp"};
  std::vector<double> alphas{0.5};
  std::vector<double> p_statics;
  std::vector<int> request_counts;
  std::vector<std::uint64_t> seeds{1};

  TabuParams tabu;
  ExhaustiveLimits limits;
  int jobs{0};  // worker threads; 0 picks the hardware count
  bool normalize{false};
};

// Reads a config document; unknown solver names and malformed fields raise
// SchemaError. Every field is optional and falls back to the defaults above.
ExperimentConfig config_from_json(const nlohmann::json& doc);

struct ResultRow {
  std::string scenario;
  std::string solver;
  std::uint64_t seed{0};
  double alpha{0.5};
  int requests{0};
  double p_static{1.0};
  double makespan_s{0.0};
  double comm_cost{0.0};
  double deploy_cost{0.0};
  double objective{0.0};
  double fitness{0.0};
  bool feasible{false};
  double wall_ms{0.0};
  double fog_pct{0.0};
  double cloud_pct{0.0};
  std::string status{"ok"};
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

// Builds one evaluation context per (request_count, p_static, seed), then runs
// every solver cell against it. Contexts and cells run on a worker pool; rows
// land at indices fixed before any thread starts, so output order never
// depends on scheduling. Final placements are re-scored under the true
// mobility model with a shared per-(context, alpha) penalty scale.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Dispatches one named solver (tscp | random_explore | greedy | psf |
// optimal) against a prepared evaluator. DomainError on unknown names;
// TooLarge propagates from the exhaustive solver.
SolveResult run_solver(const std::string& solver, const Evaluator& ev, double alpha,
                       const TabuParams& params, const ExhaustiveLimits& limits = {});

// Deterministic solver-run table; wall_ms is excluded (see timings_csv).
// normalize appends _rel columns scaled by the column max.
std::string results_csv(const std::vector<ResultRow>& rows, bool normalize = false);

// Wall-clock sidecar, same row order as results_csv.
std::string timings_csv(const std::vector<ResultRow>& rows);

// Per-iteration search trajectory of a single solve.
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace fogplace
