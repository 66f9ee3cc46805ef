#include "fogplace/cli.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogplace/experiment.hpp"
#include "fogplace/io.hpp"

namespace fogplace {
namespace {

// Scenario and workload material shared by solve, evaluate and oracle.
struct ProblemFlags {
  std::string preset{"topology-10"};
  std::string scenario_file;
  std::string workload_file;
  std::string tier{"hybrid"};
  int requests{15};
  double p_static{0.5};
  double velocity{1.0};
  double pause{kExpectedLegLength};
  double jitter{0.0};
  int grid{24};
};

CLI::Option* add_problem_flags(CLI::App* sub, ProblemFlags& f) {
  sub->add_option("--preset", f.preset, "Scenario preset name")->capture_default_str();
  sub->add_option("--scenario", f.scenario_file, "Scenario document (overrides --preset)");
  sub->add_option("--workload", f.workload_file, "Workload document (skips generation)");
  sub->add_option("--requests", f.requests, "Generated request count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--p-static", f.p_static, "Fog node static probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--velocity", f.velocity, "Fog node speed, unit lengths per second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--pause", f.pause, "Fog node expected pause, seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--jitter", f.jitter, "Per-pair link attribute jitter, fraction of class span")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--tier", f.tier, "Keep one node tier")
      ->check(CLI::IsMember({"hybrid", "cloud", "fog"}))
      ->capture_default_str();
  return sub->add_option("--grid", f.grid, "Quadrature grid size per axis")
      ->check(CLI::Range(2, 512))
      ->capture_default_str();
}

void add_tabu_flags(CLI::App* sub, TabuParams& tp) {
  sub->add_option("--tenure", tp.tenure, "Tabu tenure, iterations")->capture_default_str();
  sub->add_option("--stop-after", tp.stop_after, "Stop after this many stale iterations")
      ->capture_default_str();
  sub->add_option("--neighborhood", tp.neighborhood, "Candidate moves per iteration")
      ->capture_default_str();
  sub->add_option("--max-iterations", tp.max_iterations, "Hard iteration cap")
      ->capture_default_str();
}

struct Problem {
  Workload wl;
  NetworkModel net;
  ExpectedLinkCache cache;
  std::unique_ptr<Evaluator> ev;
};

std::unique_ptr<Problem> build_problem(const ProblemFlags& f, std::uint64_t seed, bool grid_set,
                                       const WorkloadParams& wp = {}) {
  auto pr = std::make_unique<Problem>();
  if (!f.workload_file.empty()) {
    pr->wl = workload_from_json(load_json_file(f.workload_file));
  } else {
    pr->wl = generate_workload(f.requests, seed, wp);
  }
  if (!f.scenario_file.empty()) {
    pr->net = load_scenario(load_json_file(f.scenario_file));
    if (grid_set) pr->net.quadrature_grid = f.grid;
  } else {
    ScenarioOptions so;
    so.fog_p_static = f.p_static;
    so.fog_velocity = f.velocity;
    so.fog_pause = f.pause;
    so.quadrature_grid = f.grid;
    so.link_jitter = f.jitter;
    so.tier_filter = f.tier;
    pr->net = scenario_preset(f.preset, seed, so);
  }
  register_users(pr->net, pr->wl);
  pr->cache = build_cache(pr->net);
  pr->ev = std::make_unique<Evaluator>(pr->net, pr->wl, pr->cache);
  return pr;
}

ResultRow make_row(const Problem& pr, const std::string& solver, std::uint64_t seed, double alpha,
                   double p_static, const SolveResult& res, const EvaluationReport& rep) {
  ResultRow row;
  row.scenario = pr.net.name;
  row.solver = solver;
  row.seed = seed;
  row.alpha = alpha;
  row.requests = static_cast<int>(pr.wl.requests.size());
  row.p_static = p_static;
  row.makespan_s = rep.makespan_sum;
  row.comm_cost = rep.comm_cost_sum;
  row.deploy_cost = rep.license_cost + rep.hosting_cost;
  row.objective = rep.objective;
  row.fitness = rep.fitness;
  row.feasible = rep.feasible();
  row.wall_ms = res.wall_ms;
  const auto [fog, cloud] = tier_usage(*pr.ev, res.best);
  row.fog_pct = fog;
  row.cloud_pct = cloud;
  row.status = res.status;
  return row;
}

int cmd_generate(int count, std::uint64_t seed, const std::string& out, bool force) {
  const Workload wl = generate_workload(count, seed);
  write_text_file(out, workload_to_json(wl).dump(2) + "\n", force);
  std::cout << "wrote " << out << ": " << wl.requests.size() << " requests over "
            << wl.types.size() << " VNF types\n";
  return 0;
}

int cmd_solve(const ProblemFlags& f, bool grid_set, const std::string& solver, double alpha,
              std::uint64_t seed, TabuParams tp, const std::string& out_dir, bool force) {
  auto pr = build_problem(f, seed, grid_set);
  const Evaluator& ev = *pr->ev;
  tp.seed = seed;
  const SolveResult res = run_solver(solver, ev, alpha, tp);
  const Placement init = initial_placement(ev, seed);
  const double scale = ev.evaluate(init, {alpha, 0.0, 1.0, 1.0}).objective;
  const EvaluationReport rep = ev.evaluate(res.best, {alpha, scale, 1.0, 1.0});

  const ResultRow row = make_row(*pr, solver, seed, alpha, f.p_static, res, rep);
  write_text_file(out_dir + "/result.csv", results_csv({row}), force);
  write_text_file(out_dir + "/trace.csv", trace_csv(res.trace), force);
  write_text_file(out_dir + "/placement.json", placement_to_json(res.best, pr->wl).dump(2) + "\n",
                  force);
  write_text_file(out_dir + "/report.json", report_to_json(rep).dump(2) + "\n", force);
  std::cout << solver << " on " << pr->net.name << ": fitness " << fmt_double(rep.fitness)
            << ", objective " << fmt_double(rep.objective)
            << (rep.feasible() ? "" : " (infeasible)") << "\n"
            << "wrote " << out_dir << "/{result.csv, trace.csv, placement.json, report.json}\n";
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& out_dir, bool force, int jobs,
              bool jobs_set) {
  ExperimentConfig cfg = config_from_json(load_json_file(config_file));
  if (jobs_set) cfg.jobs = jobs;
  const ExperimentResult result = run_experiment(cfg);
  write_text_file(out_dir + "/results.csv", results_csv(result.rows, cfg.normalize), force);
  write_text_file(out_dir + "/timings.csv", timings_csv(result.rows), force);
  std::cout << "wrote " << result.rows.size() << " rows to " << out_dir
            << "/results.csv (wall clock in timings.csv)\n";
  return 0;
}

int cmd_evaluate(const ProblemFlags& f, bool grid_set, const std::string& placement_file,
                 double alpha, std::uint64_t seed, const std::string& out, bool force) {
  auto pr = build_problem(f, seed, grid_set);
  const Placement p = placement_from_json(load_json_file(placement_file), pr->wl);
  const EvaluationReport rep = pr->ev->evaluate(p, {alpha, 0.0, 1.0, 1.0});
  const std::string text = report_to_json(rep).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text, force);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_validate_mobility(double p_static, double velocity, double pause, const std::string& init,
                          double ix, double iy, double samples, int grid, std::uint64_t seed,
                          const std::string& out, bool force) {
  MobilityProfile prof;
  prof.p_static = p_static;
  prof.velocity = velocity;
  prof.expected_pause = pause;
  prof.init = init == "uniform" ? InitDist::uniform : InitDist::point;
  prof.init_point = {ix, iy};
  const LocationDensity dens(prof);
  const Eigen::ArrayXXd analytic = dens.cell_masses(grid);
  RwpSimOptions opt;
  opt.legs = static_cast<long>(samples);
  opt.grid = grid;
  const RwpSimulation sim = simulate_rwp(prof, 32, seed, opt);

  std::string csv = "i,j,x,y,analytic,empirical\n";
  double abs_err = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double cx = (i + 0.5) / grid;
      const double cy = (j + 0.5) / grid;
      csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt_double(cx) + "," +
             fmt_double(cy) + "," + fmt_double(analytic(i, j)) + "," +
             fmt_double(sim.cell_time(i, j)) + "\n";
      abs_err += std::abs(analytic(i, j) - sim.cell_time(i, j));
    }
  }
  write_text_file(out, csv, force);
  std::cout << "analytic mass " << fmt_double(analytic.sum()) << ", empirical mass "
            << fmt_double(sim.cell_time.sum()) << "\n"
            << "total |analytic - empirical| " << fmt_double(abs_err) << " over " << grid << "x"
            << grid << " cells\n"
            << "mean leg length " << fmt_double(sim.mean_leg_length) << " over " << sim.legs
            << " legs\n"
            << "wrote " << out << "\n";
  return 0;
}

int cmd_oracle(const ProblemFlags& f, bool grid_set, double alpha, std::uint64_t seed,
               const std::string& out, bool force) {
  WorkloadParams tiny;
  tiny.num_types = 3;
  tiny.vnfs_min = 3;
  tiny.vnfs_max = 3;
  tiny.heights = {2};
  tiny.users_min = 2;
  tiny.users_max = 3;
  tiny.instances_per_type = 2;
  auto pr = build_problem(f, seed, grid_set, tiny);
  const SolveResult res = exhaustive_optimal(*pr->ev, alpha, seed);
  const EvaluationReport rep = pr->ev->evaluate(res.best, {alpha, res.obj_scale, 1.0, 1.0});
  std::cout << "searched " << res.evaluated << " placements on " << pr->net.name
            << ": best fitness " << fmt_double(res.best_fitness) << ", objective "
            << fmt_double(rep.objective) << (rep.feasible() ? "" : " (infeasible)") << "\n";
  if (!out.empty()) {
    write_text_file(out, placement_to_json(res.best, pr->wl).dump(2) + "\n", force);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Placement toolkit for structured service graphs on hybrid cloud/fog networks"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a workload document");
  int gen_count = 15;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "workload.json";
  bool gen_force = false;
  gen->add_option("--count,--requests", gen_count, "Request count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path")->capture_default_str();
  gen->add_flag("--force", gen_force, "Replace existing output files");

  // solve
  auto* solve = app.add_subcommand("solve", "Run one solver on one scenario");
  ProblemFlags solve_pf;
  std::string solve_solver;
  double solve_alpha = 0.5;
  std::uint64_t solve_seed = 1;
  TabuParams solve_tp;
  std::string solve_out = "solve-out";
  bool solve_force = false;
  CLI::Option* solve_grid = add_problem_flags(solve, solve_pf);
  add_tabu_flags(solve, solve_tp);
  solve->add_option("--solver", solve_solver, "Solver name")
      ->required()
      ->check(CLI::IsMember({"tscp", "random_explore", "greedy", "psf", "optimal"}));
  solve->add_option("--alpha", solve_alpha, "Time weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  solve->add_option("--seed", solve_seed, "Run seed")->capture_default_str();
  solve->add_option("--out", solve_out, "Output directory")->capture_default_str();
  solve->add_flag("--force", solve_force, "Replace existing output files");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a full experiment config");
  std::string sweep_config;
  std::string sweep_out = "sweep-out";
  bool sweep_force = false;
  int sweep_jobs = 0;
  sweep->add_option("--config", sweep_config, "Experiment config document")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_flag("--force", sweep_force, "Replace existing output files");
  CLI::Option* sweep_jobs_opt = sweep->add_option("--jobs", sweep_jobs, "Worker thread count");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a placement document");
  ProblemFlags eval_pf;
  std::string eval_placement;
  double eval_alpha = 0.5;
  std::uint64_t eval_seed = 1;
  std::string eval_out;
  bool eval_force = false;
  CLI::Option* eval_grid = add_problem_flags(eval, eval_pf);
  eval->add_option("--placement", eval_placement, "Placement document")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--alpha", eval_alpha, "Time weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "Scenario/workload seed")->capture_default_str();
  eval->add_option("--out", eval_out, "Report path (stdout when omitted)");
  eval->add_flag("--force", eval_force, "Replace existing output files");

  // validate-mobility
  auto* vm = app.add_subcommand("validate-mobility",
                                "Compare the analytic location density with a simulation");
  double vm_p_static = 0.5, vm_velocity = 1.0, vm_pause = kExpectedLegLength;
  std::string vm_init = "uniform";
  double vm_x = 0.5, vm_y = 0.5;
  double vm_samples = 1e6;
  int vm_grid = 32;
  std::uint64_t vm_seed = 1;
  std::string vm_out = "density.csv";
  bool vm_force = false;
  vm->add_option("--p-static", vm_p_static, "Static probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  vm->add_option("--velocity", vm_velocity, "Speed, unit lengths per second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  vm->add_option("--pause", vm_pause, "Expected pause, seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  vm->add_option("--init", vm_init, "Initial location law")
      ->check(CLI::IsMember({"point", "uniform"}))
      ->capture_default_str();
  vm->add_option("--x", vm_x, "Initial point x")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  vm->add_option("--y", vm_y, "Initial point y")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  vm->add_option("--samples", vm_samples, "Simulated movement legs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  vm->add_option("--grid", vm_grid, "Comparison grid size per axis")
      ->check(CLI::Range(2, 512))
      ->capture_default_str();
  vm->add_option("--seed", vm_seed, "Simulation seed")->capture_default_str();
  vm->add_option("--out", vm_out, "Density grid CSV path")->capture_default_str();
  vm->add_flag("--force", vm_force, "Replace existing output files");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search on a tiny instance");
  ProblemFlags oracle_pf;
  oracle_pf.preset = "tiny-2";
  oracle_pf.requests = 2;
  double oracle_alpha = 0.5;
  std::uint64_t oracle_seed = 1;
  std::string oracle_out;
  bool oracle_force = false;
  CLI::Option* oracle_grid = add_problem_flags(oracle, oracle_pf);
  oracle->add_option("--alpha", oracle_alpha, "Time weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "Run seed")->capture_default_str();
  oracle->add_option("--out", oracle_out, "Best placement path (skipped when omitted)");
  oracle->add_flag("--force", oracle_force, "Replace existing output files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_count, gen_seed, gen_out, gen_force);
    if (solve->parsed()) {
      return cmd_solve(solve_pf, solve_grid->count() > 0, solve_solver, solve_alpha, solve_seed,
                       solve_tp, solve_out, solve_force);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_config, sweep_out, sweep_force, sweep_jobs,
                       sweep_jobs_opt->count() > 0);
    }
    if (eval->parsed()) {
      return cmd_evaluate(eval_pf, eval_grid->count() > 0, eval_placement, eval_alpha, eval_seed,
                          eval_out, eval_force);
    }
    if (vm->parsed()) {
      return cmd_validate_mobility(vm_p_static, vm_velocity, vm_pause, vm_init, vm_x, vm_y,
                                   vm_samples, vm_grid, vm_seed, vm_out, vm_force);
    }
    if (oracle->parsed()) {
      return cmd_oracle(oracle_pf, oracle_grid->count() > 0, oracle_alpha, oracle_seed, oracle_out,
                        oracle_force);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fogplace
