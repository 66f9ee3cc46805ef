#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "fogplace/cli.hpp"
#include "fogplace/experiment.hpp"
#include "fogplace/io.hpp"

using namespace fogplace;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fogplace-harness-" +
            std::to_string(
                std::chrono::steady_clock::now().time_since_epoch().count()) +
            "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(std::vector<const char*> argv) {
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

Workload small_workload() {
  Workload wl;
  wl.types.push_back({10, 2.0, 1e9, 100.0, 1.0, 2});
  wl.types.push_back({20, 3.0, 1e9, 50.0, 1.0, 2});
  wl.requests.push_back(build_request(7, seq({vnf(10), vnf(20)}),
                                      {{10, 1000.0}, {20, 2000.0}}, {{0, {0.5, 0.5}}}, {}));
  return wl;
}

}  // namespace

TEST_CASE("doubles format to their shortest round-trip form") {
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(2.58) == "2.58");
  CHECK(fmt_double(-3.25) == "-3.25");
  CHECK(fmt_double(0.0) == "0");
  for (double v : {0.1, 171.75850472021236, 5.4e7, 1e-12, 0.5214054331647207}) {
    CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
    CHECK(std::strtod(fmt_double(-v).c_str(), nullptr) == -v);
  }
}

TEST_CASE("text files write once unless forced") {
  TempDir tmp;
  const std::string path = tmp.file("deep/nested/out.txt");
  write_text_file(path, "one\n", false);
  CHECK(read_text_file(path) == "one\n");
  CHECK_THROWS_AS(write_text_file(path, "two\n", false), IoError);
  CHECK(read_text_file(path) == "one\n");
  write_text_file(path, "two\n", true);
  CHECK(read_text_file(path) == "two\n");
  CHECK_THROWS_AS(read_text_file(tmp.file("missing.txt")), IoError);
}

TEST_CASE("json files parse or raise schema errors") {
  TempDir tmp;
  write_text_file(tmp.file("good.json"), "{\"a\": [1, 2]}\n", false);
  const nlohmann::json j = load_json_file(tmp.file("good.json"));
  CHECK(j["a"][1] == 2);
  write_text_file(tmp.file("bad.json"), "{broken", false);
  CHECK_THROWS_AS(load_json_file(tmp.file("bad.json")), SchemaError);
  CHECK_THROWS_AS(load_json_file(tmp.file("absent.json")), IoError);
}

TEST_CASE("trees round-trip through json") {
  const GraphNode t = seq({vnf(1), par({vnf(2), vnf(3)}), sel({vnf(4), vnf(5)}, {0.3, 0.7}),
                           loop({vnf(6), vnf(7)}, 0.5)});
  const nlohmann::json j = tree_to_json(t);
  CHECK(j["kind"] == "seq");
  CHECK(j["children"][0]["type"] == 1);
  CHECK(j["children"][2]["probs"][1] == 0.7);
  CHECK(j["children"][3]["q"] == 0.5);
  CHECK(tree_to_json(tree_from_json(j)) == j);

  CHECK_THROWS_AS(tree_from_json({{"kind", "warp"}}), SchemaError);
  CHECK_THROWS_AS(tree_from_json({{"kind", "vnf"}}), SchemaError);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::array()), SchemaError);
}

TEST_CASE("workloads round-trip through json") {
  const Workload wl = generate_workload(3, 42);
  const nlohmann::json j = workload_to_json(wl);
  const Workload back = workload_from_json(j);
  CHECK(workload_to_json(back) == j);
  REQUIRE(back.requests.size() == wl.requests.size());
  CHECK(back.types.size() == wl.types.size());
  for (std::size_t r = 0; r < wl.requests.size(); ++r) {
    CHECK(back.requests[r].required_types == wl.requests[r].required_types);
    CHECK(back.requests[r].traffic == wl.requests[r].traffic);
  }

  nlohmann::json broken = j;
  broken["requests"][0]["tree"] = {{"kind", "seq"},
                                   {"children", {tree_to_json(vnf(wl.types[0].id))}}};
  CHECK_THROWS_AS(workload_from_json(broken), SchemaError);
  CHECK_THROWS_AS(workload_from_json(nlohmann::json::array()), SchemaError);
}

TEST_CASE("placements round-trip through json with external ids") {
  const Workload wl = small_workload();
  Placement p = Placement::empty(wl);
  p.set_deployed(0, 0, 1);
  p.set_deployed(1, 1, 0);
  p.assign(0, 0, 0);
  p.assign(0, 1, 1);

  const nlohmann::json j = placement_to_json(p, wl);
  const Placement back = placement_from_json(j, wl);
  CHECK(back == p);

  nlohmann::json bad_type = j;
  bad_type["deployments"][0]["type"] = 99;
  CHECK_THROWS_AS(placement_from_json(bad_type, wl), SchemaError);

  nlohmann::json bad_request = j;
  bad_request["assignments"][0]["request"] = 3;
  CHECK_THROWS_AS(placement_from_json(bad_request, wl), SchemaError);
}

TEST_CASE("reports serialize their totals") {
  EvaluationReport rep;
  rep.makespan = {1.5, 2.5};
  rep.comm_cost = {10.0, 30.0};
  rep.makespan_sum = 4.0;
  rep.comm_cost_sum = 40.0;
  rep.license_cost = 200.0;
  rep.hosting_cost = 19.0;
  rep.objective = 131.5;
  rep.fitness = 131.5;

  const nlohmann::json j = report_to_json(rep);
  CHECK(j["makespan"].size() == 2);
  CHECK(j["feasible"] == true);
  CHECK(j["objective"] == 131.5);
  CHECK(j["violations"].empty());

  CHECK(report_csv_header() ==
        "makespan_s,comm_cost,license_cost,hosting_cost,objective,penalty,fitness,feasible,"
        "violations");
  CHECK(report_csv_row(rep) == "4,40,200,19,131.5,0,131.5,1,0");

  rep.violations.push_back({"node_capacity", 1, -1, 10.0, 4.0});
  rep.penalty = 3.0;
  rep.fitness = 134.5;
  const nlohmann::json vj = report_to_json(rep);
  CHECK(vj["feasible"] == false);
  CHECK(vj["violations"][0]["constraint"] == "node_capacity");
  CHECK(vj["violations"][0]["lhs"] == 10.0);
  CHECK(report_csv_row(rep) == "4,40,200,19,131.5,3,134.5,0,1");
}

TEST_CASE("sweep tables serialize deterministically") {
  ResultRow a;
  a.scenario = "tiny-4";
  a.solver = "greedy";
  a.seed = 1;
  a.alpha = 0.25;
  a.requests = 2;
  a.p_static = 0.5;
  a.makespan_s = 2.0;
  a.comm_cost = 10.0;
  a.deploy_cost = 30.0;
  a.objective = 4.0;
  a.fitness = 4.0;
  a.feasible = true;
  a.wall_ms = 1.25;
  a.fog_pct = 40.0;
  a.cloud_pct = 60.0;
  ResultRow b = a;
  b.solver = "tscp";
  b.makespan_s = 4.0;
  b.comm_cost = 20.0;
  b.deploy_cost = 20.0;
  b.objective = 8.0;
  b.fitness = 8.5;
  b.feasible = false;
  b.wall_ms = 2.5;

  CHECK(results_csv({a, b}) ==
        "scenario,solver,seed,alpha,requests,p_static,makespan_s,comm_cost,deploy_cost,"
        "objective,fitness,feasible,fog_pct,cloud_pct,status\n"
        "tiny-4,greedy,1,0.25,2,0.5,2,10,30,4,4,1,40,60,ok\n"
        "tiny-4,tscp,1,0.25,2,0.5,4,20,20,8,8.5,0,40,60,ok\n");

  CHECK(results_csv({a, b}, true) ==
        "scenario,solver,seed,alpha,requests,p_static,makespan_s,comm_cost,deploy_cost,"
        "objective,fitness,feasible,fog_pct,cloud_pct,status,makespan_rel,cost_rel,"
        "objective_rel\n"
        "tiny-4,greedy,1,0.25,2,0.5,2,10,30,4,4,1,40,60,ok,0.5,1,0.5\n"
        "tiny-4,tscp,1,0.25,2,0.5,4,20,20,8,8.5,0,40,60,ok,1,1,1\n");

  CHECK(timings_csv({a, b}) ==
        "scenario,solver,seed,alpha,requests,p_static,wall_ms\n"
        "tiny-4,greedy,1,0.25,2,0.5,1.25\n"
        "tiny-4,tscp,1,0.25,2,0.5,2.5\n");

  const TraceRow t0{1, 5.0, 5.0, MoveKind::vnf_reassign, true, 0.5};
  const TraceRow t1{2, 4.5, 4.5, MoveKind::request_reassign, false, 1.5};
  CHECK(trace_csv({t0, t1}) ==
        "iteration,fitness,best_fitness,move,moved,elapsed_ms\n"
        "1,5,5,vnf_reassign,1,0.5\n"
        "2,4.5,4.5,request_reassign,0,1.5\n");
}

TEST_CASE("config documents parse with defaults") {
  const ExperimentConfig cfg = config_from_json(nlohmann::json::object());
  CHECK(cfg.preset == "topology-10");
  CHECK(cfg.tier_filter == "hybrid");
  CHECK(cfg.quadrature_grid == 24);
  CHECK(cfg.request_count == 15);
  CHECK(cfg.solvers == std::vector<std::string>{"tscp"});
  CHECK(cfg.alphas == std::vector<double>{0.5});
  CHECK(cfg.p_statics.empty());
  CHECK(cfg.request_counts.empty());
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  CHECK(cfg.tabu.tenure == 60);
  CHECK(cfg.jobs == 0);
  CHECK(!cfg.normalize);
}

TEST_CASE("config documents parse every field") {
  const nlohmann::json doc = {
      {"preset", "tiny-4"},
      {"tier_filter", "fog"},
      {"quadrature_grid", 16},
      {"fog_velocity", 2.0},
      {"fog_pause", 0.3},
      {"link_jitter", 0.1},
      {"p_static", 0.25},
      {"request_count", 3},
      {"workload", {{"num_types", 5}, {"vnfs_max", 5}, {"users_min", 2}, {"users_max", 4}}},
      {"solvers", {"greedy", "psf"}},
      {"alphas", {0.0, 1.0}},
      {"p_statics", {0.0, 0.5}},
      {"request_counts", {1, 2}},
      {"seeds", {3, 4}},
      {"tabu",
       {{"tenure", 30}, {"stop_after", 10}, {"neighborhood", 8}, {"max_iterations", 500}}},
      {"limits",
       {{"max_nodes", 3}, {"max_types", 2}, {"max_instances", 2}, {"max_requests", 2}}},
      {"jobs", 2},
      {"normalize", true},
  };
  const ExperimentConfig cfg = config_from_json(doc);
  CHECK(cfg.preset == "tiny-4");
  CHECK(cfg.tier_filter == "fog");
  CHECK(cfg.quadrature_grid == 16);
  CHECK(cfg.fog_velocity == 2.0);
  CHECK(cfg.fog_pause == 0.3);
  CHECK(cfg.link_jitter == 0.1);
  CHECK(cfg.default_p_static == 0.25);
  CHECK(cfg.request_count == 3);
  CHECK(cfg.workload.num_types == 5);
  CHECK(cfg.workload.vnfs_max == 5);
  CHECK(cfg.workload.users_min == 2);
  CHECK(cfg.workload.users_max == 4);
  CHECK(cfg.solvers == std::vector<std::string>{"greedy", "psf"});
  CHECK(cfg.alphas == std::vector<double>{0.0, 1.0});
  CHECK(cfg.p_statics == std::vector<double>{0.0, 0.5});
  CHECK(cfg.request_counts == std::vector<int>{1, 2});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(cfg.tabu.tenure == 30);
  CHECK(cfg.tabu.stop_after == 10);
  CHECK(cfg.tabu.neighborhood == 8);
  CHECK(cfg.tabu.max_iterations == 500);
  CHECK(cfg.limits.max_nodes == 3);
  CHECK(cfg.limits.max_types == 2);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.normalize);
}

TEST_CASE("config documents reject malformed fields") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"solvers", {"warp"}}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"solvers", nlohmann::json::array()}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"alphas", {1.5}}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"p_statics", {-0.5}}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"seeds", nlohmann::json::array()}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"tier_filter", "space"}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"request_count", 0}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"quadrature_grid", 1}}), SchemaError);
  CHECK_THROWS_AS(config_from_json({{"request_counts", {0}}}), SchemaError);
}

TEST_CASE("solver dispatch knows the documented names") {
  const Workload wl = generate_workload(1, 3);
  NetworkModel net = scenario_preset("tiny-2", 3, {});
  register_users(net, wl);
  const ExpectedLinkCache cache = build_cache(net);
  const Evaluator ev(net, wl, cache);

  TabuParams params;
  params.seed = 3;
  params.stop_after = 3;
  params.neighborhood = 4;
  const SolveResult res = run_solver("greedy", ev, 0.5, params);
  CHECK(res.status == "ok");
  CHECK_THROWS_AS(run_solver("warp", ev, 0.5, params), DomainError);
}

TEST_CASE("sweeps enumerate cells in declaration order and repeat exactly") {
  ExperimentConfig cfg;
  cfg.preset = "tiny-4";
  cfg.request_counts = {2};
  cfg.seeds = {1, 2};
  cfg.solvers = {"greedy", "tscp"};
  cfg.alphas = {0.25, 0.75};
  cfg.p_statics = {0.5};
  cfg.tabu.stop_after = 5;
  cfg.tabu.neighborhood = 4;
  cfg.tabu.max_iterations = 50;
  cfg.jobs = 2;

  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 8);

  std::size_t i = 0;
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    for (double alpha : {0.25, 0.75}) {
      for (const char* solver : {"greedy", "tscp"}) {
        const ResultRow& row = res.rows[i++];
        CHECK(row.scenario == "tiny-4");
        CHECK(row.solver == solver);
        CHECK(row.seed == seed);
        CHECK(row.alpha == alpha);
        CHECK(row.requests == 2);
        CHECK(row.p_static == 0.5);
        CHECK(row.status == "ok");
        CHECK(row.fitness > 0.0);
        CHECK(row.wall_ms >= 0.0);
      }
    }
  }

  const ExperimentResult again = run_experiment(cfg);
  CHECK(results_csv(again.rows) == results_csv(res.rows));
}

TEST_CASE("oversized exhaustive cells land as too_large rows") {
  ExperimentConfig cfg;
  cfg.preset = "topology-10";
  cfg.request_counts = {2};
  cfg.seeds = {1};
  cfg.solvers = {"optimal"};
  cfg.alphas = {0.5};
  cfg.p_statics = {0.5};

  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].status == "too_large");
  CHECK(res.rows[0].solver == "optimal");
}

TEST_CASE("cli entry reports usage, success and failure") {
  TempDir tmp;
  CHECK(run_cli({"fogplace", "--help"}) == 0);
  CHECK(run_cli({"fogplace"}) == 2);
  CHECK(run_cli({"fogplace", "nonsense"}) == 2);
  CHECK(run_cli({"fogplace", "solve", "--solver", "warp"}) == 2);

  const std::string wl_path = tmp.file("wl.json");
  CHECK(run_cli({"fogplace", "generate", "--count", "2", "--seed", "3", "--out",
                 wl_path.c_str()}) == 0);
  const Workload wl = workload_from_json(load_json_file(wl_path));
  CHECK(wl.requests.size() == 2);
  CHECK(run_cli({"fogplace", "generate", "--count", "2", "--seed", "3", "--out",
                 wl_path.c_str()}) == 1);
  CHECK(run_cli({"fogplace", "generate", "--count", "2", "--seed", "3", "--out",
                 wl_path.c_str(), "--force"}) == 0);
}

TEST_CASE("cli solve writes its artifact set") {
  TempDir tmp;
  const std::string out = tmp.file("run");
  CHECK(run_cli({"fogplace", "solve", "--preset", "tiny-2", "--requests", "1", "--seed", "1",
                 "--solver", "tscp", "--alpha", "0.5", "--out", out.c_str()}) == 0);
  for (const char* name : {"result.csv", "trace.csv", "placement.json", "report.json"}) {
    CHECK(fs::exists(fs::path(out) / name));
  }
  const nlohmann::json rep = load_json_file((fs::path(out) / "report.json").string());
  CHECK(rep.contains("fitness"));
}
