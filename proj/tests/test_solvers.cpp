#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tuple>
#include <vector>

#include "fogplace/solvers.hpp"

using namespace fogplace;

namespace {

// Generated workload on a preset network, wired together in member order so
// the evaluator's references stay valid for the fixture's lifetime.
struct Problem {
  Workload wl;
  NetworkModel net;
  ExpectedLinkCache cache;
  Evaluator ev;

  Problem(const char* preset, int requests, std::uint64_t seed, double fog_p_static,
          const WorkloadParams& wp = {})
      : wl(generate_workload(requests, seed, wp)),
        net(make_net(preset, seed, fog_p_static, wl)),
        cache(build_cache(net)),
        ev(net, wl, cache) {}

  static NetworkModel make_net(const char* preset, std::uint64_t seed, double fog_p_static,
                               const Workload& wl) {
    ScenarioOptions so;
    so.fog_p_static = fog_p_static;
    NetworkModel net = scenario_preset(preset, seed, so);
    register_users(net, wl);
    return net;
  }
};

// Static cloud-at-origin / fog-at-center pair used for scripted moves.
NetworkModel static_two_node_net() {
  nlohmann::json doc = {
      {"fog_p_static", 1.0},
      {"nodes",
       {{{"tier", "cloud"}, {"capacity", 8}, {"unit_cost", 3.0}, {"x", 0.0}, {"y", 0.0}},
        {{"tier", "fog"}, {"capacity", 4}, {"unit_cost", 5.0}, {"x", 0.5}, {"y", 0.5}}}},
  };
  return load_scenario(doc);
}

Workload two_request_workload() {
  Workload wl;
  wl.types.push_back({10, 2.0, 1e9, 100.0, 1.0, 2});
  wl.types.push_back({20, 3.0, 1e9, 50.0, 1.0, 2});
  for (int r = 0; r < 2; ++r) {
    wl.requests.push_back(build_request(r, seq({vnf(10), vnf(20)}),
                                        {{10, 1000.0}, {20, 2000.0}}, {{r, {0.5, 0.5}}},
                                        {{r, 10, 5000.0}}));
  }
  return wl;
}

struct StaticFixture {
  NetworkModel net;
  Workload wl;
  ExpectedLinkCache cache;
  StaticFixture() : net(static_two_node_net()), wl(two_request_workload()) {
    register_users(net, wl);
    cache = build_cache(net);
  }
};

using MoveSig = std::tuple<int, TabuKey, TabuKey>;

std::vector<MoveSig> signatures(const std::vector<Move>& moves) {
  std::vector<MoveSig> out;
  for (const Move& m : moves) {
    out.push_back({static_cast<int>(m.kind), probe_key(m), reverse_key(m)});
  }
  return out;
}

}  // namespace

TEST_CASE("tabu list remembers keys for the tenure window") {
  TabuList tl(3);
  const TabuKey k{0, 1, 2, 3};
  CHECK(!tl.is_tabu(k, 5));

  tl.remember(k, 5);
  CHECK(tl.is_tabu(k, 5));
  CHECK(tl.is_tabu(k, 8));
  CHECK(!tl.is_tabu(k, 9));
  CHECK(!tl.is_tabu(TabuKey{1, 0, 0, 0}, 6));

  tl.remember(k, 9);  // re-remembering restarts the window
  CHECK(tl.is_tabu(k, 12));
  CHECK(!tl.is_tabu(k, 13));
  CHECK(tl.size() == 1);
}

TEST_CASE("admission lets a tabu move through only when it beats the best") {
  TabuList tl(10);
  const TabuKey k{2, 0, 0, 1};
  tl.remember(k, 1);
  CHECK(!move_admissible(tl, k, 3, 5.0, 4.0));
  CHECK(move_admissible(tl, k, 3, 3.9, 4.0));
  CHECK(move_admissible(tl, TabuKey{2, 0, 0, 2}, 3, 99.0, 4.0));
}

TEST_CASE("probe and reverse keys mirror each move kind") {
  Move m;
  m.kind = MoveKind::vnf_reassign;
  m.type_idx = 2;
  m.instance = 1;
  m.source_node = 3;
  m.target_node = 4;
  CHECK(probe_key(m) == TabuKey{0, 2, 1, 4});
  CHECK(reverse_key(m) == TabuKey{0, 2, 1, 3});

  m.kind = MoveKind::bulk_vnf_reassign;
  CHECK(probe_key(m) == TabuKey{1, 3, 4, 0});
  CHECK(reverse_key(m) == TabuKey{1, 4, 3, 0});

  m.kind = MoveKind::request_reassign;
  m.request = 5;
  m.source_instance = 0;
  m.target_instance = 1;
  CHECK(probe_key(m) == TabuKey{2, 5, 2, 1});
  CHECK(reverse_key(m) == TabuKey{2, 5, 2, 0});

  m.kind = MoveKind::bulk_request_reassign;
  CHECK(probe_key(m) == TabuKey{3, 2, 0, 1});
  CHECK(reverse_key(m) == TabuKey{3, 2, 1, 0});
}

TEST_CASE("scripted moves apply and revert exactly") {
  StaticFixture fx;
  const Evaluator ev(fx.net, fx.wl, fx.cache);

  Placement base = ev.empty_placement();
  base.set_deployed(0, 0, 0);
  base.set_deployed(1, 0, 0);
  for (int r = 0; r < 2; ++r) {
    base.assign(r, 0, 0);
    base.assign(r, 1, 0);
  }

  SUBCASE("instance relocation") {
    Placement p = base;
    Move m;
    m.kind = MoveKind::vnf_reassign;
    m.type_idx = 0;
    m.instance = 0;
    m.source_node = 0;
    m.target_node = 1;
    const MoveUndo u = apply_move(p, m, ev);
    CHECK(p.deployed_node(0, 0) == 1);
    CHECK(p.assigned_instance(0, 0) == 0);
    revert_move(p, u);
    CHECK(p == base);
  }

  SUBCASE("node evacuation") {
    Placement p = base;
    Move m;
    m.kind = MoveKind::bulk_vnf_reassign;
    m.source_node = 0;
    m.target_node = 1;
    const MoveUndo u = apply_move(p, m, ev);
    CHECK(p.deployed_node(0, 0) == 1);
    CHECK(p.deployed_node(1, 0) == 1);
    revert_move(p, u);
    CHECK(p == base);
  }

  SUBCASE("reassigning the last user sweeps the emptied source") {
    Placement p = ev.empty_placement();
    p.set_deployed(0, 0, 0);
    p.set_deployed(0, 1, 1);
    p.set_deployed(1, 0, 0);
    p.assign(0, 0, 0);  // only request 0 uses type 10's instance 0
    p.assign(0, 1, 0);
    p.assign(1, 0, -1);
    p.assign(1, 1, 0);
    const Placement before = p;

    Move m;
    m.kind = MoveKind::request_reassign;
    m.request = 0;
    m.slot = 0;
    m.type_idx = 0;
    m.source_instance = 0;
    m.target_instance = 1;
    const MoveUndo u = apply_move(p, m, ev);
    CHECK(p.assigned_instance(0, 0) == 1);
    CHECK(p.deployed_node(0, 0) == -1);  // nothing left on it
    revert_move(p, u);
    CHECK(p == before);
  }

  SUBCASE("draining an instance sweeps it too") {
    Placement p = base;
    p.set_deployed(0, 1, 1);
    const Placement before = p;

    Move m;
    m.kind = MoveKind::bulk_request_reassign;
    m.type_idx = 0;
    m.source_instance = 0;
    m.target_instance = 1;
    const MoveUndo u = apply_move(p, m, ev);
    CHECK(p.assigned_instance(0, 0) == 1);
    CHECK(p.assigned_instance(1, 0) == 1);
    CHECK(p.deployed_node(0, 0) == -1);
    revert_move(p, u);
    CHECK(p == before);
  }
}

TEST_CASE("proposed moves round-trip through apply and revert") {
  // topology-10 keeps spare capacity everywhere, so a candidate move always
  // exists no matter where the applied moves wander.
  Problem pr("topology-10", 3, 5, 0.5);
  const MoveGenerator gen(pr.ev, 0.5, TargetPolicy::guided);
  Placement p = initial_placement(pr.ev, 1);
  Rng rng(77);

  for (int step = 0; step < 60; ++step) {
    const std::vector<Move> moves = gen.propose(p, rng, 1);
    REQUIRE(moves.size() == 1);
    const Placement snapshot = p;
    const MoveUndo u = apply_move(p, moves[0], pr.ev);
    revert_move(p, u);
    CHECK(p == snapshot);
    if (step % 3 == 0) apply_move(p, moves[0], pr.ev);  // wander to new states
  }
}

TEST_CASE("move generation is deterministic in the rng state") {
  Problem pr("tiny-4", 3, 5, 0.5);
  const MoveGenerator gen(pr.ev, 0.5, TargetPolicy::guided);
  const Placement p = initial_placement(pr.ev, 1);

  Rng a(42), b(42);
  const auto first = signatures(gen.propose(p, a, 8));
  const auto second = signatures(gen.propose(p, b, 8));
  CHECK(first == second);

  const MoveGenerator uni(pr.ev, 0.5, TargetPolicy::uniform);
  Rng c(42), d(42);
  CHECK(signatures(uni.propose(p, c, 8)) == signatures(uni.propose(p, d, 8)));
}

TEST_CASE("initial placement deploys one instance per required type") {
  Problem pr("tiny-4", 3, 5, 0.5);
  const Placement p = initial_placement(pr.ev, 7);

  for (int t = 0; t < p.type_count(); ++t) {
    bool required = false;
    for (int r = 0; r < pr.ev.request_count(); ++r) {
      for (const SlotInfo& si : pr.ev.request_info(r).slots) {
        if (si.type_idx == t) required = true;
      }
    }
    if (required) {
      CHECK(p.deployed_node(t, 0) >= 0);
      CHECK(p.deployed_node(t, 0) < static_cast<int>(pr.net.nodes.size()));
    } else {
      CHECK(p.deployed_node(t, 0) == -1);
    }
    for (int i = 1; i < p.instance_count(t); ++i) CHECK(p.deployed_node(t, i) == -1);
  }
  for (int r = 0; r < p.request_count(); ++r) {
    for (int s = 0; s < p.slot_count(r); ++s) CHECK(p.assigned_instance(r, s) == 0);
  }

  CHECK(initial_placement(pr.ev, 7) == p);
  bool any_differs = false;
  for (std::uint64_t seed : {2ULL, 3ULL, 4ULL, 5ULL}) {
    if (!(initial_placement(pr.ev, seed) == p)) any_differs = true;
  }
  CHECK(any_differs);
}

TEST_CASE("types nobody requests stay undeployed in the initial placement") {
  StaticFixture fx;
  Workload wl = fx.wl;
  wl.types.push_back({30, 1.0, 1e9, 100.0, 1.0, 2});  // never referenced
  const Evaluator ev(fx.net, wl, fx.cache);
  const Placement p = initial_placement(ev, 3);
  CHECK(p.deployed_node(2, 0) == -1);
  CHECK(p.deployed_node(2, 1) == -1);
}

TEST_CASE("tabu search is deterministic and traces its progress") {
  Problem pr("tiny-4", 3, 5, 0.5);
  TabuParams params;
  params.tenure = 10;
  params.stop_after = 8;
  params.neighborhood = 8;
  params.seed = 3;
  params.max_iterations = 200;

  const SolveResult a = tabu_search(pr.ev, 0.5, params);
  const SolveResult b = tabu_search(pr.ev, 0.5, params);
  CHECK(a.best == b.best);
  CHECK(a.best_fitness == b.best_fitness);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.status == "ok");

  const Placement init = initial_placement(pr.ev, params.seed);
  const double init_objective = pr.ev.evaluate(init, {0.5, 0.0, 1.0, 1.0}).objective;
  CHECK(a.obj_scale == init_objective);
  const double init_fitness = pr.ev.evaluate(init, {0.5, a.obj_scale, 1.0, 1.0}).fitness;
  CHECK(a.best_fitness <= init_fitness);
  CHECK(pr.ev.evaluate(a.best, {0.5, a.obj_scale, 1.0, 1.0}).fitness ==
        doctest::Approx(a.best_fitness).epsilon(1e-12));

  REQUIRE(!a.trace.empty());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].iteration == static_cast<long>(i + 1));
    if (i > 0) {
      CHECK(a.trace[i].best_fitness <= a.trace[i - 1].best_fitness);
      CHECK(a.trace[i].elapsed_ms >= a.trace[i - 1].elapsed_ms);
    }
  }
  CHECK(a.trace.back().best_fitness == a.best_fitness);

  const SolveResult u1 = tabu_search(pr.ev, 0.5, params, TargetPolicy::uniform);
  const SolveResult u2 = tabu_search(pr.ev, 0.5, params, TargetPolicy::uniform);
  CHECK(u1.best == u2.best);
  CHECK(u1.best_fitness == u2.best_fitness);
}

TEST_CASE("exhaustive search enumerates the tiny space exactly") {
  WorkloadParams tiny;
  tiny.num_types = 3;
  tiny.vnfs_min = 3;
  tiny.vnfs_max = 3;
  tiny.heights = {2};
  tiny.users_min = 2;
  tiny.users_max = 3;
  tiny.instances_per_type = 2;

  Problem pr("tiny-2", 2, 2, 0.5, tiny);
  const SolveResult ex = exhaustive_optimal(pr.ev, 0.5, 2);
  // 14^3: per type, five node multisets whose instance counts square over the
  // type's two slots (2*1 + 3*4), independently across three types.
  CHECK(ex.evaluated == 2744);
  CHECK(ex.best_fitness == doctest::Approx(171.75850472021236).epsilon(1e-12));
  CHECK(ex.status == "ok");

  TabuParams params;
  params.seed = 2;
  const SolveResult ts = tabu_search(pr.ev, 0.5, params);
  CHECK(ex.best_fitness <= ts.best_fitness + 1e-9);
  const SolveResult gr = greedy_place(pr.ev, 0.5, 2);
  CHECK(ex.best_fitness <= gr.best_fitness + 1e-9);
}

TEST_CASE("exhaustive search rejects oversized inputs") {
  WorkloadParams tiny;
  tiny.num_types = 3;
  tiny.vnfs_min = 3;
  tiny.vnfs_max = 3;
  tiny.heights = {2};
  tiny.users_min = 2;
  tiny.users_max = 3;
  tiny.instances_per_type = 2;

  Problem big("topology-10", 2, 2, 0.5, tiny);
  CHECK_THROWS_AS(exhaustive_optimal(big.ev, 0.5, 2), TooLarge);

  Problem wide("tiny-2", 2, 2, 0.5);  // default workload: 4 instance slots per type
  CHECK_THROWS_AS(exhaustive_optimal(wide.ev, 0.5, 2), TooLarge);

  Problem many("tiny-2", 4, 2, 0.5, tiny);
  CHECK_THROWS_AS(exhaustive_optimal(many.ev, 0.5, 2), TooLarge);

  Problem fine("tiny-2", 2, 2, 0.5, tiny);
  ExhaustiveLimits strict;
  strict.max_types = 2;
  CHECK_THROWS_AS(exhaustive_optimal(fine.ev, 0.5, 2, strict), TooLarge);
}

TEST_CASE("greedy placement is deterministic and reuses deployed instances") {
  StaticFixture fx;
  const Evaluator ev(fx.net, fx.wl, fx.cache);

  const SolveResult g = greedy_place(ev, 0.5, 1);
  // Request 0 instantiates on the time-optimal feasible nodes: the user feed
  // pulls type 10 onto the fog, whose leftover capacity then forces type 20
  // onto the cloud. Request 1 reuses both instances.
  CHECK(g.best.deployed_node(0, 0) == 1);
  CHECK(g.best.deployed_node(1, 0) == 0);
  CHECK(g.best.deployed_node(0, 1) == -1);
  CHECK(g.best.deployed_node(1, 1) == -1);
  for (int r = 0; r < 2; ++r) {
    CHECK(g.best.assigned_instance(r, 0) == 0);
    CHECK(g.best.assigned_instance(r, 1) == 0);
  }
  CHECK(ev.evaluate(g.best, {0.5, g.obj_scale, 1.0, 1.0}).feasible());

  const SolveResult h = greedy_place(ev, 0.5, 99);  // the seed only pins the scale
  CHECK(h.best == g.best);
}

TEST_CASE("greedy overloads the least-loaded instance when nothing else fits") {
  NetworkModel net = static_two_node_net();
  Workload wl;
  wl.types.push_back({10, 2.0, 7000.0, 100.0, 1.0, 1});
  for (int r = 0; r < 2; ++r) {
    wl.requests.push_back(
        build_request(r, vnf(10), {{10, 1000.0}}, {{r, {0.5, 0.5}}}, {{r, 10, 5000.0}}));
  }
  register_users(net, wl);
  const ExpectedLinkCache cache = build_cache(net);
  const Evaluator ev(net, wl, cache);

  const SolveResult g = greedy_place(ev, 0.5, 1);
  CHECK(g.best.deployed_node(0, 0) == 1);  // user feed favors the fog
  CHECK(g.best.assigned_instance(0, 0) == 0);
  CHECK(g.best.assigned_instance(1, 0) == 0);
  CHECK(ev.instance_load(g.best, 0, 0) == doctest::Approx(12000.0).epsilon(1e-12));

  const EvaluationReport rep = ev.evaluate(g.best, {0.5, g.obj_scale, 1.0, 1.0});
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].constraint == "instance_capacity");
  CHECK(rep.penalty > 0.0);
}

TEST_CASE("planning on frozen positions matches the static-world search") {
  Problem pr("tiny-4", 2, 9, 1.0);
  TabuParams params;
  params.tenure = 20;
  params.stop_after = 10;
  params.neighborhood = 8;
  params.seed = 4;
  params.max_iterations = 300;

  const SolveResult ts = tabu_search(pr.ev, 0.5, params);
  const SolveResult ps = psf_place(pr.net, pr.wl, 0.5, params);
  CHECK(ps.best == ts.best);
  CHECK(ps.best_fitness == ts.best_fitness);
}

TEST_CASE("degenerate single-node networks stop cleanly") {
  nlohmann::json doc = {
      {"nodes",
       {{{"tier", "cloud"}, {"capacity", 8}, {"unit_cost", 3.0}, {"x", 0.5}, {"y", 0.5}}}},
  };
  NetworkModel net = load_scenario(doc);
  Workload wl;
  wl.types.push_back({10, 2.0, 1e9, 100.0, 1.0, 1});
  wl.requests.push_back(
      build_request(0, vnf(10), {{10, 1000.0}}, {{0, {0.5, 0.5}}}, {{0, 10, 5000.0}}));
  register_users(net, wl);
  const ExpectedLinkCache cache = build_cache(net);
  const Evaluator ev(net, wl, cache);

  const MoveGenerator gen(ev, 0.5, TargetPolicy::guided);
  Rng rng(1);
  const Placement p = initial_placement(ev, 1);
  CHECK_THROWS_AS(gen.propose(p, rng, 8), NoMoveAvailable);

  TabuParams params;
  params.stop_after = 3;
  params.seed = 1;
  const SolveResult res = tabu_search(ev, 0.5, params);
  CHECK(res.best == p);
  CHECK(res.status == "ok");
  CHECK(res.trace.size() == 4);
  for (const TraceRow& row : res.trace) CHECK(!row.moved);
}
