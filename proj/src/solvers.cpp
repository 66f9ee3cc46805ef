#include "fogplace/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "fogplace/infra.hpp"

namespace fogplace {

const char* to_string(MoveKind k) {
  switch (k) {
    case MoveKind::vnf_reassign: return "vnf_reassign";
    case MoveKind::bulk_vnf_reassign: return "bulk_vnf_reassign";
    case MoveKind::request_reassign: return "request_reassign";
    case MoveKind::bulk_request_reassign: return "bulk_request_reassign";
  }
  return "?";
}

namespace {

int assignment_count(const Placement& p, const Evaluator& ev, int t_idx, int inst) {
  int count = 0;
  for (int r = 0; r < p.request_count(); ++r) {
    const RequestInfo& info = ev.request_info(r);
    for (std::size_t s = 0; s < info.slots.size(); ++s) {
      if (info.slots[s].type_idx == t_idx && p.assigned_instance(r, static_cast<int>(s)) == inst) {
        ++count;
      }
    }
  }
  return count;
}

// Local score of running (r, slot) on `node`: time and communication with
// the already-assigned predecessors and the users, weighted like the
// objective.
double local_score(const Evaluator& ev, const Placement& p, int r, int slot, int node,
                   double alpha) {
  const RequestInfo& info = ev.request_info(r);
  const SlotInfo& si = info.slots[static_cast<std::size_t>(slot)];
  double pred_time = 0.0, pred_cost = 0.0;
  for (int q : si.preds) {
    const int qinst = p.assigned_instance(r, q);
    if (qinst < 0) continue;
    const int m = p.deployed_node(info.slots[static_cast<std::size_t>(q)].type_idx, qinst);
    if (m < 0) continue;
    const LinkExpectation& e = ev.cache().pair(node, m);
    pred_time += si.traffic * e.inv_bw + e.latency_s;
    pred_cost += si.traffic * e.cost_per_byte;
  }
  double user_time = 0.0, user_cost = 0.0;
  for (const auto& [u, bytes] : si.iot) {
    const LinkExpectation& e = ev.cache().user(node, u);
    user_time += bytes * e.inv_bw + e.latency_s;
    user_cost += bytes * e.cost_per_byte;
  }
  const double proc = ev.processing_time_at(r, slot, node);
  return alpha * (proc + std::max(pred_time, user_time)) +
         (1.0 - alpha) * (pred_cost + user_cost);
}

// Score of hosting instance (t, i) on `node`, summed over everything
// assigned to it.
double instance_score(const Evaluator& ev, const Placement& p, int t_idx, int inst, int node,
                      double alpha) {
  const double hosting = ev.network().nodes[static_cast<std::size_t>(node)].unit_cost *
                         ev.type(t_idx).resource_req;
  double score = (1.0 - alpha) * hosting;
  for (int r = 0; r < p.request_count(); ++r) {
    const RequestInfo& info = ev.request_info(r);
    for (std::size_t s = 0; s < info.slots.size(); ++s) {
      if (info.slots[s].type_idx == t_idx && p.assigned_instance(r, static_cast<int>(s)) == inst) {
        score += local_score(ev, p, r, static_cast<int>(s), node, alpha);
      }
    }
  }
  return score;
}

bool node_fits(const Evaluator& ev, const Placement& p, int node, double extra_req) {
  const NodeSpec& ns = ev.network().nodes[static_cast<std::size_t>(node)];
  return ev.node_load(p, node) + extra_req <= ns.usage_threshold * ns.capacity + 1e-12;
}

bool instance_fits(const Evaluator& ev, const Placement& p, int t_idx, int inst, double extra) {
  const VnfType& vt = ev.type(t_idx);
  return ev.instance_load(p, t_idx, inst) + extra <= vt.util_threshold * vt.capacity_bytes + 1e-12;
}

}  // namespace

MoveUndo apply_move(Placement& p, const Move& m, const Evaluator& ev) {
  MoveUndo u;
  auto deploy = [&](int t, int i, int node) {
    u.deployed.push_back({t, i, p.deployed_node(t, i)});
    p.set_deployed(t, i, node);
  };
  auto assign = [&](int r, int s, int inst) {
    u.assigned.push_back({r, s, p.assigned_instance(r, s)});
    p.assign(r, s, inst);
  };
  auto sweep_empty = [&](int t, int i) {
    if (p.deployed_node(t, i) >= 0 && assignment_count(p, ev, t, i) == 0) deploy(t, i, -1);
  };

  switch (m.kind) {
    case MoveKind::vnf_reassign:
      deploy(m.type_idx, m.instance, m.target_node);
      break;
    case MoveKind::bulk_vnf_reassign:
      for (int t = 0; t < p.type_count(); ++t) {
        for (int i = 0; i < p.instance_count(t); ++i) {
          if (p.deployed_node(t, i) == m.source_node) deploy(t, i, m.target_node);
        }
      }
      break;
    case MoveKind::request_reassign:
      assign(m.request, m.slot, m.target_instance);
      sweep_empty(m.type_idx, m.source_instance);
      break;
    case MoveKind::bulk_request_reassign:
      for (int r = 0; r < p.request_count(); ++r) {
        const RequestInfo& info = ev.request_info(r);
        for (std::size_t s = 0; s < info.slots.size(); ++s) {
          if (info.slots[s].type_idx == m.type_idx &&
              p.assigned_instance(r, static_cast<int>(s)) == m.source_instance) {
            assign(r, static_cast<int>(s), m.target_instance);
          }
        }
      }
      sweep_empty(m.type_idx, m.source_instance);
      break;
  }
  return u;
}

void revert_move(Placement& p, const MoveUndo& u) {
  for (auto it = u.assigned.rbegin(); it != u.assigned.rend(); ++it) {
    p.assign((*it)[0], (*it)[1], (*it)[2]);
  }
  for (auto it = u.deployed.rbegin(); it != u.deployed.rend(); ++it) {
    p.set_deployed((*it)[0], (*it)[1], (*it)[2]);
  }
}

TabuKey probe_key(const Move& m) {
  switch (m.kind) {
    case MoveKind::vnf_reassign:
      return {0, m.type_idx, m.instance, m.target_node};
    case MoveKind::bulk_vnf_reassign:
      return {1, m.source_node, m.target_node, 0};
    case MoveKind::request_reassign:
      return {2, m.request, m.type_idx, m.target_instance};
    case MoveKind::bulk_request_reassign:
      return {3, m.type_idx, m.source_instance, m.target_instance};
  }
  return {};
}

TabuKey reverse_key(const Move& m) {
  switch (m.kind) {
    case MoveKind::vnf_reassign:
      return {0, m.type_idx, m.instance, m.source_node};
    case MoveKind::bulk_vnf_reassign:
      return {1, m.target_node, m.source_node, 0};
    case MoveKind::request_reassign:
      return {2, m.request, m.type_idx, m.source_instance};
    case MoveKind::bulk_request_reassign:
      return {3, m.type_idx, m.target_instance, m.source_instance};
  }
  return {};
}

std::optional<Move> MoveGenerator::make_vnf_move(const Placement& p, Rng& rng) const {
  std::vector<std::pair<int, int>> subjects;
  for (int t = 0; t < p.type_count(); ++t) {
    for (int i = 0; i < p.instance_count(t); ++i) {
      if (p.deployed_node(t, i) >= 0) subjects.push_back({t, i});
    }
  }
  if (subjects.empty()) return std::nullopt;
  const auto [t, i] = subjects[rng.index(subjects.size())];
  return vnf_move_for(p, t, i, rng);
}

std::optional<Move> MoveGenerator::vnf_move_for(const Placement& p, int t, int i, Rng& rng) const {
  const int src = p.deployed_node(t, i);
  if (src < 0) return std::nullopt;
  const double req = ev_->type(t).resource_req;

  std::vector<int> targets;
  const int N = static_cast<int>(ev_->network().nodes.size());
  for (int n = 0; n < N; ++n) {
    if (n != src && node_fits(*ev_, p, n, req)) targets.push_back(n);
  }
  if (targets.empty()) return std::nullopt;

  int chosen;
  if (policy_ == TargetPolicy::uniform) {
    chosen = targets[rng.index(targets.size())];
  } else {
    chosen = targets.front();
    double best = std::numeric_limits<double>::infinity();
    for (int n : targets) {
      const double s = instance_score(*ev_, p, t, i, n, alpha_);
      if (s < best) {
        best = s;
        chosen = n;
      }
    }
  }
  Move m;
  m.kind = MoveKind::vnf_reassign;
  m.type_idx = t;
  m.instance = i;
  m.source_node = src;
  m.target_node = chosen;
  return m;
}

std::optional<Move> MoveGenerator::make_bulk_vnf_move(const Placement& p, Rng& rng) const {
  const int N = static_cast<int>(ev_->network().nodes.size());
  std::vector<int> sources;
  for (int n = 0; n < N; ++n) {
    if (ev_->node_load(p, n) > 0.0) sources.push_back(n);
  }
  if (sources.empty()) return std::nullopt;
  const int src = sources[rng.index(sources.size())];
  return bulk_vnf_move_for(p, src, rng);
}

std::optional<Move> MoveGenerator::bulk_vnf_move_for(const Placement& p, int src,
                                                     Rng& rng) const {
  const int N = static_cast<int>(ev_->network().nodes.size());
  std::vector<std::pair<int, int>> bundle;
  double bundle_req = 0.0;
  for (int t = 0; t < p.type_count(); ++t) {
    for (int i = 0; i < p.instance_count(t); ++i) {
      if (p.deployed_node(t, i) == src) {
        bundle.push_back({t, i});
        bundle_req += ev_->type(t).resource_req;
      }
    }
  }
  if (bundle.empty()) return std::nullopt;

  std::vector<int> targets;
  for (int n = 0; n < N; ++n) {
    if (n != src && node_fits(*ev_, p, n, bundle_req)) targets.push_back(n);
  }
  if (targets.empty()) return std::nullopt;

  int chosen;
  if (policy_ == TargetPolicy::uniform) {
    chosen = targets[rng.index(targets.size())];
  } else {
    chosen = targets.front();
    double best = std::numeric_limits<double>::infinity();
    for (int n : targets) {
      double s = 0.0;
      for (const auto& [t, i] : bundle) s += instance_score(*ev_, p, t, i, n, alpha_);
      if (s < best) {
        best = s;
        chosen = n;
      }
    }
  }
  Move m;
  m.kind = MoveKind::bulk_vnf_reassign;
  m.source_node = src;
  m.target_node = chosen;
  return m;
}

std::optional<Move> MoveGenerator::make_request_move(const Placement& p, Rng& rng) const {
  if (p.request_count() == 0) return std::nullopt;
  const int r = static_cast<int>(rng.index(static_cast<std::size_t>(p.request_count())));
  if (p.slot_count(r) == 0) return std::nullopt;
  const int slot = static_cast<int>(rng.index(static_cast<std::size_t>(p.slot_count(r))));
  return request_move_for(p, r, slot, rng);
}

std::optional<Move> MoveGenerator::request_move_for(const Placement& p, int r, int slot,
                                                    Rng& rng) const {
  const int cur = p.assigned_instance(r, slot);
  if (cur < 0) return std::nullopt;
  const SlotInfo& si = ev_->request_info(r).slots[static_cast<std::size_t>(slot)];
  const int t = si.type_idx;
  const double demand = si.demand;

  std::vector<std::pair<int, int>> options;  // (instance, its node)
  for (int i = 0; i < p.instance_count(t); ++i) {
    if (i == cur) continue;
    const int node = p.deployed_node(t, i);
    if (node >= 0 && instance_fits(*ev_, p, t, i, demand)) options.push_back({i, node});
  }
  if (options.empty()) return std::nullopt;

  auto [inst, node] = options.front();
  if (policy_ == TargetPolicy::uniform) {
    std::tie(inst, node) = options[rng.index(options.size())];
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [i, n] : options) {
      const double s = local_score(*ev_, p, r, slot, n, alpha_);
      if (s < best) {
        best = s;
        inst = i;
        node = n;
      }
    }
  }
  Move m;
  m.kind = MoveKind::request_reassign;
  m.request = r;
  m.slot = slot;
  m.type_idx = t;
  m.source_instance = cur;
  m.target_instance = inst;
  return m;
}

std::optional<Move> MoveGenerator::make_bulk_request_move(const Placement& p, Rng& rng) const {
  std::vector<std::pair<int, int>> subjects;
  for (int t = 0; t < p.type_count(); ++t) {
    for (int i = 0; i < p.instance_count(t); ++i) {
      if (p.deployed_node(t, i) >= 0 && assignment_count(p, *ev_, t, i) > 0) {
        subjects.push_back({t, i});
      }
    }
  }
  if (subjects.empty()) return std::nullopt;
  const auto [t, i] = subjects[rng.index(subjects.size())];
  return bulk_request_move_for(p, t, i, rng);
}

std::optional<Move> MoveGenerator::bulk_request_move_for(const Placement& p, int t, int i,
                                                         Rng& rng) const {
  std::vector<std::pair<int, int>> moving;  // (request, slot)
  double total_demand = 0.0;
  for (int r = 0; r < p.request_count(); ++r) {
    const RequestInfo& info = ev_->request_info(r);
    for (std::size_t s = 0; s < info.slots.size(); ++s) {
      if (info.slots[s].type_idx == t && p.assigned_instance(r, static_cast<int>(s)) == i) {
        moving.push_back({r, static_cast<int>(s)});
        total_demand += info.slots[s].demand;
      }
    }
  }
  if (moving.empty()) return std::nullopt;

  std::vector<int> targets;
  for (int j = 0; j < p.instance_count(t); ++j) {
    if (j != i && p.deployed_node(t, j) >= 0 && instance_fits(*ev_, p, t, j, total_demand)) {
      targets.push_back(j);
    }
  }
  if (targets.empty()) return std::nullopt;

  int chosen;
  if (policy_ == TargetPolicy::uniform) {
    chosen = targets[rng.index(targets.size())];
  } else {
    chosen = targets.front();
    double best = std::numeric_limits<double>::infinity();
    for (int j : targets) {
      const int node = p.deployed_node(t, j);
      double s = 0.0;
      for (const auto& [r, slot] : moving) s += local_score(*ev_, p, r, slot, node, alpha_);
      if (s < best) {
        best = s;
        chosen = j;
      }
    }
  }
  Move m;
  m.kind = MoveKind::bulk_request_reassign;
  m.type_idx = t;
  m.source_instance = i;
  m.target_instance = chosen;
  return m;
}

std::optional<Move> MoveGenerator::propose_one(const Placement& p, Rng& rng) const {
  switch (rng.uniform_int(0, 3)) {
    case 0: return make_vnf_move(p, rng);
    case 1: return make_bulk_vnf_move(p, rng);
    case 2: return make_request_move(p, rng);
    default: return make_bulk_request_move(p, rng);
  }
}

std::vector<Move> MoveGenerator::propose(const Placement& p, Rng& rng, int count) const {
  std::vector<Move> out;
  const int attempts = std::max(8 * count, 32);
  for (int a = 0; a < attempts && static_cast<int>(out.size()) < count; ++a) {
    if (auto m = propose_one(p, rng)) out.push_back(*m);
  }
  if (out.empty()) {
    // A saturated placement rejects most random draws; sweep every subject so
    // the rare constructible move is still found.
    auto add = [&](std::optional<Move> m) {
      if (m && static_cast<int>(out.size()) < count) out.push_back(*m);
      return static_cast<int>(out.size()) >= count;
    };
    const int N = static_cast<int>(ev_->network().nodes.size());
    for (int t = 0; t < p.type_count() && static_cast<int>(out.size()) < count; ++t) {
      for (int i = 0; i < p.instance_count(t); ++i) {
        if (p.deployed_node(t, i) >= 0 &&
            (add(vnf_move_for(p, t, i, rng)) || add(bulk_request_move_for(p, t, i, rng)))) {
          break;
        }
      }
    }
    for (int n = 0; n < N && static_cast<int>(out.size()) < count; ++n) {
      if (ev_->node_load(p, n) > 0.0) add(bulk_vnf_move_for(p, n, rng));
    }
    for (int r = 0; r < p.request_count() && static_cast<int>(out.size()) < count; ++r) {
      for (int s = 0; s < p.slot_count(r); ++s) {
        if (add(request_move_for(p, r, s, rng))) break;
      }
    }
  }
  if (out.empty()) throw NoMoveAvailable("no move can be constructed for this placement");
  return out;
}

Placement initial_placement(const Evaluator& ev, std::uint64_t seed) {
  Rng rng(seed);
  Placement p = ev.empty_placement();
  const int N = static_cast<int>(ev.network().nodes.size());

  std::vector<bool> required(static_cast<std::size_t>(ev.type_count()), false);
  for (int r = 0; r < ev.request_count(); ++r) {
    for (const SlotInfo& si : ev.request_info(r).slots) {
      required[static_cast<std::size_t>(si.type_idx)] = true;
    }
  }
  for (int t = 0; t < ev.type_count(); ++t) {
    if (!required[static_cast<std::size_t>(t)]) continue;
    const double req = ev.type(t).resource_req;
    std::vector<int> fits;
    for (int n = 0; n < N; ++n) {
      if (node_fits(ev, p, n, req)) fits.push_back(n);
    }
    int node;
    if (!fits.empty()) {
      node = fits[rng.index(fits.size())];
    } else {
      node = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int n = 0; n < N; ++n) {
        const double load = ev.node_load(p, n);
        if (load < best) {
          best = load;
          node = n;
        }
      }
    }
    p.set_deployed(t, 0, node);
  }
  for (int r = 0; r < ev.request_count(); ++r) {
    for (int s = 0; s < p.slot_count(r); ++s) p.assign(r, s, 0);
  }
  return p;
}

SolveResult tabu_search(const Evaluator& ev, double alpha, const TabuParams& params,
                        TargetPolicy policy) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  Placement cur = initial_placement(ev, params.seed);
  EvalOptions opt;
  opt.alpha = alpha;
  opt.obj_scale = ev.evaluate(cur, {alpha, 0.0, 1.0, 1.0}).objective;
  const EvalOptions scored{alpha, opt.obj_scale, 1.0, 1.0};

  SolveResult res;
  res.obj_scale = opt.obj_scale;
  res.best = cur;
  double cur_fitness = ev.evaluate(cur, scored).fitness;
  res.best_fitness = cur_fitness;

  MoveGenerator gen(ev, alpha, policy);
  TabuList tabu(params.tenure);
  Rng rng(params.seed ^ 0x5bf0a8b1ULL);

  int stale = 0;
  for (long iter = 1; iter <= params.max_iterations && stale <= params.stop_after; ++iter) {
    std::vector<Move> candidates;
    try {
      candidates = gen.propose(cur, rng, params.neighborhood);
    } catch (const NoMoveAvailable&) {
      ++stale;
      res.trace.push_back({iter, cur_fitness, res.best_fitness, MoveKind::vnf_reassign, false,
                           elapsed_ms()});
      continue;
    }

    int chosen = -1;
    double chosen_fitness = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      MoveUndo undo = apply_move(cur, candidates[c], ev);
      const double f = ev.evaluate(cur, scored).fitness;
      revert_move(cur, undo);
      if (!move_admissible(tabu, probe_key(candidates[c]), iter, f, res.best_fitness)) continue;
      if (f < chosen_fitness) {
        chosen_fitness = f;
        chosen = static_cast<int>(c);
      }
    }

    bool improved = false;
    bool moved = false;
    MoveKind kind = MoveKind::vnf_reassign;
    if (chosen >= 0) {
      const Move& m = candidates[static_cast<std::size_t>(chosen)];
      apply_move(cur, m, ev);
      cur_fitness = chosen_fitness;
      tabu.remember(reverse_key(m), iter);
      moved = true;
      kind = m.kind;
      if (cur_fitness < res.best_fitness) {
        res.best_fitness = cur_fitness;
        res.best = cur;
        improved = true;
      }
    }
    stale = improved ? 0 : stale + 1;
    res.trace.push_back({iter, cur_fitness, res.best_fitness, kind, moved, elapsed_ms()});
  }
  res.wall_ms = elapsed_ms();
  return res;
}

SolveResult greedy_place(const Evaluator& ev, double alpha, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Placement p = ev.empty_placement();
  const int N = static_cast<int>(ev.network().nodes.size());

  for (int r = 0; r < ev.request_count(); ++r) {
    const RequestInfo& info = ev.request_info(r);
    for (int s = 0; s < static_cast<int>(info.slots.size()); ++s) {
      const SlotInfo& si = info.slots[static_cast<std::size_t>(s)];
      const int t = si.type_idx;

      int reuse = -1;
      for (int i = 0; i < p.instance_count(t); ++i) {
        if (p.deployed_node(t, i) >= 0 && instance_fits(ev, p, t, i, si.demand)) {
          reuse = i;
          break;
        }
      }
      if (reuse >= 0) {
        p.assign(r, s, reuse);
        continue;
      }

      int fresh = -1;
      for (int i = 0; i < p.instance_count(t); ++i) {
        if (p.deployed_node(t, i) < 0) {
          fresh = i;
          break;
        }
      }
      if (fresh >= 0) {
        // Time-driven node choice: processing plus communication with the
        // predecessors placed so far.
        int node = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int n = 0; n < N; ++n) {
          if (!node_fits(ev, p, n, ev.type(t).resource_req)) continue;
          const double score = local_score(ev, p, r, s, n, 1.0);
          if (score < best) {
            best = score;
            node = n;
          }
        }
        if (node < 0) {
          double least = std::numeric_limits<double>::infinity();
          for (int n = 0; n < N; ++n) {
            const double load = ev.node_load(p, n);
            if (load < least) {
              least = load;
              node = n;
            }
          }
        }
        p.set_deployed(t, fresh, node);
        p.assign(r, s, fresh);
        continue;
      }

      // Every slot deployed and full: overload the least-loaded instance.
      int victim = 0;
      double least = std::numeric_limits<double>::infinity();
      for (int i = 0; i < p.instance_count(t); ++i) {
        if (p.deployed_node(t, i) < 0) continue;
        const double load = ev.instance_load(p, t, i);
        if (load < least) {
          least = load;
          victim = i;
        }
      }
      p.assign(r, s, victim);
    }
  }

  SolveResult res;
  res.best = p;
  res.obj_scale = ev.evaluate(initial_placement(ev, seed), {alpha, 0.0, 1.0, 1.0}).objective;
  res.best_fitness = ev.evaluate(p, {alpha, res.obj_scale, 1.0, 1.0}).fitness;
  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SolveResult psf_place(const NetworkModel& net, const Workload& wl, double alpha,
                      const TabuParams& params) {
  NetworkModel frozen = net;
  for (NodeSpec& n : frozen.nodes) {
    n.mobility = MobilityProfile{1.0, n.mobility.velocity, n.mobility.expected_pause,
                                 InitDist::point, n.pos};
  }
  const ExpectedLinkCache cache = build_cache(frozen);
  const Evaluator ev(frozen, wl, cache);
  return tabu_search(ev, alpha, params);
}

namespace {

void node_multisets(int nodes, int max_len, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  // Non-decreasing node sequences of length 1..max_len.
  auto rec = [&](auto&& self, int first) -> void {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_len) return;
    for (int n = first; n < nodes; ++n) {
      cur.push_back(n);
      self(self, n);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

SolveResult exhaustive_optimal(const Evaluator& ev, double alpha, std::uint64_t seed,
                               const ExhaustiveLimits& limits) {
  const auto start = std::chrono::steady_clock::now();
  const int N = static_cast<int>(ev.network().nodes.size());
  const int T = ev.type_count();
  if (N > limits.max_nodes) throw TooLarge("too many nodes for exhaustive search");
  if (T > limits.max_types) throw TooLarge("too many types for exhaustive search");
  if (ev.request_count() > limits.max_requests) throw TooLarge("too many requests for exhaustive search");
  for (int t = 0; t < T; ++t) {
    if (ev.type(t).instances > limits.max_instances) {
      throw TooLarge("too many instance slots for exhaustive search");
    }
  }

  std::vector<bool> required(static_cast<std::size_t>(T), false);
  for (int r = 0; r < ev.request_count(); ++r) {
    for (const SlotInfo& si : ev.request_info(r).slots) {
      required[static_cast<std::size_t>(si.type_idx)] = true;
    }
  }

  // Per-type deployment options: instances are interchangeable, so node
  // multisets cover every distinct deployment once. Types nobody requests may
  // also stay undeployed.
  std::vector<std::vector<std::vector<int>>> options(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    if (!required[static_cast<std::size_t>(t)]) options[static_cast<std::size_t>(t)].push_back({});
    node_multisets(N, ev.type(t).instances, options[static_cast<std::size_t>(t)]);
  }

  SolveResult res;
  res.obj_scale = ev.evaluate(initial_placement(ev, seed), {alpha, 0.0, 1.0, 1.0}).objective;
  const EvalOptions scored{alpha, res.obj_scale, 1.0, 1.0};
  res.best_fitness = std::numeric_limits<double>::infinity();

  Placement p = ev.empty_placement();
  std::vector<std::pair<int, int>> slots;  // (request, slot) in assignment order
  for (int r = 0; r < ev.request_count(); ++r) {
    for (int s = 0; s < p.slot_count(r); ++s) slots.push_back({r, s});
  }
  std::vector<int> deployed_count(static_cast<std::size_t>(T), 0);

  auto assign_rec = [&](auto&& self, std::size_t si) -> void {
    if (si == slots.size()) {
      ++res.evaluated;
      const double f = ev.evaluate(p, scored).fitness;
      if (f < res.best_fitness) {
        res.best_fitness = f;
        res.best = p;
      }
      return;
    }
    const auto [r, s] = slots[si];
    const int t = ev.request_info(r).slots[static_cast<std::size_t>(s)].type_idx;
    for (int i = 0; i < deployed_count[static_cast<std::size_t>(t)]; ++i) {
      p.assign(r, s, i);
      self(self, si + 1);
    }
    p.assign(r, s, -1);
  };

  auto deploy_rec = [&](auto&& self, int t) -> void {
    if (t == T) {
      assign_rec(assign_rec, 0);
      return;
    }
    for (const std::vector<int>& opt : options[static_cast<std::size_t>(t)]) {
      for (std::size_t i = 0; i < opt.size(); ++i) {
        p.set_deployed(t, static_cast<int>(i), opt[i]);
      }
      deployed_count[static_cast<std::size_t>(t)] = static_cast<int>(opt.size());
      self(self, t + 1);
      for (std::size_t i = 0; i < opt.size(); ++i) p.set_deployed(t, static_cast<int>(i), -1);
    }
    deployed_count[static_cast<std::size_t>(t)] = 0;
  };
  deploy_rec(deploy_rec, 0);

  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace fogplace
