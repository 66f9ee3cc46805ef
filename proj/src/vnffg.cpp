#include "fogplace/vnffg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fogplace/random.hpp"

namespace fogplace {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::vnf: return "vnf";
    case NodeKind::seq: return "seq";
    case NodeKind::par: return "par";
    case NodeKind::sel: return "sel";
    case NodeKind::loop: return "loop";
  }
  return "?";
}

GraphNode vnf(int type) {
  GraphNode n;
  n.kind = NodeKind::vnf;
  n.type = type;
  return n;
}

static GraphNode inner(NodeKind kind, std::vector<GraphNode> children) {
  GraphNode n;
  n.kind = kind;
  n.children = std::move(children);
  return n;
}

GraphNode seq(std::vector<GraphNode> children) { return inner(NodeKind::seq, std::move(children)); }
GraphNode par(std::vector<GraphNode> children) { return inner(NodeKind::par, std::move(children)); }

GraphNode sel(std::vector<GraphNode> children, std::vector<double> probs) {
  GraphNode n = inner(NodeKind::sel, std::move(children));
  n.probs = std::move(probs);
  return n;
}

GraphNode loop(std::vector<GraphNode> children, double q) {
  GraphNode n = inner(NodeKind::loop, std::move(children));
  n.q = q;
  return n;
}

double expected_loop_iterations(double q) {
  if (!(q >= 0.0) || q >= 1.0) {
    throw DomainError("loop continuation probability must lie in [0,1)");
  }
  return q / (1.0 - q);
}

namespace {

void validate_node(const GraphNode& n, std::vector<int>& leaves) {
  if (n.is_leaf()) {
    if (n.type < 0) throw MalformedTree("leaf with negative type id");
    if (!n.children.empty()) throw MalformedTree("leaf with children");
    leaves.push_back(n.type);
    return;
  }
  if (n.children.size() < 2) {
    throw MalformedTree(std::string(to_string(n.kind)) + " node needs at least 2 children");
  }
  if (n.kind == NodeKind::sel) {
    if (n.probs.size() != n.children.size()) {
      throw MalformedTree("sel probability count does not match children");
    }
    double sum = 0.0;
    for (double p : n.probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw MalformedTree("sel probability outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw MalformedTree("sel probabilities must sum to 1");
  } else if (!n.probs.empty()) {
    throw MalformedTree("branch probabilities on a non-sel node");
  }
  if (n.kind == NodeKind::loop) {
    if (!(n.q >= 0.0) || n.q >= 1.0) throw MalformedTree("loop q must lie in [0,1)");
  } else if (n.q != 0.0) {
    throw MalformedTree("loop probability on a non-loop node");
  }
  for (const GraphNode& c : n.children) validate_node(c, leaves);
}

// Threads the running exit set through the tree, recording it as each leaf's
// predecessor set on entry.
std::set<int> walk_predecessors(const GraphNode& n, std::set<int> incoming,
                                std::map<int, std::set<int>>& out) {
  switch (n.kind) {
    case NodeKind::vnf:
      out[n.type] = std::move(incoming);
      return {n.type};
    case NodeKind::seq:
    case NodeKind::loop: {
      // A loop body is a chain like seq; iteration does not add a back edge,
      // so the graph stays acyclic.
      std::set<int> cur = std::move(incoming);
      for (const GraphNode& c : n.children) cur = walk_predecessors(c, std::move(cur), out);
      return cur;
    }
    case NodeKind::par:
    case NodeKind::sel: {
      std::set<int> exits;
      for (const GraphNode& c : n.children) {
        std::set<int> e = walk_predecessors(c, incoming, out);
        exits.insert(e.begin(), e.end());
      }
      return exits;
    }
  }
  return {};
}

void walk_weights(const GraphNode& n, double w, std::map<int, double>& out) {
  switch (n.kind) {
    case NodeKind::vnf:
      out[n.type] = w;
      return;
    case NodeKind::seq:
    case NodeKind::par:
      for (const GraphNode& c : n.children) walk_weights(c, w, out);
      return;
    case NodeKind::sel:
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        walk_weights(n.children[i], w * n.probs[i], out);
      }
      return;
    case NodeKind::loop: {
      double it = expected_loop_iterations(n.q);
      for (const GraphNode& c : n.children) walk_weights(c, w * it, out);
      return;
    }
  }
}

}  // namespace

Request build_request(int id, GraphNode tree, std::map<int, double> traffic,
                      std::vector<IotUser> users, std::vector<IotLink> iot) {
  Request r;
  r.id = id;
  r.tree = std::move(tree);
  r.traffic = std::move(traffic);
  r.users = std::move(users);
  r.iot = std::move(iot);

  std::vector<int> leaves;
  validate_node(r.tree, leaves);
  std::set<int> seen(leaves.begin(), leaves.end());
  if (seen.size() != leaves.size()) throw MalformedTree("duplicate leaf type in request");
  r.required_types = std::move(leaves);

  for (int t : r.required_types) {
    auto it = r.traffic.find(t);
    if (it == r.traffic.end()) throw MalformedTree("leaf type without traffic entry");
    if (!(it->second >= 0.0)) throw MalformedTree("negative traffic volume");
  }
  for (const auto& [t, bytes] : r.traffic) {
    (void)bytes;
    if (!seen.count(t)) throw MalformedTree("traffic entry for a type not in the tree");
  }
  std::set<int> user_ids;
  for (const IotUser& u : r.users) {
    if (!user_ids.insert(u.id).second) throw MalformedTree("duplicate user id in request");
    if (!in_unit_square(u.pos)) throw MalformedTree("user location outside the unit square");
  }
  for (const IotLink& l : r.iot) {
    if (!user_ids.count(l.user)) throw MalformedTree("iot link references unknown user");
    if (!seen.count(l.type)) throw MalformedTree("iot link references unknown type");
    if (!(l.bytes >= 0.0)) throw MalformedTree("negative iot traffic");
  }
  return r;
}

std::map<int, std::set<int>> predecessor_map(const GraphNode& root) {
  std::map<int, std::set<int>> out;
  walk_predecessors(root, {}, out);
  return out;
}

std::set<int> immediate_predecessors(const Request& r, int type) {
  auto map = predecessor_map(r.tree);
  auto it = map.find(type);
  if (it == map.end()) throw UnknownVnf("type is not a leaf of this request");
  return it->second;
}

std::map<int, double> leaf_weights(const GraphNode& root) {
  std::map<int, double> out;
  walk_weights(root, 1.0, out);
  return out;
}

int execution_height(const GraphNode& root) {
  switch (root.kind) {
    case NodeKind::vnf:
      return 1;
    case NodeKind::seq:
    case NodeKind::loop: {
      int sum = 0;
      for (const GraphNode& c : root.children) sum += execution_height(c);
      return sum;
    }
    case NodeKind::par:
    case NodeKind::sel: {
      int best = 0;
      for (const GraphNode& c : root.children) best = std::max(best, execution_height(c));
      return best;
    }
  }
  return 0;
}

namespace {

struct LevelPlan {
  int degree{1};  // 1 = plain level, >=2 = fork of that many leaves
  bool is_sel{false};
};

}  // namespace

Workload generate_workload(int count, std::uint64_t seed, const WorkloadParams& params) {
  if (params.num_types < params.vnfs_max) {
    throw DomainError("type pool smaller than the maximum request size");
  }
  Rng rng(seed);
  Workload wl;
  int next_user = 0;
  std::set<int> used_types;

  for (int req_id = 0; req_id < count; ++req_id) {
    int v = rng.uniform_int(params.vnfs_min, params.vnfs_max);
    std::vector<int> feasible;
    for (int h : params.heights) {
      if (h <= v) feasible.push_back(h);
    }
    if (feasible.empty()) {
      throw InfeasibleShape("no allowed height fits a request of " + std::to_string(v) + " VNFs");
    }
    int h = feasible[rng.index(feasible.size())];
    int extra = v - h;

    std::vector<LevelPlan> levels(static_cast<std::size_t>(h));
    if (extra > 0) {
      // Step 1: k fork levels of equal out-degree, k(d-1) = extra.
      std::vector<int> ks;
      for (int k = 1; k <= std::min(h, extra); ++k) {
        if (extra % k == 0) ks.push_back(k);
      }
      int k = ks[rng.index(ks.size())];
      int d = extra / k + 1;
      std::vector<int> fork_levels = rng.sample_indices(h, k);

      // Step 2: widen forks by the edge ratio (a multiplier > 1), visiting
      // them in random order on a fixed leaf budget. Forks the budget cannot
      // widen collapse back to plain levels, which is how the fork count gets
      // re-tuned; the leaf total and the height are preserved exactly.
      double er = rng.pick(params.edge_ratios);
      std::vector<int> order = fork_levels;
      rng.shuffle(order);
      int budget = extra;
      std::map<int, int> degree;
      for (int lvl : order) {
        int want = static_cast<int>(std::floor(static_cast<double>(d) * er));
        int deg = std::min(want, budget + 1);
        if (deg >= 2) {
          degree[lvl] = deg;
          budget -= deg - 1;
        }
      }
      double sel_ratio = rng.pick(params.sel_ratios);
      for (auto& [lvl, deg] : degree) {
        levels[static_cast<std::size_t>(lvl)].degree = deg;
        levels[static_cast<std::size_t>(lvl)].is_sel = rng.bernoulli(sel_ratio);
      }
    }

    std::vector<int> type_ids = rng.sample_indices(params.num_types, v);
    std::size_t next_type = 0;
    auto take_type = [&]() { return type_ids[next_type++]; };

    std::vector<GraphNode> blocks;
    for (const LevelPlan& lvl : levels) {
      if (lvl.degree == 1) {
        blocks.push_back(vnf(take_type()));
      } else {
        std::vector<GraphNode> branch;
        for (int i = 0; i < lvl.degree; ++i) branch.push_back(vnf(take_type()));
        if (lvl.is_sel) {
          std::vector<double> probs(branch.size(), 1.0 / static_cast<double>(branch.size()));
          blocks.push_back(sel(std::move(branch), std::move(probs)));
        } else {
          blocks.push_back(par(std::move(branch)));
        }
      }
    }
    GraphNode tree = blocks.size() == 1 ? std::move(blocks.front()) : seq(std::move(blocks));

    std::map<int, double> traffic;
    for (std::size_t i = 0; i < static_cast<std::size_t>(v); ++i) {
      traffic[type_ids[i]] = rng.uniform(params.traffic_min, params.traffic_max);
    }

    int n_users = rng.uniform_int(params.users_min, params.users_max);
    std::vector<IotUser> users;
    for (int u = 0; u < n_users; ++u) {
      users.push_back({next_user++, Point{rng.uniform(), rng.uniform()}});
    }

    std::vector<IotLink> iot;
    int n_iot = params.iot_vnf_fraction > 0.0
                    ? std::max(1, static_cast<int>(std::lround(params.iot_vnf_fraction * v)))
                    : 0;
    n_iot = std::min(n_iot, v);
    std::vector<int> iot_slots = rng.sample_indices(v, n_iot);
    for (int slot : iot_slots) {
      int t = type_ids[static_cast<std::size_t>(slot)];
      for (const IotUser& u : users) {
        iot.push_back({u.id, t, rng.uniform(params.traffic_min, params.traffic_max)});
      }
    }

    wl.requests.push_back(build_request(req_id, std::move(tree), std::move(traffic),
                                        std::move(users), std::move(iot)));
    used_types.insert(type_ids.begin(), type_ids.begin() + v);
  }

  for (int t : used_types) {
    VnfType vt;
    vt.id = t;
    vt.resource_req = static_cast<double>(
        rng.uniform_int(static_cast<int>(params.resource_req_min),
                        static_cast<int>(params.resource_req_max)));
    vt.capacity_bytes = rng.uniform(params.capacity_gb_min, params.capacity_gb_max) * 1e9;
    vt.license_cost = params.license_cost;
    vt.util_threshold = params.util_threshold;
    vt.instances = params.instances_per_type;
    wl.types.push_back(vt);
  }
  return wl;
}

}  // namespace fogplace
