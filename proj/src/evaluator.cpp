#include "fogplace/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fogplace {

SubtreeMetrics aggregate(NodeKind kind, const std::vector<SubtreeMetrics>& children,
                         const std::vector<double>& probs, double q) {
  if (children.empty()) throw DomainError("aggregate needs at least one child");
  SubtreeMetrics m;
  switch (kind) {
    case NodeKind::vnf:
      throw DomainError("aggregate is defined for composition nodes only");
    case NodeKind::seq:
      for (const SubtreeMetrics& c : children) {
        m.proc += c.proc;
        m.comm += c.comm;
        m.cost += c.cost;
      }
      return m;
    case NodeKind::par:
      for (const SubtreeMetrics& c : children) {
        m.proc = std::max(m.proc, c.proc);
        m.comm = std::max(m.comm, c.comm);
        m.cost += c.cost;
      }
      return m;
    case NodeKind::sel: {
      if (probs.size() != children.size()) throw DomainError("sel needs one probability per child");
      for (std::size_t i = 0; i < children.size(); ++i) {
        m.proc += probs[i] * children[i].proc;
        m.comm += probs[i] * children[i].comm;
        m.cost += probs[i] * children[i].cost;
      }
      return m;
    }
    case NodeKind::loop: {
      const double it = expected_loop_iterations(q);
      for (const SubtreeMetrics& c : children) {
        m.proc += c.proc;
        m.comm += c.comm;
        m.cost += c.cost;
      }
      m.proc *= it;
      m.comm *= it;
      m.cost *= it;
      return m;
    }
  }
  return m;
}

Placement Placement::empty(const Workload& wl) {
  Placement p;
  p.deployed_.resize(wl.types.size());
  for (std::size_t t = 0; t < wl.types.size(); ++t) {
    p.deployed_[t].assign(static_cast<std::size_t>(wl.types[t].instances), -1);
  }
  p.assigned_.resize(wl.requests.size());
  for (std::size_t r = 0; r < wl.requests.size(); ++r) {
    p.assigned_[r].assign(wl.requests[r].required_types.size(), -1);
  }
  return p;
}

int RequestInfo::slot_of(int type_id) const {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s].type_id == type_id) return static_cast<int>(s);
  }
  return -1;
}

Evaluator::Evaluator(const NetworkModel& net, const Workload& wl, const ExpectedLinkCache& cache)
    : net_(&net), wl_(&wl), cache_(&cache), types_(wl.types) {
  std::map<int, int> idx;
  for (std::size_t t = 0; t < types_.size(); ++t) {
    type_ids_.push_back(types_[t].id);
    idx[types_[t].id] = static_cast<int>(t);
  }
  for (const Request& r : wl.requests) {
    RequestInfo info;
    auto preds = predecessor_map(r.tree);
    auto weights = leaf_weights(r.tree);
    std::map<int, int> slot_of_type;
    for (std::size_t s = 0; s < r.required_types.size(); ++s) {
      slot_of_type[r.required_types[s]] = static_cast<int>(s);
    }
    for (int type_id : r.required_types) {
      SlotInfo si;
      si.type_id = type_id;
      auto it = idx.find(type_id);
      if (it == idx.end()) throw UnknownVnf("request uses a type the workload does not declare");
      si.type_idx = it->second;
      si.traffic = r.traffic.at(type_id);
      si.weight = weights.at(type_id);
      for (int p : preds.at(type_id)) si.preds.push_back(slot_of_type.at(p));
      info.slots.push_back(std::move(si));
    }
    for (const IotLink& l : r.iot) {
      info.slots[static_cast<std::size_t>(slot_of_type.at(l.type))].iot.push_back({l.user, l.bytes});
    }
    for (SlotInfo& si : info.slots) {
      double iot_bytes = 0.0;
      for (const auto& [u, bytes] : si.iot) {
        (void)u;
        iot_bytes += bytes;
      }
      si.demand = si.weight * (si.traffic + iot_bytes);
    }
    requests_.push_back(std::move(info));
  }
}

int Evaluator::type_index(int type_id) const {
  for (std::size_t t = 0; t < type_ids_.size(); ++t) {
    if (type_ids_[t] == type_id) return static_cast<int>(t);
  }
  throw UnknownVnf("unknown type id " + std::to_string(type_id));
}

int Evaluator::node_of(const Placement& p, int r, int slot) const {
  const SlotInfo& si = requests_[static_cast<std::size_t>(r)].slots[static_cast<std::size_t>(slot)];
  const int inst = p.assigned_instance(r, slot);
  if (inst < 0) {
    throw UnassignedVnf("request " + std::to_string(r) + " has no instance for type " +
                        std::to_string(si.type_id));
  }
  const int node = p.deployed_node(si.type_idx, inst);
  if (node < 0) {
    throw UnassignedVnf("request " + std::to_string(r) + " assigned to an undeployed instance of type " +
                        std::to_string(si.type_id));
  }
  return node;
}

double Evaluator::processing_time_at(int r, int slot, int node) const {
  const SlotInfo& si = requests_[static_cast<std::size_t>(r)].slots[static_cast<std::size_t>(slot)];
  return si.traffic * net_->nodes[static_cast<std::size_t>(node)].proc_delay;
}

double Evaluator::communication_time_at(const Placement& p, int r, int slot, int node) const {
  const SlotInfo& si = requests_[static_cast<std::size_t>(r)].slots[static_cast<std::size_t>(slot)];
  double from_preds = 0.0;
  for (int q : si.preds) {
    const LinkExpectation& e = cache_->pair(node, node_of(p, r, q));
    from_preds += si.traffic * e.inv_bw + e.latency_s;
  }
  double from_users = 0.0;
  for (const auto& [u, bytes] : si.iot) {
    const LinkExpectation& e = cache_->user(node, u);
    from_users += bytes * e.inv_bw + e.latency_s;
  }
  return std::max(from_preds, from_users);
}

double Evaluator::communication_cost_at(const Placement& p, int r, int slot, int node) const {
  const SlotInfo& si = requests_[static_cast<std::size_t>(r)].slots[static_cast<std::size_t>(slot)];
  double cost = 0.0;
  for (int q : si.preds) {
    cost += si.traffic * cache_->pair(node, node_of(p, r, q)).cost_per_byte;
  }
  for (const auto& [u, bytes] : si.iot) {
    cost += bytes * cache_->user(node, u).cost_per_byte;
  }
  return cost;
}

namespace {
int require_slot(const RequestInfo& info, int type_id) {
  const int slot = info.slot_of(type_id);
  if (slot < 0) throw UnknownVnf("type " + std::to_string(type_id) + " is not part of this request");
  return slot;
}
}  // namespace

double Evaluator::vnf_processing_time(const Placement& p, int r, int type_id) const {
  const int slot = require_slot(requests_[static_cast<std::size_t>(r)], type_id);
  return processing_time_at(r, slot, node_of(p, r, slot));
}

double Evaluator::vnf_communication_time(const Placement& p, int r, int type_id) const {
  const int slot = require_slot(requests_[static_cast<std::size_t>(r)], type_id);
  return communication_time_at(p, r, slot, node_of(p, r, slot));
}

double Evaluator::vnf_communication_cost(const Placement& p, int r, int type_id) const {
  const int slot = require_slot(requests_[static_cast<std::size_t>(r)], type_id);
  return communication_cost_at(p, r, slot, node_of(p, r, slot));
}

SubtreeMetrics Evaluator::walk(const Placement& p, int r, const GraphNode& node) const {
  if (node.is_leaf()) {
    const RequestInfo& info = requests_[static_cast<std::size_t>(r)];
    const int slot = info.slot_of(node.type);
    const int on = node_of(p, r, slot);
    SubtreeMetrics m;
    m.proc = processing_time_at(r, slot, on);
    m.comm = communication_time_at(p, r, slot, on);
    m.cost = communication_cost_at(p, r, slot, on);
    return m;
  }
  std::vector<SubtreeMetrics> children;
  children.reserve(node.children.size());
  for (const GraphNode& c : node.children) children.push_back(walk(p, r, c));
  return aggregate(node.kind, children, node.probs, node.q);
}

double Evaluator::request_makespan(const Placement& p, int r) const {
  const SubtreeMetrics m = walk(p, r, wl_->requests[static_cast<std::size_t>(r)].tree);
  return m.proc + m.comm;
}

double Evaluator::request_cost(const Placement& p, int r) const {
  return walk(p, r, wl_->requests[static_cast<std::size_t>(r)].tree).cost;
}

std::pair<double, double> Evaluator::deployment_cost(const Placement& p) const {
  double license = 0.0, hosting = 0.0;
  for (int t = 0; t < p.type_count(); ++t) {
    const VnfType& vt = types_[static_cast<std::size_t>(t)];
    for (int i = 0; i < p.instance_count(t); ++i) {
      const int n = p.deployed_node(t, i);
      if (n < 0) continue;
      license += vt.license_cost;
      hosting += net_->nodes[static_cast<std::size_t>(n)].unit_cost * vt.resource_req;
    }
  }
  return {license, hosting};
}

double Evaluator::node_load(const Placement& p, int node) const {
  double load = 0.0;
  for (int t = 0; t < p.type_count(); ++t) {
    for (int i = 0; i < p.instance_count(t); ++i) {
      if (p.deployed_node(t, i) == node) load += types_[static_cast<std::size_t>(t)].resource_req;
    }
  }
  return load;
}

double Evaluator::instance_load(const Placement& p, int t_idx, int inst) const {
  double load = 0.0;
  for (int r = 0; r < p.request_count(); ++r) {
    const RequestInfo& info = requests_[static_cast<std::size_t>(r)];
    for (std::size_t s = 0; s < info.slots.size(); ++s) {
      if (info.slots[s].type_idx == t_idx && p.assigned_instance(r, static_cast<int>(s)) == inst) {
        load += info.slots[s].demand;
      }
    }
  }
  return load;
}

std::vector<Violation> Evaluator::check_constraints(const Placement& p) const {
  std::vector<Violation> out;
  const int N = static_cast<int>(net_->nodes.size());

  // Node capacity.
  for (int n = 0; n < N; ++n) {
    const NodeSpec& ns = net_->nodes[static_cast<std::size_t>(n)];
    const double lhs = node_load(p, n);
    const double rhs = ns.usage_threshold * ns.capacity;
    if (lhs > rhs + 1e-12) out.push_back({"node_capacity", n, -1, lhs, rhs});
  }

  // Link budgets: expected per-second traffic in bits on each node pair and
  // each node-user link, weighted by execution frequency.
  std::map<std::pair<int, int>, double> pair_bits;
  std::map<std::pair<int, int>, double> user_bits;
  // Instance loads and structural checks share the assignment sweep.
  std::map<std::pair<int, int>, double> inst_load;

  for (int r = 0; r < p.request_count(); ++r) {
    const RequestInfo& info = requests_[static_cast<std::size_t>(r)];
    for (std::size_t s = 0; s < info.slots.size(); ++s) {
      const SlotInfo& si = info.slots[s];
      const int inst = p.assigned_instance(r, static_cast<int>(s));
      if (inst < 0) continue;
      const int n = p.deployed_node(si.type_idx, inst);
      if (n < 0) {
        out.push_back({"assignment_deployed", r, si.type_id, 1.0, 0.0});
        continue;
      }
      inst_load[{si.type_idx, inst}] += si.demand;
      for (int q : si.preds) {
        const int qinst = p.assigned_instance(r, q);
        if (qinst < 0) continue;
        const int m = p.deployed_node(info.slots[static_cast<std::size_t>(q)].type_idx, qinst);
        if (m < 0 || m == n) continue;
        pair_bits[{n, m}] += si.weight * si.traffic * kBitsPerByte;
      }
      for (const auto& [u, bytes] : si.iot) {
        user_bits[{n, u}] += si.weight * bytes * kBitsPerByte;
      }
    }
  }

  for (const auto& [key, lhs] : pair_bits) {
    const LinkExpectation& e = cache_->pair(key.first, key.second);
    const double rhs = e.bw_threshold * e.bandwidth_bps;
    if (lhs > rhs + 1e-12) out.push_back({"link_bandwidth", key.first, key.second, lhs, rhs});
  }
  for (const auto& [key, lhs] : user_bits) {
    const LinkExpectation& e = cache_->user(key.first, key.second);
    const double rhs = e.bw_threshold * e.bandwidth_bps;
    if (lhs > rhs + 1e-12) out.push_back({"user_link_bandwidth", key.first, key.second, lhs, rhs});
  }
  for (const auto& [key, lhs] : inst_load) {
    const VnfType& vt = types_[static_cast<std::size_t>(key.first)];
    const double rhs = vt.util_threshold * vt.capacity_bytes;
    if (lhs > rhs + 1e-12) out.push_back({"instance_capacity", key.first, key.second, lhs, rhs});
  }

  // Every required type needs at least one deployed instance.
  for (int t = 0; t < static_cast<int>(types_.size()); ++t) {
    bool required = false;
    for (const RequestInfo& info : requests_) {
      for (const SlotInfo& si : info.slots) {
        if (si.type_idx == t) {
          required = true;
          break;
        }
      }
      if (required) break;
    }
    if (!required) continue;
    bool deployed = false;
    for (int i = 0; i < p.instance_count(t); ++i) {
      if (p.deployed_node(t, i) >= 0) {
        deployed = true;
        break;
      }
    }
    if (!deployed) out.push_back({"type_deployed", t, -1, 1.0, 0.0});
  }
  return out;
}

double Evaluator::objective_value(const Placement& p, const EvalOptions& opt) const {
  if (!(opt.alpha >= 0.0 && opt.alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  double makespan_sum = 0.0, cost_sum = 0.0;
  for (int r = 0; r < p.request_count(); ++r) {
    makespan_sum += request_makespan(p, r);
    cost_sum += request_cost(p, r);
  }
  const auto [license, hosting] = deployment_cost(p);
  return opt.alpha * makespan_sum / opt.makespan_norm +
         (1.0 - opt.alpha) * (cost_sum + license + hosting) / opt.cost_norm;
}

EvaluationReport Evaluator::evaluate(const Placement& p, const EvalOptions& opt) const {
  if (!(opt.alpha >= 0.0 && opt.alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  EvaluationReport rep;
  for (int r = 0; r < p.request_count(); ++r) {
    const SubtreeMetrics m = walk(p, r, wl_->requests[static_cast<std::size_t>(r)].tree);
    rep.makespan.push_back(m.proc + m.comm);
    rep.comm_cost.push_back(m.cost);
    rep.makespan_sum += m.proc + m.comm;
    rep.comm_cost_sum += m.cost;
  }
  const auto [license, hosting] = deployment_cost(p);
  rep.license_cost = license;
  rep.hosting_cost = hosting;
  rep.objective = opt.alpha * rep.makespan_sum / opt.makespan_norm +
                  (1.0 - opt.alpha) * (rep.comm_cost_sum + license + hosting) / opt.cost_norm;
  rep.violations = check_constraints(p);
  const double scale = opt.obj_scale > 0.0 ? opt.obj_scale : rep.objective;
  for (const Violation& v : rep.violations) {
    rep.penalty += scale / std::max(v.rhs, 1e-9) * std::max(0.0, v.excess());
  }
  rep.fitness = rep.objective + rep.penalty;
  return rep;
}

std::pair<double, double> tier_usage(const Evaluator& ev, const Placement& p) {
  double fog = 0.0, cloud = 0.0;
  for (int t = 0; t < p.type_count(); ++t) {
    const double req = ev.type(t).resource_req;
    for (int i = 0; i < p.instance_count(t); ++i) {
      const int n = p.deployed_node(t, i);
      if (n < 0) continue;
      (ev.network().nodes[static_cast<std::size_t>(n)].tier == Tier::fog ? fog : cloud) += req;
    }
  }
  const double total = fog + cloud;
  if (total <= 0.0) return {0.0, 0.0};
  return {100.0 * fog / total, 100.0 * cloud / total};
}

}  // namespace fogplace
