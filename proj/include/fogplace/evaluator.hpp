#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fogplace/infra.hpp"
#include "fogplace/vnffg.hpp"

namespace fogplace {

// Time/cost triple carried up the tree: expected processing time, expected
// communication time, expected communication cost of a subtree.
struct SubtreeMetrics {
  double proc{0.0};
  double comm{0.0};
  double cost{0.0};
};

// One composition step. seq sums everything; par runs children concurrently
// (max times, summed cost); sel weights children by branch probability; loop
// multiplies a sequence by the expected iteration count q/(1-q).
SubtreeMetrics aggregate(NodeKind kind, const std::vector<SubtreeMetrics>& children,
                         const std::vector<double>& probs = {}, double q = 0.0);

// Deployment state (which instance slots sit on which node) plus assignment
// state (which instance serves each request's VNFs). Types and requests are
// indexed densely in workload order; -1 means undeployed/unassigned.
class Placement {
 public:
  Placement() = default;
  static Placement empty(const Workload& wl);

  int type_count() const { return static_cast<int>(deployed_.size()); }
  int instance_count(int t) const { return static_cast<int>(deployed_[static_cast<std::size_t>(t)].size()); }
  int request_count() const { return static_cast<int>(assigned_.size()); }
  int slot_count(int r) const { return static_cast<int>(assigned_[static_cast<std::size_t>(r)].size()); }

  int deployed_node(int t, int i) const { return deployed_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]; }
  void set_deployed(int t, int i, int node) { deployed_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = node; }

  int assigned_instance(int r, int slot) const { return assigned_[static_cast<std::size_t>(r)][static_cast<std::size_t>(slot)]; }
  void assign(int r, int slot, int inst) { assigned_[static_cast<std::size_t>(r)][static_cast<std::size_t>(slot)] = inst; }

  bool operator==(const Placement&) const = default;

 private:
  std::vector<std::vector<int>> deployed_;  // [type][instance] -> node or -1
  std::vector<std::vector<int>> assigned_;  // [request][slot] -> instance or -1
};

struct Violation {
  std::string constraint;  // node_capacity, link_bandwidth, user_link_bandwidth,
                           // instance_capacity, assignment_deployed, type_deployed
  int a{-1}, b{-1};        // subject indices; meaning depends on the constraint
  double lhs{0.0}, rhs{0.0};
  double excess() const { return lhs - rhs; }
};

struct EvalOptions {
  double alpha{0.5};
  // Penalty normalizer, usually the raw objective of the run's initial
  // placement; 0 derives it from the placement being evaluated.
  double obj_scale{0.0};
  double makespan_norm{1.0};
  double cost_norm{1.0};
};

struct EvaluationReport {
  std::vector<double> makespan;   // per request, seconds
  std::vector<double> comm_cost;  // per request, dollars
  double makespan_sum{0.0};
  double comm_cost_sum{0.0};
  double license_cost{0.0};
  double hosting_cost{0.0};
  double objective{0.0};
  std::vector<Violation> violations;
  double penalty{0.0};
  double fitness{0.0};
  bool feasible() const { return violations.empty(); }
};

// Immutable per-request layout used all over the hot paths: slot order is the
// request's required_types order.
struct SlotInfo {
  int type_idx{-1};
  int type_id{-1};
  double traffic{0.0};                        // bytes received from predecessors
  double weight{1.0};                         // expected executions of this VNF
  std::vector<int> preds;                     // predecessor slots
  std::vector<std::pair<int, double>> iot;    // (global user id, bytes)
  double demand{0.0};                         // weight * (traffic + iot bytes)
};

struct RequestInfo {
  std::vector<SlotInfo> slots;
  int slot_of(int type_id) const;  // -1 when the type is not in this request
};

class Evaluator {
 public:
  Evaluator(const NetworkModel& net, const Workload& wl, const ExpectedLinkCache& cache);

  const NetworkModel& network() const { return *net_; }
  const Workload& workload() const { return *wl_; }
  const ExpectedLinkCache& cache() const { return *cache_; }

  int type_count() const { return static_cast<int>(types_.size()); }
  const VnfType& type(int t_idx) const { return types_[static_cast<std::size_t>(t_idx)]; }
  int type_index(int type_id) const;  // UnknownVnf on miss
  int request_count() const { return static_cast<int>(requests_.size()); }
  const RequestInfo& request_info(int r) const { return requests_[static_cast<std::size_t>(r)]; }

  Placement empty_placement() const { return Placement::empty(*wl_); }

  // Node a request's VNF runs on; UnassignedVnf when the slot has no instance
  // or the instance is not deployed.
  int node_of(const Placement& p, int r, int slot) const;

  // Per-VNF building blocks (Placement decides the node) and *_at variants
  // that evaluate as if the VNF sat on `node` (move scoring).
  double vnf_processing_time(const Placement& p, int r, int type_id) const;
  double vnf_communication_time(const Placement& p, int r, int type_id) const;
  double vnf_communication_cost(const Placement& p, int r, int type_id) const;
  double processing_time_at(int r, int slot, int node) const;
  double communication_time_at(const Placement& p, int r, int slot, int node) const;
  double communication_cost_at(const Placement& p, int r, int slot, int node) const;

  double request_makespan(const Placement& p, int r) const;
  double request_cost(const Placement& p, int r) const;

  // (license, hosting) over deployed instances.
  std::pair<double, double> deployment_cost(const Placement& p) const;

  std::vector<Violation> check_constraints(const Placement& p) const;

  double objective_value(const Placement& p, const EvalOptions& opt) const;
  EvaluationReport evaluate(const Placement& p, const EvalOptions& opt) const;

  // Resource load (sum of resource requirements of deployed instances).
  double node_load(const Placement& p, int node) const;
  // Traffic absorbed by one instance under the current assignments.
  double instance_load(const Placement& p, int t_idx, int inst) const;

 private:
  SubtreeMetrics walk(const Placement& p, int r, const GraphNode& node) const;

  const NetworkModel* net_;
  const Workload* wl_;
  const ExpectedLinkCache* cache_;
  std::vector<VnfType> types_;
  std::vector<int> type_ids_;  // dense index -> external id
  std::vector<RequestInfo> requests_;
};

// Share of deployed resources per tier, in percent: (fog, cloud). An empty
// deployment counts as (0, 0).
std::pair<double, double> tier_usage(const Evaluator& ev, const Placement& p);

}  // namespace fogplace
