#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogplace/errors.hpp"
#include "fogplace/geom.hpp"

namespace fogplace {

// Structured forwarding graph: a tree whose inner nodes are composition
// operators and whose leaves are VNF types. `sel` carries one branch
// probability per child; `loop` carries a continuation probability q < 1.
enum class NodeKind { vnf, seq, par, sel, loop };

const char* to_string(NodeKind k);

struct GraphNode {
  NodeKind kind{NodeKind::vnf};
  int type{-1};                     // leaves only
  std::vector<GraphNode> children;  // inner nodes only
  std::vector<double> probs;        // sel only, one per child
  double q{0.0};                    // loop only

  bool is_leaf() const { return kind == NodeKind::vnf; }
};

// Convenience builders used by tests and hand-written scenarios.
GraphNode vnf(int type);
GraphNode seq(std::vector<GraphNode> children);
GraphNode par(std::vector<GraphNode> children);
GraphNode sel(std::vector<GraphNode> children, std::vector<double> probs);
GraphNode loop(std::vector<GraphNode> children, double q);

struct IotUser {
  int id{0};
  Point pos;
};

struct IotLink {
  int user{0};     // global user id
  int type{0};     // leaf VNF type it feeds
  double bytes{0.0};
};

// One service request: a forwarding-graph tree plus its traffic volumes and
// the IoT users feeding it. Types appear at most once per request.
struct Request {
  int id{0};
  GraphNode tree;
  std::map<int, double> traffic;  // leaf type -> bytes entering that VNF
  std::vector<IotUser> users;
  std::vector<IotLink> iot;

  std::vector<int> required_types;  // leaves in tree order, filled on build
};

// Validates the tree and derives required_types. Throws MalformedTree on
// structural problems (inner node with <2 children, sel probabilities not
// summing to 1, duplicate leaf types, traffic or IoT entries referencing
// unknown types/users, loop q outside [0,1)).
Request build_request(int id, GraphNode tree, std::map<int, double> traffic,
                      std::vector<IotUser> users, std::vector<IotLink> iot);

// Expected number of body executions of a loop with continuation probability
// q: q/(1-q). DomainError outside [0,1).
double expected_loop_iterations(double q);

// Leaf types that can feed `type` directly, i.e. the exit set of whatever
// precedes it in execution order. Branching blocks contribute the union of
// their branch exits; a loop body never feeds back into itself. The first
// VNFs of a request have no predecessors. UnknownVnf if `type` is not a leaf
// of this request.
std::set<int> immediate_predecessors(const Request& r, int type);

// Predecessor sets for every leaf in one walk.
std::map<int, std::set<int>> predecessor_map(const GraphNode& root);

// Probability-weighted execution count of each leaf: product of branch
// probabilities and expected loop iterations along its ancestor path.
std::map<int, double> leaf_weights(const GraphNode& root);

// VNFs on the longest execution path from entry to exit.
int execution_height(const GraphNode& root);

struct VnfType {
  int id{0};
  double resource_req{1.0};     // vCPUs consumed per deployed instance
  double capacity_bytes{1e9};   // traffic an instance can absorb
  double license_cost{100.0};
  double util_threshold{1.0};
  int instances{4};             // deployable slots
};

struct Workload {
  std::vector<VnfType> types;
  std::vector<Request> requests;
};

struct WorkloadParams {
  int num_types{10};
  int vnfs_min{3};
  int vnfs_max{10};
  std::vector<int> heights{2, 4, 6, 8};
  std::vector<double> edge_ratios{1.1, 1.3, 1.5, 1.7, 1.9};
  std::vector<double> sel_ratios{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int users_min{5};
  int users_max{30};
  double iot_vnf_fraction{0.3};
  double traffic_min{100.0};
  double traffic_max{80000.0};
  int instances_per_type{4};
  double resource_req_min{1.0};
  double resource_req_max{4.0};
  double capacity_gb_min{1.0};
  double capacity_gb_max{2.0};
  double license_cost{100.0};
  double util_threshold{1.0};
};

// Seeded two-step generator: draw a VNF count and a compatible height, lay the
// graph out as a sequence of levels, widen a divisor-compatible subset of
// levels into equal-degree forks, then re-draw fork degrees from an edge
// ratio, redistributing the remainder so count and height are preserved.
// Forks become sel (equal branch probabilities) with probability sel_ratio,
// else par. InfeasibleShape if no allowed height fits a drawn VNF count.
Workload generate_workload(int count, std::uint64_t seed,
                           const WorkloadParams& params = {});

}  // namespace fogplace
