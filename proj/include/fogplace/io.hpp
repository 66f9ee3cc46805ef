#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fogplace/evaluator.hpp"
#include "fogplace/vnffg.hpp"

namespace fogplace {

// Shortest round-trip decimal form; keeps CSV output byte-stable across runs.
std::string fmt_double(double v);

// Refuses to replace an existing file unless force is set.
void write_text_file(const std::string& path, const std::string& content, bool force);
std::string read_text_file(const std::string& path);
nlohmann::json load_json_file(const std::string& path);

// Forwarding-graph trees: {"kind": "vnf", "type": t} for leaves and
// {"kind": "seq|par|sel|loop", "children": [...]} for composition nodes, with
// "probs" on sel and "q" on loop.
nlohmann::json tree_to_json(const GraphNode& n);
GraphNode tree_from_json(const nlohmann::json& j);

nlohmann::json workload_to_json(const Workload& wl);
Workload workload_from_json(const nlohmann::json& j);

// Placements use external type ids so the document survives workload
// re-indexing: {"deployments": [{type, instance, node}],
// "assignments": [{request, type, instance}]}.
nlohmann::json placement_to_json(const Placement& p, const Workload& wl);
Placement placement_from_json(const nlohmann::json& j, const Workload& wl);

nlohmann::json report_to_json(const EvaluationReport& rep);
std::string report_csv_header();
std::string report_csv_row(const EvaluationReport& rep);

}  // namespace fogplace
