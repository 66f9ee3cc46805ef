#include "fogplace/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fogplace {

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError("refusing to overwrite existing file '" + path + "' (use --force)");
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

nlohmann::json tree_to_json(const GraphNode& n) {
  nlohmann::json j;
  j["kind"] = to_string(n.kind);
  if (n.is_leaf()) {
    j["type"] = n.type;
    return j;
  }
  if (n.kind == NodeKind::sel) j["probs"] = n.probs;
  if (n.kind == NodeKind::loop) j["q"] = n.q;
  nlohmann::json children = nlohmann::json::array();
  for (const GraphNode& c : n.children) children.push_back(tree_to_json(c));
  j["children"] = std::move(children);
  return j;
}

GraphNode tree_from_json(const nlohmann::json& j) try {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw SchemaError("tree node: expected an object with a 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "vnf") {
    if (!j.contains("type") || !j["type"].is_number_integer()) {
      throw SchemaError("vnf node: expected an integer 'type'");
    }
    return vnf(j["type"].get<int>());
  }
  if (!j.contains("children") || !j["children"].is_array()) {
    throw SchemaError(kind + " node: expected a 'children' array");
  }
  std::vector<GraphNode> children;
  for (const auto& c : j["children"]) children.push_back(tree_from_json(c));
  if (kind == "seq") return seq(std::move(children));
  if (kind == "par") return par(std::move(children));
  if (kind == "sel") {
    if (!j.contains("probs") || !j["probs"].is_array()) {
      throw SchemaError("sel node: expected a 'probs' array");
    }
    return sel(std::move(children), j["probs"].get<std::vector<double>>());
  }
  if (kind == "loop") {
    if (!j.contains("q") || !j["q"].is_number()) throw SchemaError("loop node: expected 'q'");
    return loop(std::move(children), j["q"].get<double>());
  }
  throw SchemaError("unknown tree node kind '" + kind + "'");
} catch (const nlohmann::json::exception& e) {
  throw SchemaError(std::string("tree node: ") + e.what());
}

nlohmann::json workload_to_json(const Workload& wl) {
  nlohmann::json j;
  j["types"] = nlohmann::json::array();
  for (const VnfType& t : wl.types) {
    j["types"].push_back({{"id", t.id},
                          {"resource_req", t.resource_req},
                          {"capacity_bytes", t.capacity_bytes},
                          {"license_cost", t.license_cost},
                          {"util_threshold", t.util_threshold},
                          {"instances", t.instances}});
  }
  j["requests"] = nlohmann::json::array();
  for (const Request& r : wl.requests) {
    nlohmann::json jr;
    jr["id"] = r.id;
    jr["tree"] = tree_to_json(r.tree);
    jr["traffic"] = nlohmann::json::array();
    for (const auto& [t, bytes] : r.traffic) {
      jr["traffic"].push_back({{"type", t}, {"bytes", bytes}});
    }
    jr["users"] = nlohmann::json::array();
    for (const IotUser& u : r.users) {
      jr["users"].push_back({{"id", u.id}, {"x", u.pos.x}, {"y", u.pos.y}});
    }
    jr["iot"] = nlohmann::json::array();
    for (const IotLink& l : r.iot) {
      jr["iot"].push_back({{"user", l.user}, {"type", l.type}, {"bytes", l.bytes}});
    }
    j["requests"].push_back(std::move(jr));
  }
  return j;
}

Workload workload_from_json(const nlohmann::json& j) try {
  if (!j.is_object()) throw SchemaError("workload: expected an object");
  Workload wl;
  if (j.contains("types")) {
    for (const auto& jt : j["types"]) {
      VnfType t;
      t.id = jt.at("id").get<int>();
      t.resource_req = jt.at("resource_req").get<double>();
      t.capacity_bytes = jt.at("capacity_bytes").get<double>();
      if (jt.contains("license_cost")) t.license_cost = jt["license_cost"].get<double>();
      if (jt.contains("util_threshold")) t.util_threshold = jt["util_threshold"].get<double>();
      if (jt.contains("instances")) t.instances = jt["instances"].get<int>();
      if (t.instances < 1) throw SchemaError("types: instances must be at least 1");
      wl.types.push_back(t);
    }
  }
  if (j.contains("requests")) {
    for (const auto& jr : j["requests"]) {
      const int id = jr.at("id").get<int>();
      GraphNode tree = tree_from_json(jr.at("tree"));
      std::map<int, double> traffic;
      for (const auto& jt : jr.at("traffic")) {
        traffic[jt.at("type").get<int>()] = jt.at("bytes").get<double>();
      }
      std::vector<IotUser> users;
      if (jr.contains("users")) {
        for (const auto& ju : jr["users"]) {
          users.push_back({ju.at("id").get<int>(),
                           Point{ju.at("x").get<double>(), ju.at("y").get<double>()}});
        }
      }
      std::vector<IotLink> iot;
      if (jr.contains("iot")) {
        for (const auto& jl : jr["iot"]) {
          iot.push_back({jl.at("user").get<int>(), jl.at("type").get<int>(),
                         jl.at("bytes").get<double>()});
        }
      }
      try {
        wl.requests.push_back(build_request(id, std::move(tree), std::move(traffic),
                                            std::move(users), std::move(iot)));
      } catch (const MalformedTree& e) {
        throw SchemaError("requests[" + std::to_string(id) + "]: " + e.what());
      }
    }
  }
  return wl;
} catch (const nlohmann::json::exception& e) {
  throw SchemaError(std::string("workload: ") + e.what());
}

namespace {
int type_index_in(const Workload& wl, int type_id) {
  for (std::size_t t = 0; t < wl.types.size(); ++t) {
    if (wl.types[t].id == type_id) return static_cast<int>(t);
  }
  throw SchemaError("placement references unknown type id " + std::to_string(type_id));
}
}  // namespace

nlohmann::json placement_to_json(const Placement& p, const Workload& wl) {
  nlohmann::json j;
  j["deployments"] = nlohmann::json::array();
  for (int t = 0; t < p.type_count(); ++t) {
    for (int i = 0; i < p.instance_count(t); ++i) {
      const int n = p.deployed_node(t, i);
      if (n < 0) continue;
      j["deployments"].push_back(
          {{"type", wl.types[static_cast<std::size_t>(t)].id}, {"instance", i}, {"node", n}});
    }
  }
  j["assignments"] = nlohmann::json::array();
  for (int r = 0; r < p.request_count(); ++r) {
    const Request& req = wl.requests[static_cast<std::size_t>(r)];
    for (int s = 0; s < p.slot_count(r); ++s) {
      const int inst = p.assigned_instance(r, s);
      if (inst < 0) continue;
      j["assignments"].push_back({{"request", req.id},
                                  {"type", req.required_types[static_cast<std::size_t>(s)]},
                                  {"instance", inst}});
    }
  }
  return j;
}

Placement placement_from_json(const nlohmann::json& j, const Workload& wl) try {
  if (!j.is_object()) throw SchemaError("placement: expected an object");
  Placement p = Placement::empty(wl);
  if (j.contains("deployments")) {
    for (const auto& jd : j["deployments"]) {
      const int t = type_index_in(wl, jd.at("type").get<int>());
      const int i = jd.at("instance").get<int>();
      if (i < 0 || i >= p.instance_count(t)) throw SchemaError("placement: instance out of range");
      p.set_deployed(t, i, jd.at("node").get<int>());
    }
  }
  if (j.contains("assignments")) {
    std::map<int, int> row_of_request;
    for (std::size_t r = 0; r < wl.requests.size(); ++r) {
      row_of_request[wl.requests[r].id] = static_cast<int>(r);
    }
    for (const auto& ja : j["assignments"]) {
      const int rid = ja.at("request").get<int>();
      auto it = row_of_request.find(rid);
      if (it == row_of_request.end()) {
        throw SchemaError("placement references unknown request " + std::to_string(rid));
      }
      const int r = it->second;
      const Request& req = wl.requests[static_cast<std::size_t>(r)];
      const int type_id = ja.at("type").get<int>();
      int slot = -1;
      for (std::size_t s = 0; s < req.required_types.size(); ++s) {
        if (req.required_types[s] == type_id) slot = static_cast<int>(s);
      }
      if (slot < 0) {
        throw SchemaError("placement: request " + std::to_string(rid) + " has no type " +
                          std::to_string(type_id));
      }
      p.assign(r, slot, ja.at("instance").get<int>());
    }
  }
  return p;
} catch (const nlohmann::json::exception& e) {
  throw SchemaError(std::string("placement: ") + e.what());
}

nlohmann::json report_to_json(const EvaluationReport& rep) {
  nlohmann::json j;
  j["makespan"] = rep.makespan;
  j["comm_cost"] = rep.comm_cost;
  j["makespan_sum"] = rep.makespan_sum;
  j["comm_cost_sum"] = rep.comm_cost_sum;
  j["license_cost"] = rep.license_cost;
  j["hosting_cost"] = rep.hosting_cost;
  j["objective"] = rep.objective;
  j["penalty"] = rep.penalty;
  j["fitness"] = rep.fitness;
  j["feasible"] = rep.feasible();
  j["violations"] = nlohmann::json::array();
  for (const Violation& v : rep.violations) {
    j["violations"].push_back(
        {{"constraint", v.constraint}, {"a", v.a}, {"b", v.b}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  return j;
}

std::string report_csv_header() {
  return "makespan_s,comm_cost,license_cost,hosting_cost,objective,penalty,fitness,feasible,"
         "violations";
}

std::string report_csv_row(const EvaluationReport& rep) {
  std::string row = fmt_double(rep.makespan_sum) + "," + fmt_double(rep.comm_cost_sum) + "," +
                    fmt_double(rep.license_cost) + "," + fmt_double(rep.hosting_cost) + "," +
                    fmt_double(rep.objective) + "," + fmt_double(rep.penalty) + "," +
                    fmt_double(rep.fitness) + "," + (rep.feasible() ? "1" : "0") + "," +
                    std::to_string(rep.violations.size());
  return row;
}

}  // namespace fogplace
