#include "fogplace/infra.hpp"

#include <algorithm>
#include <cmath>

#include "fogplace/random.hpp"

namespace fogplace {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

const char* to_string(Tier t) { return t == Tier::cloud ? "cloud" : "fog"; }

LocationDensity node_density(const NodeSpec& n) {
  MobilityProfile p = n.mobility;
  p.init_point = n.pos;
  return LocationDensity(p);
}

LinkMetrics link_metrics_at(const LinkClass& lc, Point a, Point b) {
  const double d = distance(a, b) / kSqrt2;
  LinkMetrics m;
  m.bandwidth_bps = lc.bw_hi - (lc.bw_hi - lc.bw_lo) * d;
  m.latency_s = lc.lat_lo + (lc.lat_hi - lc.lat_lo) * d;
  m.cost_per_gb = lc.cost_lo + (lc.cost_hi - lc.cost_lo) * d;
  return m;
}

double transmission_delay(double bytes, double bandwidth_bps, double latency_s) {
  if (!(bandwidth_bps > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(bytes >= 0.0)) throw DomainError("traffic volume must be non-negative");
  return kBitsPerByte * bytes / bandwidth_bps + latency_s;
}

const LinkClass& NetworkModel::node_pair_class(Tier a, Tier b) const {
  if (a == Tier::cloud && b == Tier::cloud) return cloud_cloud;
  if (a == Tier::fog && b == Tier::fog) return fog_fog;
  return cloud_fog;
}

const LinkClass& NetworkModel::user_class(Tier t) const {
  return t == Tier::cloud ? iot_cloud : iot_fog;
}

namespace {

// Walks the product measure of two location laws, handing (X, Y, weight) to
// the sink. Shares the midpoint rasters across all metrics of one pair.
template <class Sink>
void for_each_mass_pair(const LocationDensity& a, const LocationDensity& b,
                        const QuadratureSpec& spec, Sink&& sink) {
  const bool ca = a.continuous_mass() > 0.0;
  const bool cb = b.continuous_mass() > 0.0;
  DensityGrid ga, gb;
  if (ca) ga = make_density_grid(a, spec);
  if (cb) gb = make_density_grid(b, spec);

  for (const Atom& pa : a.atoms()) {
    for (const Atom& pb : b.atoms()) sink(pa.pos, pb.pos, pa.weight * pb.weight);
    if (cb) {
      for (int k = 0; k < gb.n; ++k)
        for (int l = 0; l < gb.n; ++l)
          sink(pa.pos, Point{gb.mid[k], gb.mid[l]}, pa.weight * gb.w(k, l));
    }
  }
  if (ca) {
    for (int i = 0; i < ga.n; ++i) {
      for (int j = 0; j < ga.n; ++j) {
        const Point xa{ga.mid[i], ga.mid[j]};
        const double wa = ga.w(i, j);
        for (const Atom& pb : b.atoms()) sink(xa, pb.pos, wa * pb.weight);
        if (cb) {
          for (int k = 0; k < gb.n; ++k)
            for (int l = 0; l < gb.n; ++l)
              sink(xa, Point{gb.mid[k], gb.mid[l]}, wa * gb.w(k, l));
        }
      }
    }
  }
}

struct Jitter {
  double bw{0.0}, lat{0.0}, cost{0.0};
};

Jitter pair_jitter(const NetworkModel& net, std::uint64_t a, std::uint64_t b) {
  if (net.link_jitter <= 0.0) return {};
  Rng r(net.seed ^ (a * 0x9e3779b97f4a7c15ULL + b * 0xc2b2ae3d27d4eb4fULL + 0x165667b1ULL));
  Jitter j;
  j.bw = net.link_jitter * r.uniform(-1.0, 1.0);
  j.lat = net.link_jitter * r.uniform(-1.0, 1.0);
  j.cost = net.link_jitter * r.uniform(-1.0, 1.0);
  return j;
}

LinkExpectation expected_link(const LocationDensity& a, const LocationDensity& b,
                              const LinkClass& lc, const QuadratureSpec& spec,
                              const Jitter& jit) {
  const double bw_span = lc.bw_hi - lc.bw_lo;
  const double lat_span = lc.lat_hi - lc.lat_lo;
  const double cost_span = lc.cost_hi - lc.cost_lo;
  const double bw_off = jit.bw * bw_span;
  const double lat_off = jit.lat * lat_span;
  const double cost_off = jit.cost * cost_span;

  LinkExpectation e;
  e.bw_threshold = lc.bw_threshold;
  for_each_mass_pair(a, b, spec, [&](Point x, Point y, double w) {
    const double d = distance(x, y) / kSqrt2;
    const double bw = lc.bw_hi - bw_span * d + bw_off;
    e.inv_bw += w * kBitsPerByte / bw;
    e.latency_s += w * (lc.lat_lo + lat_span * d + lat_off);
    e.cost_per_byte += w * (lc.cost_lo + cost_span * d + cost_off) / kBytesPerGB;
    e.bandwidth_bps += w * bw;
  });
  return e;
}

}  // namespace

ExpectedLinkCache build_cache(const NetworkModel& net) {
  const int n = static_cast<int>(net.nodes.size());
  const int u = static_cast<int>(net.users.size());
  ExpectedLinkCache cache(n, u);
  const QuadratureSpec spec{net.quadrature_grid, 5e-3};

  std::vector<LocationDensity> density;
  density.reserve(static_cast<std::size_t>(n));
  for (const NodeSpec& ns : net.nodes) density.push_back(node_density(ns));

  for (int i = 0; i < n; ++i) {
    // A node talking to itself: no propagation, no transfer cost, top-class
    // bandwidth.
    LinkExpectation self;
    self.inv_bw = kBitsPerByte / net.cloud_cloud.bw_hi;
    self.latency_s = 0.0;
    self.cost_per_byte = 0.0;
    self.bandwidth_bps = net.cloud_cloud.bw_hi;
    self.bw_threshold = net.cloud_cloud.bw_threshold;
    cache.pair(i, i) = self;

    for (int j = i + 1; j < n; ++j) {
      const LinkClass& lc = net.node_pair_class(net.nodes[i].tier, net.nodes[j].tier);
      const Jitter jit = pair_jitter(net, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j));
      LinkExpectation e = expected_link(density[i], density[j], lc, spec, jit);
      cache.pair(i, j) = e;
      cache.pair(j, i) = e;  // metrics depend on |X-Y| only
    }
    for (int k = 0; k < u; ++k) {
      const LinkClass& lc = net.user_class(net.nodes[i].tier);
      const Jitter jit = pair_jitter(net, static_cast<std::uint64_t>(i),
                                     0x10000000ULL + static_cast<std::uint64_t>(k));
      LocationDensity user_density(MobilityProfile{1.0, 1.0, 0.0, InitDist::point,
                                                   net.users[static_cast<std::size_t>(k)]});
      cache.user(i, k) = expected_link(density[i], user_density, lc, spec, jit);
    }
  }
  return cache;
}

namespace {

struct PresetShape {
  int clouds{0};
  int fogs{0};
};

PresetShape preset_shape(const std::string& name) {
  if (name == "topology-10") return {4, 6};
  if (name == "topology-20") return {8, 12};
  if (name == "tiny-2") return {1, 1};
  if (name == "tiny-4") return {2, 2};
  throw SchemaError("unknown preset '" + name + "'");
}

void apply_default_link_classes(NetworkModel& net) {
  net.cloud_cloud = {1e10, 1e10, 0.05, 0.10, 0.155, 0.155, 1.0};
  net.fog_fog = {1e8, 1e9, 0.01, 0.05, 0.25, 2.0, 1.0};
  net.cloud_fog = {1e9, 1e10, 0.10, 0.255, 10.0, 20.0, 1.0};
  net.iot_cloud = {1e10, 1e10, 0.25, 0.25, 20.0, 20.0, 1.0};
  net.iot_fog = {2.5e5, 5.4e7, 0.007, 0.02, 0.05, 0.25, 1.0};
}

// Node attribute ranges behind the presets; also the validation ranges for
// explicit node lists that declare a preset.
constexpr double kCloudCapacity = 8.0;
constexpr double kCloudCostLo = 2.33, kCloudCostHi = 4.65;
constexpr double kFogCostLo = 4.65, kFogCostHi = 5.82;
constexpr int kFogCapacityLo = 2, kFogCapacityHi = 4;
constexpr double kCloudProcMsPerMb = 0.25, kFogProcMsPerMb = 25.0;

}  // namespace

NetworkModel scenario_preset(const std::string& name, std::uint64_t seed,
                             const ScenarioOptions& opt) {
  const PresetShape shape = preset_shape(name);
  NetworkModel net;
  net.name = name;
  net.seed = seed;
  net.quadrature_grid = opt.quadrature_grid;
  net.link_jitter = opt.link_jitter;
  apply_default_link_classes(net);

  Rng rng(seed);
  std::vector<NodeSpec> drawn;
  for (int i = 0; i < shape.clouds; ++i) {
    NodeSpec ns;
    ns.tier = Tier::cloud;
    ns.pos = {rng.uniform(), rng.uniform()};
    ns.capacity = kCloudCapacity;
    ns.unit_cost = rng.uniform(kCloudCostLo, kCloudCostHi);
    ns.proc_delay = proc_delay_s_per_byte(kCloudProcMsPerMb);
    ns.mobility = {1.0, 1.0, 0.0, InitDist::point, ns.pos};
    drawn.push_back(ns);
  }
  for (int i = 0; i < shape.fogs; ++i) {
    NodeSpec ns;
    ns.tier = Tier::fog;
    ns.pos = {rng.uniform(), rng.uniform()};
    ns.capacity = static_cast<double>(rng.uniform_int(kFogCapacityLo, kFogCapacityHi));
    ns.unit_cost = rng.uniform(kFogCostLo, kFogCostHi);
    ns.proc_delay = proc_delay_s_per_byte(kFogProcMsPerMb);
    ns.mobility = {opt.fog_p_static, opt.fog_velocity, opt.fog_pause, InitDist::point, ns.pos};
    drawn.push_back(ns);
  }

  if (opt.tier_filter == "cloud" || opt.tier_filter == "fog") {
    const Tier keep = opt.tier_filter == "cloud" ? Tier::cloud : Tier::fog;
    std::erase_if(drawn, [&](const NodeSpec& ns) { return ns.tier != keep; });
    net.name += "-" + opt.tier_filter;
  } else if (opt.tier_filter != "hybrid") {
    throw SchemaError("tier_filter must be hybrid, cloud or fog");
  }
  for (std::size_t i = 0; i < drawn.size(); ++i) drawn[i].id = static_cast<int>(i);
  net.nodes = std::move(drawn);
  return net;
}

namespace {

double require_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path + ": expected a number");
  return j.get<double>();
}

const nlohmann::json& require_key(const nlohmann::json& j, const char* key,
                                  const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path + "." + key + ": missing");
  return j[key];
}

void parse_range(const nlohmann::json& j, const std::string& path, double& lo, double& hi) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path + ": expected [lo, hi]");
  lo = require_number(j[0], path + "[0]");
  hi = require_number(j[1], path + "[1]");
  if (hi < lo) throw SchemaError(path + ": hi < lo");
}

void parse_link_class(const nlohmann::json& j, const std::string& path, LinkClass& lc) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  if (j.contains("bandwidth_bps")) parse_range(j["bandwidth_bps"], path + ".bandwidth_bps", lc.bw_lo, lc.bw_hi);
  if (j.contains("latency_s")) parse_range(j["latency_s"], path + ".latency_s", lc.lat_lo, lc.lat_hi);
  if (j.contains("cost_per_gb")) parse_range(j["cost_per_gb"], path + ".cost_per_gb", lc.cost_lo, lc.cost_hi);
  if (j.contains("bw_threshold")) lc.bw_threshold = require_number(j["bw_threshold"], path + ".bw_threshold");
  if (lc.bw_lo <= 0.0) throw SchemaError(path + ": bandwidth must be positive");
}

}  // namespace

NetworkModel load_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("scenario: expected an object");
  const bool has_preset = doc.contains("preset");
  const bool has_nodes = doc.contains("nodes");
  if (!has_preset && !has_nodes) throw SchemaError("scenario: need 'preset' or 'nodes'");

  ScenarioOptions opt;
  if (doc.contains("fog_p_static")) opt.fog_p_static = require_number(doc["fog_p_static"], "fog_p_static");
  if (doc.contains("fog_velocity")) opt.fog_velocity = require_number(doc["fog_velocity"], "fog_velocity");
  if (doc.contains("fog_pause")) opt.fog_pause = require_number(doc["fog_pause"], "fog_pause");
  if (doc.contains("quadrature_grid")) opt.quadrature_grid = static_cast<int>(require_number(doc["quadrature_grid"], "quadrature_grid"));
  if (doc.contains("link_jitter")) opt.link_jitter = require_number(doc["link_jitter"], "link_jitter");
  if (doc.contains("tier_filter")) {
    if (!doc["tier_filter"].is_string()) throw SchemaError("tier_filter: expected a string");
    opt.tier_filter = doc["tier_filter"].get<std::string>();
  }
  const std::uint64_t seed = doc.contains("seed")
      ? static_cast<std::uint64_t>(require_number(doc["seed"], "seed")) : 0;

  NetworkModel net;
  if (has_preset) {
    if (!doc["preset"].is_string()) throw SchemaError("preset: expected a string");
    net = scenario_preset(doc["preset"].get<std::string>(), seed, opt);
  } else {
    net.name = "custom";
    net.seed = seed;
    net.quadrature_grid = opt.quadrature_grid;
    net.link_jitter = opt.link_jitter;
    apply_default_link_classes(net);
  }

  if (doc.contains("link_classes")) {
    const auto& lcs = doc["link_classes"];
    if (!lcs.is_object()) throw SchemaError("link_classes: expected an object");
    struct Slot { const char* key; LinkClass NetworkModel::* member; };
    const Slot slots[] = {
        {"cloud_cloud", &NetworkModel::cloud_cloud}, {"fog_fog", &NetworkModel::fog_fog},
        {"cloud_fog", &NetworkModel::cloud_fog}, {"iot_cloud", &NetworkModel::iot_cloud},
        {"iot_fog", &NetworkModel::iot_fog}};
    for (const Slot& s : slots) {
      if (lcs.contains(s.key)) parse_link_class(lcs[s.key], std::string("link_classes.") + s.key, net.*(s.member));
    }
  }

  if (has_nodes) {
    const auto& arr = doc["nodes"];
    if (!arr.is_array()) throw SchemaError("nodes: expected an array");
    net.nodes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "nodes[" + std::to_string(i) + "]";
      const auto& jn = arr[i];
      if (!jn.is_object()) throw SchemaError(path + ": expected an object");
      NodeSpec ns;
      ns.id = static_cast<int>(i);
      if (!jn.contains("tier") || !jn["tier"].is_string()) throw SchemaError(path + ".tier: expected 'cloud' or 'fog'");
      const std::string tier = jn["tier"].get<std::string>();
      if (tier == "cloud") ns.tier = Tier::cloud;
      else if (tier == "fog") ns.tier = Tier::fog;
      else throw SchemaError(path + ".tier: expected 'cloud' or 'fog'");

      ns.capacity = require_number(require_key(jn, "capacity", path), path + ".capacity");
      ns.unit_cost = require_number(require_key(jn, "unit_cost", path), path + ".unit_cost");
      ns.pos.x = require_number(require_key(jn, "x", path), path + ".x");
      ns.pos.y = require_number(require_key(jn, "y", path), path + ".y");
      if (jn.contains("usage_threshold")) ns.usage_threshold = require_number(jn["usage_threshold"], path + ".usage_threshold");
      const double proc_ms = jn.contains("proc_delay_ms_per_mb")
          ? require_number(jn["proc_delay_ms_per_mb"], path + ".proc_delay_ms_per_mb")
          : (ns.tier == Tier::cloud ? kCloudProcMsPerMb : kFogProcMsPerMb);
      ns.proc_delay = proc_delay_s_per_byte(proc_ms);

      if (ns.tier == Tier::cloud) {
        ns.mobility = {1.0, 1.0, 0.0, InitDist::point, ns.pos};
      } else {
        ns.mobility = {opt.fog_p_static, opt.fog_velocity, opt.fog_pause, InitDist::point, ns.pos};
      }
      if (jn.contains("p_static")) ns.mobility.p_static = require_number(jn["p_static"], path + ".p_static");
      if (jn.contains("velocity")) ns.mobility.velocity = require_number(jn["velocity"], path + ".velocity");
      if (jn.contains("expected_pause")) ns.mobility.expected_pause = require_number(jn["expected_pause"], path + ".expected_pause");
      if (jn.contains("init")) {
        if (!jn["init"].is_string()) throw SchemaError(path + ".init: expected 'point' or 'uniform'");
        const std::string init = jn["init"].get<std::string>();
        if (init == "point") ns.mobility.init = InitDist::point;
        else if (init == "uniform") ns.mobility.init = InitDist::uniform;
        else throw SchemaError(path + ".init: expected 'point' or 'uniform'");
      }
      ns.mobility.init_point = ns.pos;

      if (!in_unit_square(ns.pos)) throw SchemaError(path + ": position outside the unit square");
      if (!(ns.capacity > 0.0)) throw SchemaError(path + ".capacity: must be positive");
      if (ns.tier == Tier::cloud && ns.mobility.p_static != 1.0) {
        throw SchemaError(path + ".p_static: cloud nodes are static");
      }
      if (has_preset) {
        if (ns.tier == Tier::cloud) {
          if (ns.capacity != kCloudCapacity) throw SchemaError(path + ".capacity: cloud capacity must be 8");
          if (ns.unit_cost < kCloudCostLo || ns.unit_cost > kCloudCostHi) throw SchemaError(path + ".unit_cost: cloud cost must lie in [2.33, 4.65]");
        } else {
          if (ns.capacity < kFogCapacityLo || ns.capacity > kFogCapacityHi) throw SchemaError(path + ".capacity: fog capacity must lie in [2, 4]");
          if (ns.unit_cost < kFogCostLo || ns.unit_cost > kFogCostHi) throw SchemaError(path + ".unit_cost: fog cost must lie in [4.65, 5.82]");
        }
      }
      net.nodes.push_back(ns);
    }
  }
  if (net.nodes.empty()) throw SchemaError("scenario has no nodes after filtering");

  if (doc.contains("users")) {
    const auto& arr = doc["users"];
    if (!arr.is_array()) throw SchemaError("users: expected an array");
    net.users.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "users[" + std::to_string(i) + "]";
      Point p{require_number(require_key(arr[i], "x", path), path + ".x"),
              require_number(require_key(arr[i], "y", path), path + ".y")};
      if (!in_unit_square(p)) throw SchemaError(path + ": position outside the unit square");
      net.users.push_back(p);
    }
  }
  return net;
}

void register_users(NetworkModel& net, const Workload& wl) {
  int max_id = -1;
  for (const Request& r : wl.requests) {
    for (const IotUser& u : r.users) max_id = std::max(max_id, u.id);
  }
  net.users.assign(static_cast<std::size_t>(max_id + 1), Point{});
  for (const Request& r : wl.requests) {
    for (const IotUser& u : r.users) net.users[static_cast<std::size_t>(u.id)] = u.pos;
  }
}

}  // namespace fogplace
