#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogplace/errors.hpp"
#include "fogplace/geom.hpp"
#include "fogplace/mobility.hpp"
#include "fogplace/vnffg.hpp"

namespace fogplace {

// Unit conventions, SI decimal throughout: traffic in bytes (KB = 1e3,
// GB = 1e9), bandwidth in bits/s, latency and delays in seconds, money in
// dollars. Link cost rates are quoted per GB and divided down to per-byte;
// node processing delay is quoted in ms/MB and stored in s/byte.
inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kBytesPerGB = 1e9;

inline constexpr double proc_delay_s_per_byte(double ms_per_mb) { return ms_per_mb * 1e-9; }

enum class Tier { cloud, fog };

const char* to_string(Tier t);

struct NodeSpec {
  int id{0};
  Tier tier{Tier::cloud};
  double capacity{8.0};           // vCPUs
  double usage_threshold{1.0};
  double unit_cost{3.0};          // $ per vCPU hosted
  double proc_delay{2.5e-13};     // s per byte
  Point pos;
  MobilityProfile mobility;       // init_point is kept equal to pos
};

LocationDensity node_density(const NodeSpec& n);

// Link metrics between two locations interpolate a class range by the
// normalized distance d = |X-Y|/sqrt(2): latency and cost grow from lo to hi,
// bandwidth falls from hi to lo.
struct LinkClass {
  double bw_lo{1e9}, bw_hi{1e9};        // bits/s
  double lat_lo{0.0}, lat_hi{0.0};      // s
  double cost_lo{0.0}, cost_hi{0.0};    // $ per GB
  double bw_threshold{1.0};
};

struct LinkMetrics {
  double bandwidth_bps{0.0};
  double latency_s{0.0};
  double cost_per_gb{0.0};
};

LinkMetrics link_metrics_at(const LinkClass& lc, Point a, Point b);

// 8*bytes/bandwidth + latency. DomainError on non-positive bandwidth or
// negative volume.
double transmission_delay(double bytes, double bandwidth_bps, double latency_s);

struct NetworkModel {
  std::string name{"custom"};
  std::uint64_t seed{0};
  std::vector<NodeSpec> nodes;
  std::vector<Point> users;   // indexed by global user id
  LinkClass cloud_cloud, fog_fog, cloud_fog, iot_cloud, iot_fog;
  int quadrature_grid{24};
  double link_jitter{0.0};    // fraction of the class span, seeded per pair

  const LinkClass& node_pair_class(Tier a, Tier b) const;
  const LinkClass& user_class(Tier t) const;
};

// Expected link metrics between every node pair and node-user pair under the
// nodes' stationary location laws. inv_bw is E[8/BW] in seconds per byte so
// an expected transfer delay is bytes * inv_bw + latency; bandwidth_bps is
// E[BW] for budget checks.
struct LinkExpectation {
  double inv_bw{0.0};         // s per byte
  double latency_s{0.0};
  double cost_per_byte{0.0};
  double bandwidth_bps{0.0};
  double bw_threshold{1.0};
};

class ExpectedLinkCache {
 public:
  ExpectedLinkCache() = default;
  ExpectedLinkCache(int nodes, int users)
      : n_(nodes), u_(users),
        pair_(static_cast<std::size_t>(nodes) * nodes),
        user_(static_cast<std::size_t>(nodes) * users) {}

  const LinkExpectation& pair(int n, int m) const {
    return pair_[static_cast<std::size_t>(n) * n_ + m];
  }
  const LinkExpectation& user(int n, int u) const {
    return user_[static_cast<std::size_t>(n) * u_ + u];
  }
  LinkExpectation& pair(int n, int m) { return pair_[static_cast<std::size_t>(n) * n_ + m]; }
  LinkExpectation& user(int n, int u) { return user_[static_cast<std::size_t>(n) * u_ + u]; }

  int node_count() const { return n_; }
  int user_count() const { return u_; }

 private:
  int n_{0}, u_{0};
  std::vector<LinkExpectation> pair_;
  std::vector<LinkExpectation> user_;
};

ExpectedLinkCache build_cache(const NetworkModel& net);

struct ScenarioOptions {
  double fog_p_static{0.5};
  double fog_velocity{1.0};
  double fog_pause{kExpectedLegLength};
  int quadrature_grid{24};
  double link_jitter{0.0};
  std::string tier_filter{"hybrid"};  // hybrid | cloud | fog
};

// Named topologies with seeded node draws. "topology-10" = 4 cloud + 6 fog,
// "topology-20" = 8 cloud + 12 fog, "tiny-2" = 1+1, "tiny-4" = 2+2. The tier
// filter drops the other tier after the draw so node attributes stay paired
// across filters of the same seed.
NetworkModel scenario_preset(const std::string& name, std::uint64_t seed,
                             const ScenarioOptions& opt = {});

// Scenario document: either "preset" plus optional overrides, or an explicit
// "nodes" array (validated against preset attribute ranges when a preset is
// also named). See the README for the exact key set.
NetworkModel load_scenario(const nlohmann::json& doc);

// Copies every request's users into the network, indexed by global user id.
void register_users(NetworkModel& net, const Workload& wl);

}  // namespace fogplace
