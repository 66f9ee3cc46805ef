#include "fogplace/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fogplace/random.hpp"

namespace fogplace {

double pause_probability(double expected_pause, double velocity) {
  if (!(expected_pause >= 0.0)) throw DomainError("expected pause must be non-negative");
  if (!(velocity > 0.0)) throw DomainError("velocity must be positive");
  if (expected_pause == 0.0) return 0.0;
  return expected_pause / (expected_pause + kExpectedLegLength / velocity);
}

double rwp_core_density(double x, double y) {
  if (!(x > 0.0 && x <= 0.5 && y > 0.0 && y <= x)) {
    throw DomainError("core density is defined on 0 < x <= 1/2, 0 < y <= x");
  }
  const double a = 1.0 - 2.0 * x + 2.0 * x * x;
  return 6.0 * y
       + 0.75 * a * (y / (y - 1.0) + y * y / ((x - 1.0) * x))
       + 1.5 * y * ((2.0 * x - 1.0) * (y + 1.0) * std::log((1.0 - x) / x)
                    + (a + y) * std::log((1.0 - y) / y));
}

double rwp_mobility_density(double x, double y) noexcept {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) return 0.0;
  double v;
  if (x <= 0.5) {
    if (y <= x)            v = rwp_core_density(x, y);
    else if (y <= 0.5)     v = rwp_core_density(y, x);
    else if (y <= 1.0 - x) v = rwp_core_density(1.0 - y, x);
    else                   v = rwp_core_density(x, 1.0 - y);
  } else {
    if (y <= 1.0 - x)      v = rwp_core_density(1.0 - x, y);
    else if (y <= 0.5)     v = rwp_core_density(y, 1.0 - x);
    else if (y <= x)       v = rwp_core_density(1.0 - y, 1.0 - x);
    else                   v = rwp_core_density(1.0 - x, 1.0 - y);
  }
  return std::isfinite(v) ? std::max(v, 0.0) : 0.0;
}

LocationDensity::LocationDensity(const MobilityProfile& profile) : profile_(profile) {
  if (!(profile.p_static >= 0.0 && profile.p_static <= 1.0)) {
    throw DomainError("p_static must lie in [0,1]");
  }
  if (!(profile.velocity > 0.0)) throw DomainError("velocity must be positive");
  if (!(profile.expected_pause >= 0.0)) throw DomainError("expected pause must be non-negative");
  if (profile.init == InitDist::point && !in_unit_square(profile.init_point)) {
    throw DomainError("initial point outside the unit square");
  }

  pause_ = pause_probability(profile.expected_pause, profile.velocity);
  const double mobile = 1.0 - profile.p_static;
  uniform_ = mobile * pause_;
  mobility_ = mobile * (1.0 - pause_);
  if (profile.init == InitDist::point) {
    if (profile.p_static > 0.0) atoms_.push_back({profile.init_point, profile.p_static});
  } else {
    uniform_ += profile.p_static;
  }
}

double LocationDensity::at(double x, double y) const {
  double v = uniform_;
  if (mobility_ > 0.0) v += mobility_ * rwp_mobility_density(x, y);
  return v;
}

Eigen::ArrayXXd LocationDensity::cell_masses(int grid, int oversample) const {
  if (grid < 1 || oversample < 1) throw DomainError("grid and oversample must be positive");
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(grid, grid);
  const double h = 1.0 / grid;
  const double sh = h / oversample;
  const double sub_w = sh * sh;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      double m = 0.0;
      for (int si = 0; si < oversample; ++si) {
        for (int sj = 0; sj < oversample; ++sj) {
          const double x = i * h + (si + 0.5) * sh;
          const double y = j * h + (sj + 0.5) * sh;
          m += at(x, y) * sub_w;
        }
      }
      out(i, j) = m;
    }
  }
  for (const Atom& a : atoms_) {
    const int i = std::clamp(static_cast<int>(a.pos.x * grid), 0, grid - 1);
    const int j = std::clamp(static_cast<int>(a.pos.y * grid), 0, grid - 1);
    out(i, j) += a.weight;
  }
  return out;
}

DensityGrid make_density_grid(const LocationDensity& d, const QuadratureSpec& spec) {
  if (spec.grid < 2) throw DomainError("quadrature grid must have at least 2 cells per axis");
  DensityGrid g;
  g.n = spec.grid;
  g.mid = Eigen::ArrayXd::Zero(g.n);
  const double h = 1.0 / g.n;
  for (int i = 0; i < g.n; ++i) g.mid[i] = (i + 0.5) * h;
  g.w = Eigen::ArrayXXd::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      g.w(i, j) = d.at(g.mid[i], g.mid[j]) * h * h;
    }
  }
  const double exact = d.continuous_mass();
  const double raw = g.w.sum();
  if (std::abs(raw - exact) > spec.mass_tol) {
    throw QuadratureError("midpoint mass off by " + std::to_string(raw - exact) +
                          " on a " + std::to_string(g.n) + "-cell grid");
  }
  if (raw > 0.0) g.w *= exact / raw;
  return g;
}

namespace {

inline int cell_of(double v, int grid) {
  return std::clamp(static_cast<int>(v * grid), 0, grid - 1);
}

// Spreads `dur` over the cells the segment p->q crosses, proportionally to
// the in-cell length (grid line traversal, one cell step at a time).
void deposit_segment(Eigen::ArrayXXd& h, int grid, Point p, Point q, double dur) {
  if (dur <= 0.0) return;
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 < 1e-24) {
    h(cell_of(p.x, grid), cell_of(p.y, grid)) += dur;
    return;
  }
  int ix = cell_of(p.x, grid);
  int iy = cell_of(p.y, grid);
  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  const double inv = 1.0 / grid;
  // Parameter t runs 0..1 along the segment; t_max_* is the t of the next
  // grid line crossing on each axis.
  double t_max_x = dx != 0.0
      ? ((step_x > 0 ? (ix + 1) * inv - p.x : p.x - ix * inv) / std::abs(dx))
      : std::numeric_limits<double>::infinity();
  double t_max_y = dy != 0.0
      ? ((step_y > 0 ? (iy + 1) * inv - p.y : p.y - iy * inv) / std::abs(dy))
      : std::numeric_limits<double>::infinity();
  const double t_delta_x = dx != 0.0 ? inv / std::abs(dx) : 0.0;
  const double t_delta_y = dy != 0.0 ? inv / std::abs(dy) : 0.0;

  double t_prev = 0.0;
  while (true) {
    const double t_next = std::min({t_max_x, t_max_y, 1.0});
    h(ix, iy) += (t_next - t_prev) * dur;
    if (t_next >= 1.0) break;
    t_prev = t_next;
    if (t_max_x <= t_max_y) {
      ix += step_x;
      t_max_x += t_delta_x;
      if (ix < 0 || ix >= grid) break;
    } else {
      iy += step_y;
      t_max_y += t_delta_y;
      if (iy < 0 || iy >= grid) break;
    }
  }
}

struct Event {
  Point from, to;   // pause: from == to
  double dur;
  bool pause;
};

}  // namespace

RwpSimulation simulate_rwp(const MobilityProfile& profile, int n_trajectories,
                           std::uint64_t seed, const RwpSimOptions& opt) {
  if (n_trajectories < 1) throw DomainError("need at least one trajectory");
  LocationDensity density(profile);  // validates the profile
  const int G = opt.grid;

  RwpSimulation out;
  out.cell_time = Eigen::ArrayXXd::Zero(G, G);
  Rng rng(seed);

  Eigen::ArrayXXd mobile = Eigen::ArrayXXd::Zero(G, G);
  double leg_len_sum = 0.0;

  if (profile.p_static < 1.0) {
    const long legs_per_traj = std::max(1L, opt.legs / n_trajectories);
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(2 * legs_per_traj));
    for (int traj = 0; traj < n_trajectories; ++traj) {
      Point pos = profile.init == InitDist::point ? profile.init_point
                                                  : Point{rng.uniform(), rng.uniform()};
      events.clear();
      double total = 0.0;
      for (long leg = 0; leg < legs_per_traj; ++leg) {
        const Point dest{rng.uniform(), rng.uniform()};
        const double len = distance(pos, dest);
        leg_len_sum += len;
        const double dur = len / profile.velocity;
        events.push_back({pos, dest, dur, false});
        total += dur;
        if (profile.expected_pause > 0.0) {
          const double ps = rng.exponential(profile.expected_pause);
          events.push_back({dest, dest, ps, true});
          total += ps;
        }
        pos = dest;
      }
      out.legs += legs_per_traj;

      const double t_warm = opt.warmup_fraction * total;
      double t = 0.0;
      for (const Event& e : events) {
        const double t_end = t + e.dur;
        if (t_end <= t_warm) {
          t = t_end;
          continue;
        }
        if (e.pause) {
          const double dur = t_end - std::max(t, t_warm);
          mobile(cell_of(e.to.x, G), cell_of(e.to.y, G)) += dur;
        } else if (t >= t_warm) {
          deposit_segment(mobile, G, e.from, e.to, e.dur);
        } else {
          // Leg straddles the cutoff: deposit only the tail sub-segment.
          const double frac = (t_warm - t) / e.dur;
          const Point mid{e.from.x + frac * (e.to.x - e.from.x),
                          e.from.y + frac * (e.to.y - e.from.y)};
          deposit_segment(mobile, G, mid, e.to, e.dur * (1.0 - frac));
        }
        if (static_cast<int>(out.samples.size()) < opt.keep_samples && !e.pause) {
          out.samples.push_back(e.to);
        }
        t = t_end;
      }
      out.sim_time += std::max(0.0, total - t_warm);
    }
    const double mass = mobile.sum();
    if (mass > 0.0) mobile /= mass;
    out.mean_leg_length = leg_len_sum / static_cast<double>(out.legs);
  }

  // Static component enters as an exact mixture term.
  Eigen::ArrayXXd stat = Eigen::ArrayXXd::Zero(G, G);
  if (profile.p_static > 0.0) {
    if (profile.init == InitDist::point) {
      stat(cell_of(profile.init_point.x, G), cell_of(profile.init_point.y, G)) = 1.0;
      const int want = opt.keep_samples - static_cast<int>(out.samples.size());
      for (int i = 0; i < std::min(want, 16); ++i) out.samples.push_back(profile.init_point);
    } else {
      stat.setConstant(1.0 / (G * G));
    }
  }
  out.cell_time = profile.p_static * stat + (1.0 - profile.p_static) * mobile;
  return out;
}

}  // namespace fogplace
