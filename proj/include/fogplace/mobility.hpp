#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fogplace/errors.hpp"
#include "fogplace/geom.hpp"

namespace fogplace {

// Expected length of one movement leg of the random-waypoint process on the
// unit square (mean distance between two independent uniform points). The
// analysis this module follows works with the rounded constant; the true
// value is 0.5214...
inline constexpr double kExpectedLegLength = 0.52;

// Fraction of non-static time a random-waypoint node spends paused:
// E[PS] / (E[PS] + E[L]/v).
double pause_probability(double expected_pause, double velocity);

// Closed-form stationary density of the movement phase on the core triangle
// Q* = {0 < x <= 1/2, 0 < y <= x}. DomainError outside Q*.
double rwp_core_density(double x, double y);

// Stationary movement density on the whole unit square, folded onto Q* by the
// eightfold symmetry of the square. Zero outside the open square; the
// boundary limit is 0 and non-finite intermediate values are clamped to 0.
double rwp_mobility_density(double x, double y) noexcept;

enum class InitDist { point, uniform };

struct MobilityProfile {
  double p_static{1.0};
  double velocity{1.0};
  double expected_pause{kExpectedLegLength};  // gives pause probability 1/2 at v=1
  InitDist init{InitDist::point};
  Point init_point{};
};

struct Atom {
  Point pos;
  double weight{0.0};
};

// Stationary location law of one node, split into point masses and a
// continuous part of the form  u + w * f_mobility(x, y):
//   static & point init   -> atom of p_static at the initial point
//   static & uniform init -> p_static added to the uniform coefficient
//   pausing               -> (1-p_static) * p_pause, uniform
//   moving                -> (1-p_static) * (1-p_pause) * f_mobility
class LocationDensity {
 public:
  explicit LocationDensity(const MobilityProfile& profile);

  const MobilityProfile& profile() const { return profile_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double uniform_weight() const { return uniform_; }
  double mobility_weight() const { return mobility_; }
  double continuous_mass() const { return uniform_ + mobility_; }
  double pause_prob() const { return pause_; }

  // Continuous part only; atoms are carried separately.
  double at(double x, double y) const;

  // Probability mass per grid cell, continuous part integrated with per-cell
  // sub-midpoint sampling and atoms added to their cells. Sums to 1 up to the
  // quadrature error of the oversampled rule.
  Eigen::ArrayXXd cell_masses(int grid, int oversample = 4) const;

 private:
  MobilityProfile profile_;
  std::vector<Atom> atoms_;
  double uniform_{0.0};
  double mobility_{0.0};
  double pause_{0.0};
};

struct QuadratureSpec {
  int grid{24};
  // Allowed deviation of the raw midpoint mass from the exact continuous
  // mass before the grid is rejected. The accepted grid is rescaled to the
  // exact mass, so this bounds shape error, not a bias in totals.
  double mass_tol{5e-3};
};

// Midpoint-rule raster of the continuous part of a density, weights rescaled
// to sum exactly to continuous_mass(). Throws QuadratureError when the raw
// midpoint mass misses the exact mass by more than spec.mass_tol.
struct DensityGrid {
  int n{0};
  Eigen::ArrayXd mid;    // cell midpoints, shared by both axes
  Eigen::ArrayXXd w;     // w(i,j) = weight at (mid[i], mid[j])
};

DensityGrid make_density_grid(const LocationDensity& d, const QuadratureSpec& spec);

// E[metric(X, Y)] for independent node locations X ~ a, Y ~ b. Atom pairs are
// evaluated exactly; continuous parts go through the midpoint raster.
template <class F>
double expected_pair_metric(const LocationDensity& a, const LocationDensity& b, F&& metric,
                            const QuadratureSpec& spec = {}) {
  double acc = 0.0;
  const bool ca = a.continuous_mass() > 0.0;
  const bool cb = b.continuous_mass() > 0.0;
  DensityGrid ga, gb;
  if (ca) ga = make_density_grid(a, spec);
  if (cb) gb = make_density_grid(b, spec);

  for (const Atom& pa : a.atoms()) {
    for (const Atom& pb : b.atoms()) {
      acc += pa.weight * pb.weight * metric(pa.pos, pb.pos);
    }
    if (cb) {
      for (int k = 0; k < gb.n; ++k) {
        for (int l = 0; l < gb.n; ++l) {
          acc += pa.weight * gb.w(k, l) * metric(pa.pos, Point{gb.mid[k], gb.mid[l]});
        }
      }
    }
  }
  if (ca) {
    for (int i = 0; i < ga.n; ++i) {
      for (int j = 0; j < ga.n; ++j) {
        const double wa = ga.w(i, j);
        const Point xa{ga.mid[i], ga.mid[j]};
        for (const Atom& pb : b.atoms()) acc += wa * pb.weight * metric(xa, pb.pos);
        if (cb) {
          for (int k = 0; k < gb.n; ++k) {
            for (int l = 0; l < gb.n; ++l) {
              acc += wa * gb.w(k, l) * metric(xa, Point{gb.mid[k], gb.mid[l]});
            }
          }
        }
      }
    }
  }
  return acc;
}

// E[metric(X, p)] for X ~ a and a fixed point p (an IoT user).
template <class F>
double expected_point_metric(const LocationDensity& a, Point p, F&& metric,
                             const QuadratureSpec& spec = {}) {
  double acc = 0.0;
  for (const Atom& pa : a.atoms()) acc += pa.weight * metric(pa.pos, p);
  if (a.continuous_mass() > 0.0) {
    DensityGrid ga = make_density_grid(a, spec);
    for (int i = 0; i < ga.n; ++i) {
      for (int j = 0; j < ga.n; ++j) {
        acc += ga.w(i, j) * metric(Point{ga.mid[i], ga.mid[j]}, p);
      }
    }
  }
  return acc;
}

struct RwpSimOptions {
  long legs{1'000'000};        // movement legs across all trajectories
  int grid{32};
  double warmup_fraction{0.2};  // leading simulated time discarded per trajectory
  int keep_samples{0};          // waypoints retained for inspection
};

struct RwpSimulation {
  Eigen::ArrayXXd cell_time;    // time-weighted occupancy, sums to 1
  double mean_leg_length{0.0};
  long legs{0};
  double sim_time{0.0};         // post-warmup simulated time (mobile part)
  std::vector<Point> samples;
};

// Trajectory simulation of the profile's location process. Movement time is
// spread over the exact cells each leg crosses and pauses deposit at their
// waypoint; the static fraction enters as an exact mixture weight, not as a
// random subset of trajectories.
RwpSimulation simulate_rwp(const MobilityProfile& profile, int n_trajectories,
                           std::uint64_t seed, const RwpSimOptions& opt = {});

}  // namespace fogplace
