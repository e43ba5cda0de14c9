#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "kabc/dynamics.hpp"

namespace kabc {

/// The stretch eta_x reached zero or changed sign.
class WaveBreaking : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Characteristics d eta / dt = u^k(eta, t) started from `seeds`.
struct ParticleSet {
  std::vector<double> seeds;
  /// Snapshot times the paths are sampled at.
  std::vector<double> times;
  /// paths[i][n] = eta(seeds[i], times[n]); grid coordinates, unwrapped.
  std::vector<std::vector<double>> paths;
  /// stretch[i][n] = eta_x(seeds[i], times[n]).
  std::vector<std::vector<double>> stretch;
  /// True for particles that came within L/8 of the periodic seam.
  std::vector<bool> left_core;
};

/// m = u - u_xx.
Field momentum(const Field& u);

/// Four-point Lagrange interpolation on the periodic grid.
double interpolate_cubic(const Field& f, double x);

/// Integrates the particle paths and their stretch through the snapshots
/// [first, last] of the trajectory with RK4, one step per snapshot interval,
/// u cubic in space and linear in time between snapshots. Seeds are
/// positions at times[first]. Throws WaveBreaking if eta_x <= 0.
ParticleSet advect(const Trajectory& traj, std::span<const double> seeds, int k,
                   std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1));

/// Relative residual |m(eta,t) eta_x^{b/k} - m0(x0)| / (|m0(x0)| + 1e-12) for
/// one particle sample.
double invariant_residual(double m_along, double eta_x, double m0, const Params& p);

/// max over particles and stored times of invariant_residual. Throws
/// ParamError outside the a = 0, c = (3k - b)/2 class.
double conservation_check(const Trajectory& traj, const ParticleSet& ps, const Params& p);

struct ParticleRow {
  double seed;
  double t;
  double eta;
  double eta_x;
  double m_along;
  double invariant_residual;
};

/// One row per particle per stored time, the particle CSV layout.
std::vector<ParticleRow> particle_rows(const Trajectory& traj, const ParticleSet& ps, const Params& p);

}  // namespace kabc
