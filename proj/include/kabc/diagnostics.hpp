#pragma once

#include <optional>
#include <vector>

#include "kabc/dynamics.hpp"
#include "kabc/spectral.hpp"

namespace kabc {

/// Samples with |f| at or below this are excluded from log fits.
inline constexpr double kDecayFloor = 1e-13;
/// r^2 at or above this classifies a tail as exponential.
inline constexpr double kExponentialR2 = 0.995;

/// Weight e^{theta |x|} capped at e^{theta N}, |x| measured from the box center.
struct WeightSpec {
  double theta = 0.5;
  double cap_radius = 1.0;
};

/// Throws std::invalid_argument unless 0 < theta < 1 and N > 0.
WeightSpec make_weight(double theta, double cap_radius);

/// Distances from the box center, lo < hi.
struct DecayWindow {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Side { left, right };

struct DecayFit {
  /// Empty when fewer than two samples clear the floor.
  std::optional<double> theta_hat;
  DecayWindow window;
  /// NaN when undefined.
  double r2 = 0.0;
  bool floor_hit = false;
  int samples_used = 0;
  /// exp(intercept) of the log-linear fit.
  double amplitude = 0.0;

  bool is_exponential() const { return theta_hat.has_value() && r2 >= kExponentialR2; }
};

double sobolev_norm(const Field& f, double s);

/// max_t |E(t) - E(0)| / E(0), E the squared H^1 norm from the per-step
/// records. Throws std::invalid_argument when E(0) = 0 or there are no records.
double h1_drift(const Trajectory& traj);

/// [L/8, L/4] from the box center.
DecayWindow default_tail_window(const Grid& grid);

/// Least-squares slope of log|f| against distance from the center over the
/// window on the chosen side. Requires at least 16 nodes in the window and
/// the window's far edge at least L/8 from the periodic seam.
DecayFit decay_fit(const Field& f, DecayWindow window, Side side);

/// max_j |f(x_j)| phi_N(x_j).
double weighted_sup(const Field& f, const WeightSpec& w);

struct PersistencePoint {
  double t = 0.0;
  DecayFit u;
  DecayFit ux;
};

struct PersistenceReport {
  double theta = 0.0;
  std::vector<PersistencePoint> series;
  std::optional<double> min_theta_u;
  std::optional<double> min_theta_ux;
  double min_r2 = 1.0;
  bool any_floor_hit = false;

  /// Every fit defined, none floored, and both minima >= theta - 0.05.
  bool persists() const;
};

/// Right-tail decay fits of every snapshot and its derivative.
PersistenceReport persistence_report(const Trajectory& traj, double theta,
                                     std::optional<DecayWindow> window = std::nullopt);

/// Crest location of |f| by a parabola through the three nodes around the
/// maximum. Throws std::invalid_argument for a flat field.
double crest_position(const Field& f);

struct CrestTrack {
  std::vector<double> times;
  /// Unwrapped across the periodic seam.
  std::vector<double> positions;
  double speed = 0.0;
};

/// Least-squares crest speed over all snapshots.
CrestTrack crest_track(const Trajectory& traj);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kabc
