#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kabc/params.hpp"
#include "kabc/spectral.hpp"

namespace kabc {

/// A non-finite value appeared while evaluating the equation.
class BlowUp : public std::runtime_error {
public:
  BlowUp(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

private:
  double time_;
};

/// Additive source term g(x, t) on the grid nodes. It may read the current
/// state u (the RK4 linear check uses g = -u).
using Forcing = std::function<void(double t, std::span<const double> u, std::span<double> out)>;

struct SimConfig {
  Params params;
  Grid grid;
  double t_end = 1.0;
  double cfl_safety = 0.4;
  double dt_max = 1e-2;
  int output_stride = 1;
  Forcing forcing;
  /// Overrides the CFL step when set (convergence studies).
  std::optional<double> fixed_dt;
  /// Exponential filter on the top sixth of the modes after every step.
  bool spectral_filter = false;
  /// Sobolev index s used for the per-step H^s record and the growth bound.
  double hs_order = 3.0;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void check_config(const SimConfig& cfg);

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double hs_norm = 0.0;
  double h1_sq = 0.0;
};

enum class RunStatus { completed, blow_up };

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  /// One record per accepted step, plus the initial state (dt = 0).
  std::vector<StepRecord> scalars;
  RunStatus status = RunStatus::completed;
  double last_good_time = 0.0;
  std::string message;

  /// Growth bound 2^{1+1/k} ||u0||_{H^s}, tracked as a warning only.
  double hs_bound = 0.0;
  double hs_sup = 0.0;
  std::optional<double> hs_bound_exceeded_at;

  const Grid& grid() const { return snapshots.front().grid; }
};

/// Right-hand side of the nonlocal form and its companions for one
/// (params, grid) pair. Owns transform scratch space; one per run.
class Dynamics {
public:
  Dynamics(const Params& p, const Grid& grid);

  const Params& params() const { return params_; }
  const CoefficientSet& coefficients() const { return coef_; }
  Spectral& spectral() { return spectral_; }
  int padded_points() const { return padded_; }

  Field f1(const Field& u);
  Field f2(const Field& u);

  /// u_t = -u^k u_x + a u^{k-2} u_x^3 - d_x G*F1 - G*F2 + g(t).
  Field rhs(const Field& u, double t, const Forcing& forcing = {});
  void rhs(std::span<const double> u, double t, const Forcing& forcing, std::span<double> out);

  /// Left-hand side of the local (third-order) form, evaluated with the
  /// supplied time derivative.
  Field local_form_residual(const Field& u, const Field& ut);

  /// Transport speed max |u^k - a u^{k-2} u_x^2|.
  double transport_speed(const Field& u);
  double cfl_dt(const Field& u, double safety, double dt_max);

  Field step_rk4(const Field& u, double t, double dt, const Forcing& forcing = {});

  void apply_filter(Field& u);

private:
  void padded_derivatives(std::span<const double> u, int max_order);

  Params params_;
  CoefficientSet coef_;
  Spectral spectral_;
  int padded_;
  // scratch on the padded grid: u, u_x, u_xx, u_xxx
  std::vector<double> pu_[4];
  std::vector<double> work_a_, work_f1_, work_f2_;
  Spectrum hat_a_, hat_f1_, hat_f2_;
};

Field f1(const Field& u, const Params& p);
Field f2(const Field& u, const Params& p);
Field rhs(const Field& u, const Params& p, double t, const Forcing& forcing = {});
Field local_form_residual(const Field& u, const Field& ut, const Params& p);
double cfl_dt(const Field& u, const Params& p, double safety, double dt_max);
Field step_rk4(const Field& u, double t, double dt, const Params& p, const Forcing& forcing = {});

/// Advances u0 to cfg.t_end. A blow-up ends the run early with
/// status = blow_up and the trajectory up to the last finite state.
Trajectory simulate(const SimConfig& cfg, const Field& u0);

/// A smooth space-time function used as a manufactured solution.
struct ManufacturedSolution {
  std::function<double(double x, double t)> value;
  /// Analytic d/dt; when empty a fourth-order central difference with step
  /// 1e-6 is used.
  std::function<double(double x, double t)> time_derivative;
};

/// Forcing g = d_t u* + (spatial terms of the nonlocal form at u*), so that
/// u* solves the forced equation exactly. The returned callable owns its own
/// transform workspace and must not be shared between threads.
Forcing mms_forcing(const ManufacturedSolution& u_star, const Params& p, const Grid& grid);

}  // namespace kabc
