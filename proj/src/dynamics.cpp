#include "kabc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace kabc {

namespace {

// Integer power by repeated multiplication; u may be negative.
inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// A term is evaluated unless its coefficient vanishes. Terms whose power of u
// is negative must have a coefficient that is zero to parameter tolerance.
bool active(double coef, int exponent) {
  if (coef == 0.0) return false;
  if (exponent < 0) {
    if (std::abs(coef) <= kParamTolerance) return false;
    throw std::logic_error("negative power of u with nonzero coefficient");
  }
  return true;
}

void check_finite(std::span<const double> v, double t, const char* where) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw BlowUp(std::string("non-finite value in ") + where, t);
    }
  }
}

}  // namespace

void check_config(const SimConfig& cfg) {
  validate(cfg.params.k, cfg.params.a, cfg.params.b, cfg.params.c);
  make_grid(cfg.grid.n, cfg.grid.length);
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw std::invalid_argument("t_end must be positive and finite");
  }
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) {
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  }
  if (!(cfg.dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  if (cfg.output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
  if (cfg.fixed_dt && !(*cfg.fixed_dt > 0.0)) {
    throw std::invalid_argument("fixed_dt must be positive");
  }
  if (cfg.hs_order < 0.0) throw std::invalid_argument("hs_order must be non-negative");
}

Dynamics::Dynamics(const Params& p, const Grid& grid)
    : params_(validate(p.k, p.a, p.b, p.c)),
      coef_(kabc::coefficients(params_)),
      spectral_(grid),
      padded_(padded_size(grid.n, params_.k + 1)) {}

void Dynamics::padded_derivatives(std::span<const double> u, int max_order) {
  const Spectrum hat = spectral_.forward(u);
  for (int order = 0; order <= max_order; ++order) {
    spectral_.to_padded(order == 0 ? hat : spectral_.derivative(hat, order), padded_, pu_[order]);
  }
}

Field Dynamics::f1(const Field& u) {
  padded_derivatives(u.values, 1);
  const int k = params_.k;
  std::vector<double> acc(static_cast<std::size_t>(padded_), 0.0);
  for (int j = 0; j < padded_; ++j) {
    const double v = pu_[0][j], vx = pu_[1][j];
    double s = 0.0;
    if (active(coef_.c_f1_1, k + 1)) s += coef_.c_f1_1 * ipow(v, k + 1);
    if (active(coef_.c_f1_2, k - 1)) s += coef_.c_f1_2 * ipow(v, k - 1) * vx * vx;
    if (active(coef_.c_f1_3, k - 3)) s += coef_.c_f1_3 * ipow(v, k - 3) * ipow(vx, 4);
    acc[j] = s;
  }
  return Field(u.grid, spectral_.inverse(spectral_.from_padded(acc)));
}

Field Dynamics::f2(const Field& u) {
  padded_derivatives(u.values, 2);
  const int k = params_.k;
  std::vector<double> acc(static_cast<std::size_t>(padded_), 0.0);
  for (int j = 0; j < padded_; ++j) {
    const double v = pu_[0][j], vx = pu_[1][j], vxx = pu_[2][j];
    double s = 0.0;
    if (active(coef_.c_f2_1, k - 2)) s += coef_.c_f2_1 * ipow(v, k - 2) * ipow(vx, 3);
    if (active(coef_.c_f2_2, k - 3)) s += coef_.c_f2_2 * ipow(v, k - 3) * ipow(vx, 3) * vxx;
    acc[j] = s;
  }
  return Field(u.grid, spectral_.inverse(spectral_.from_padded(acc)));
}

void Dynamics::rhs(std::span<const double> u, double t, const Forcing& forcing,
                   std::span<double> out) {
  const int k = params_.k;
  const CoefficientSet& cs = coef_;
  const bool use_cub = active(cs.c_cub, k - 2);
  const bool use_f1_1 = active(cs.c_f1_1, k + 1);
  const bool use_f1_2 = active(cs.c_f1_2, k - 1);
  const bool use_f1_3 = active(cs.c_f1_3, k - 3);
  const bool use_f2_1 = active(cs.c_f2_1, k - 2);
  const bool use_f2_2 = active(cs.c_f2_2, k - 3);

  padded_derivatives(u, use_f2_2 ? 2 : 1);
  const std::size_t m = static_cast<std::size_t>(padded_);
  work_a_.assign(m, 0.0);
  work_f1_.assign(m, 0.0);
  work_f2_.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double v = pu_[0][j], vx = pu_[1][j];
    const double vk = ipow(v, k);
    double transport = vk * vx;
    if (use_cub) transport -= cs.c_cub * ipow(v, k - 2) * vx * vx * vx;
    work_a_[j] = transport;

    double s1 = 0.0;
    if (use_f1_1) s1 += cs.c_f1_1 * vk * v;
    if (use_f1_2) s1 += cs.c_f1_2 * ipow(v, k - 1) * vx * vx;
    if (use_f1_3) s1 += cs.c_f1_3 * ipow(v, k - 3) * ipow(vx, 4);
    work_f1_[j] = s1;

    double s2 = 0.0;
    if (use_f2_1) s2 += cs.c_f2_1 * ipow(v, k - 2) * vx * vx * vx;
    if (use_f2_2) s2 += cs.c_f2_2 * ipow(v, k - 3) * vx * vx * vx * pu_[2][j];
    work_f2_[j] = s2;
  }

  spectral_.from_padded(work_a_, hat_a_);
  spectral_.from_padded(work_f1_, hat_f1_);
  spectral_.from_padded(work_f2_, hat_f2_);
  const Spectrum g1 = spectral_.green_dx_convolve(hat_f1_);
  const Spectrum g2 = spectral_.helmholtz_inverse(hat_f2_);
  Spectrum total(hat_a_.size());
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = -hat_a_[i] - g1[i] - g2[i];
  const std::vector<double> values = spectral_.inverse(total);
  std::copy(values.begin(), values.end(), out.begin());

  if (forcing) {
    std::vector<double> g(out.size(), 0.0);
    forcing(t, u, g);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += g[j];
  }
  check_finite(out, t, "right-hand side");
}

Field Dynamics::rhs(const Field& u, double t, const Forcing& forcing) {
  if (!(u.grid == spectral_.grid())) throw GridMismatch("rhs: field grid differs from dynamics grid");
  Field out(u.grid);
  rhs(u.values, t, forcing, out.values);
  return out;
}

Field Dynamics::local_form_residual(const Field& u, const Field& ut) {
  if (!(u.grid == spectral_.grid()) || !(ut.grid == u.grid)) {
    throw GridMismatch("local_form_residual: fields on different grids");
  }
  const Params& p = params_;
  const int k = p.k;
  const double c_tr = p.b + 1.0;
  const double c_uxuxx = 2.0 * p.c - 3.0 * k;
  const double c_cube = 3.0 * k - 9.0 * p.a - p.b - 2.0 * p.c;
  const double c_uxuxx2 = 6.0 * p.a;
  const double c_ux2uxxx = 3.0 * p.a;
  const bool use_uxuxx = active(c_uxuxx, k - 1);
  const bool use_cube = active(c_cube, k - 2);
  const bool use_uxuxx2 = active(c_uxuxx2, k - 2);
  const bool use_ux2uxxx = active(c_ux2uxxx, k - 2);

  padded_derivatives(u.values, 3);
  std::vector<double> acc(static_cast<std::size_t>(padded_), 0.0);
  for (int j = 0; j < padded_; ++j) {
    const double v = pu_[0][j], vx = pu_[1][j], vxx = pu_[2][j], vxxx = pu_[3][j];
    const double vk = ipow(v, k);
    double s = c_tr * vk * vx - vk * vxxx;
    if (use_uxuxx) s += c_uxuxx * ipow(v, k - 1) * vx * vxx;
    if (use_cube) s += c_cube * ipow(v, k - 2) * vx * vx * vx;
    if (use_uxuxx2) s += c_uxuxx2 * ipow(v, k - 2) * vx * vxx * vxx;
    if (use_ux2uxxx) s += c_ux2uxxx * ipow(v, k - 2) * vx * vx * vxxx;
    acc[j] = s;
  }
  const Spectrum ut_hat = spectral_.forward(ut.values);
  const Spectrum ut_xx = spectral_.derivative(ut_hat, 2);
  Spectrum total = spectral_.from_padded(acc);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += ut_hat[i] - ut_xx[i];
  return Field(u.grid, spectral_.inverse(total));
}

double Dynamics::transport_speed(const Field& u) {
  const int k = params_.k;
  double speed = 0.0;
  if (params_.a != 0.0) {
    const Field ux = spectral_.derivative(u, 1);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double v = u[j];
      speed = std::max(speed, std::abs(ipow(v, k) - params_.a * ipow(v, k - 2) * ux[j] * ux[j]));
    }
  } else {
    for (double v : u.values) speed = std::max(speed, std::abs(ipow(v, k)));
  }
  return speed;
}

double Dynamics::cfl_dt(const Field& u, double safety, double dt_max) {
  const double speed = std::max(transport_speed(u), 1e-12);
  return std::min(dt_max, safety * u.grid.dx() / speed);
}

Field Dynamics::step_rk4(const Field& u, double t, double dt, const Forcing& forcing) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const std::size_t n = u.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  rhs(u.values, t, forcing, k1);
  for (std::size_t j = 0; j < n; ++j) stage[j] = u[j] + 0.5 * dt * k1[j];
  rhs(stage, t + 0.5 * dt, forcing, k2);
  for (std::size_t j = 0; j < n; ++j) stage[j] = u[j] + 0.5 * dt * k2[j];
  rhs(stage, t + 0.5 * dt, forcing, k3);
  for (std::size_t j = 0; j < n; ++j) stage[j] = u[j] + dt * k3[j];
  rhs(stage, t + dt, forcing, k4);
  Field out(u.grid);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  check_finite(out.values, t + dt, "RK4 update");
  return out;
}

void Dynamics::apply_filter(Field& u) {
  Spectrum hat = spectral_.forward(u.values);
  const int half = u.grid.n / 2;
  const double cutoff = 5.0 / 6.0;
  for (int m = 0; m <= half; ++m) {
    const double r = static_cast<double>(m) / half;
    if (r > cutoff) {
      const double z = (r - cutoff) / (1.0 - cutoff);
      hat[m] *= std::exp(-36.0 * std::pow(z, 8));
    }
  }
  u.values = spectral_.inverse(hat);
}

Field f1(const Field& u, const Params& p) { return Dynamics(p, u.grid).f1(u); }
Field f2(const Field& u, const Params& p) { return Dynamics(p, u.grid).f2(u); }
Field rhs(const Field& u, const Params& p, double t, const Forcing& forcing) {
  return Dynamics(p, u.grid).rhs(u, t, forcing);
}
Field local_form_residual(const Field& u, const Field& ut, const Params& p) {
  return Dynamics(p, u.grid).local_form_residual(u, ut);
}
double cfl_dt(const Field& u, const Params& p, double safety, double dt_max) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety must lie in (0, 1]");
  return Dynamics(p, u.grid).cfl_dt(u, safety, dt_max);
}
Field step_rk4(const Field& u, double t, double dt, const Params& p, const Forcing& forcing) {
  return Dynamics(p, u.grid).step_rk4(u, t, dt, forcing);
}

Trajectory simulate(const SimConfig& cfg, const Field& u0) {
  check_config(cfg);
  if (!(u0.grid == cfg.grid)) throw GridMismatch("simulate: initial field is not on the configured grid");
  if (!u0.all_finite()) throw std::invalid_argument("simulate: initial field has non-finite samples");

  Dynamics dyn(cfg.params, cfg.grid);
  Spectral& sp = dyn.spectral();
  auto record = [&](double t, double dt, const Field& u) {
    const Spectrum hat = sp.forward(u.values);
    const double h1 = sp.sobolev_norm(hat, 1.0);
    return StepRecord{t, dt, sp.sobolev_norm(hat, cfg.hs_order), h1 * h1};
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u0);
  traj.scalars.push_back(record(0.0, 0.0, u0));
  const double hs0 = traj.scalars.front().hs_norm;
  traj.hs_bound = std::pow(2.0, 1.0 + 1.0 / cfg.params.k) * hs0;
  traj.hs_sup = hs0;

  Field u = u0;
  double t = 0.0;
  long step = 0;
  while (t < cfg.t_end) {
    double dt = cfg.fixed_dt ? *cfg.fixed_dt : dyn.cfl_dt(u, cfg.cfl_safety, cfg.dt_max);
    bool last = false;
    if (t + dt * (1.0 + 1e-9) >= cfg.t_end) {
      dt = cfg.t_end - t;
      last = true;
    }
    Field next;
    try {
      next = dyn.step_rk4(u, t, dt, cfg.forcing);
      if (cfg.spectral_filter) dyn.apply_filter(next);
    } catch (const BlowUp& e) {
      traj.status = RunStatus::blow_up;
      traj.message = e.what();
      break;
    }
    u = std::move(next);
    t = last ? cfg.t_end : t + dt;
    ++step;
    const StepRecord rec = record(t, dt, u);
    traj.scalars.push_back(rec);
    traj.hs_sup = std::max(traj.hs_sup, rec.hs_norm);
    if (!traj.hs_bound_exceeded_at && rec.hs_norm > traj.hs_bound) traj.hs_bound_exceeded_at = t;
    if (step % cfg.output_stride == 0 || last) {
      traj.times.push_back(t);
      traj.snapshots.push_back(u);
    }
  }
  traj.last_good_time = t;
  if (traj.status == RunStatus::blow_up && traj.times.back() != t) {
    traj.times.push_back(t);
    traj.snapshots.push_back(u);
  }
  return traj;
}

Forcing mms_forcing(const ManufacturedSolution& u_star, const Params& p, const Grid& grid) {
  auto dyn = std::make_shared<Dynamics>(p, grid);
  ManufacturedSolution sol = u_star;
  return [dyn, sol, grid](double t, std::span<const double>, std::span<double> out) {
    Field star(grid);
    for (int j = 0; j < grid.n; ++j) star[j] = sol.value(grid.node(j), t);
    std::vector<double> spatial(static_cast<std::size_t>(grid.n));
    // rhs without forcing is minus the spatial operator.
    dyn->rhs(star.values, t, Forcing{}, spatial);
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.node(j);
      double dudt;
      if (sol.time_derivative) {
        dudt = sol.time_derivative(x, t);
      } else {
        constexpr double h = 1e-6;
        dudt = (-sol.value(x, t + 2 * h) + 8 * sol.value(x, t + h) - 8 * sol.value(x, t - h) +
                sol.value(x, t - 2 * h)) /
               (12 * h);
      }
      out[j] = dudt - spatial[j];
    }
  };
}

}  // namespace kabc
