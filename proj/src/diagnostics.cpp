#include "kabc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kabc {

WeightSpec make_weight(double theta, double cap_radius) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("weight theta must lie in (0, 1)");
  if (!(cap_radius > 0.0)) throw std::invalid_argument("weight cap radius must be positive");
  return WeightSpec{theta, cap_radius};
}

double sobolev_norm(const Field& f, double s) {
  Spectral sp(f.grid);
  return sp.sobolev_norm(f, s);
}

double h1_drift(const Trajectory& traj) {
  if (traj.scalars.empty()) throw std::invalid_argument("h1_drift: empty trajectory");
  const double e0 = traj.scalars.front().h1_sq;
  if (!(e0 > 0.0)) throw std::invalid_argument("h1_drift: initial H1 energy is zero");
  double drift = 0.0;
  for (const StepRecord& r : traj.scalars) drift = std::max(drift, std::abs(r.h1_sq - e0) / e0);
  return drift;
}

DecayWindow default_tail_window(const Grid& grid) {
  return DecayWindow{grid.length / 8.0, grid.length / 4.0};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

DecayFit decay_fit(const Field& f, DecayWindow window, Side side) {
  const Grid& g = f.grid;
  if (!(window.lo >= 0.0 && window.lo < window.hi)) {
    throw std::invalid_argument("decay window must satisfy 0 <= lo < hi");
  }
  if (window.hi > 0.5 * g.length - g.length / 8.0 + 1e-12 * g.length) {
    throw std::invalid_argument("decay window reaches within L/8 of the periodic seam");
  }

  std::vector<double> xs, ys;
  int in_window = 0;
  bool floored = false;
  for (int j = 0; j < g.n; ++j) {
    const double xc = g.node(j) - g.center();
    const double d = side == Side::right ? xc : -xc;
    if (d < window.lo || d > window.hi) continue;
    ++in_window;
    const double v = std::abs(f[j]);
    if (v <= kDecayFloor) {
      floored = true;
      continue;
    }
    xs.push_back(d);
    ys.push_back(std::log(v));
  }
  if (in_window < 16) {
    throw std::invalid_argument("decay window holds " + std::to_string(in_window) +
                                " nodes, need at least 16");
  }

  DecayFit fit;
  fit.window = window;
  fit.floor_hit = floored;
  fit.samples_used = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    fit.r2 = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.theta_hat = -slope;
  fit.amplitude = std::exp(intercept);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

double weighted_sup(const Field& f, const WeightSpec& w) {
  const Grid& g = f.grid;
  double best = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double d = std::abs(g.node(j) - g.center());
    const double phi = std::exp(w.theta * std::min(d, w.cap_radius));
    best = std::max(best, std::abs(f[j]) * phi);
  }
  return best;
}

bool PersistenceReport::persists() const {
  if (any_floor_hit || !min_theta_u || !min_theta_ux) return false;
  for (const PersistencePoint& p : series) {
    if (!p.u.theta_hat || !p.ux.theta_hat) return false;
  }
  return *min_theta_u >= theta - 0.05 && *min_theta_ux >= theta - 0.05;
}

PersistenceReport persistence_report(const Trajectory& traj, double theta,
                                     std::optional<DecayWindow> window) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("persistence theta must lie in (0, 1)");
  if (traj.snapshots.empty()) throw std::invalid_argument("persistence_report: empty trajectory");
  const Grid& g = traj.grid();
  const DecayWindow win = window.value_or(default_tail_window(g));
  Spectral sp(g);

  PersistenceReport rep;
  rep.theta = theta;
  auto fold_min = [](std::optional<double>& acc, const std::optional<double>& v) {
    if (v) acc = acc ? std::min(*acc, *v) : *v;
  };
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Field& u = traj.snapshots[i];
    PersistencePoint pt;
    pt.t = traj.times[i];
    pt.u = decay_fit(u, win, Side::right);
    pt.ux = decay_fit(sp.derivative(u, 1), win, Side::right);
    fold_min(rep.min_theta_u, pt.u.theta_hat);
    fold_min(rep.min_theta_ux, pt.ux.theta_hat);
    rep.any_floor_hit = rep.any_floor_hit || pt.u.floor_hit || pt.ux.floor_hit;
    for (const DecayFit* fit : {&pt.u, &pt.ux}) {
      if (fit->theta_hat && std::isfinite(fit->r2)) rep.min_r2 = std::min(rep.min_r2, fit->r2);
    }
    rep.series.push_back(pt);
  }
  return rep;
}

double crest_position(const Field& f) {
  const Grid& g = f.grid;
  const int n = g.n;
  int jmax = 0;
  double vmax = -1.0, vmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double v = std::abs(f[j]);
    if (v > vmax) {
      vmax = v;
      jmax = j;
    }
    vmin = std::min(vmin, v);
  }
  if (vmax - vmin <= 1e-12 * std::max(1.0, vmax)) {
    throw std::invalid_argument("crest_position: field is flat, crest is ambiguous");
  }
  const double fm = std::abs(f[(jmax + n - 1) % n]);
  const double f0 = vmax;
  const double fp = std::abs(f[(jmax + 1) % n]);
  const double denom = fm - 2.0 * f0 + fp;
  const double offset = denom != 0.0 ? 0.5 * (fm - fp) / denom : 0.0;
  return g.node(jmax) + offset * g.dx();
}

CrestTrack crest_track(const Trajectory& traj) {
  if (traj.snapshots.size() < 2) throw std::invalid_argument("crest_track needs two or more snapshots");
  const double L = traj.grid().length;
  CrestTrack out;
  out.times = traj.times;
  double prev = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const double raw = crest_position(traj.snapshots[i]);
    if (i > 0) {
      const double jump = raw + shift - prev;
      if (jump > 0.5 * L) shift -= L;
      if (jump < -0.5 * L) shift += L;
    }
    prev = raw + shift;
    out.positions.push_back(prev);
  }
  out.speed = fit_slope(out.times, out.positions);
  return out;
}

}  // namespace kabc
