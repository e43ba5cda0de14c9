#include "kabc/lagrangian.hpp"

#include <algorithm>
#include <cmath>

namespace kabc {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

struct SnapshotFields {
  Field u;
  Field ux;
};

std::vector<SnapshotFields> prepare(const Trajectory& traj) {
  Spectral sp(traj.grid());
  std::vector<SnapshotFields> out;
  out.reserve(traj.snapshots.size());
  for (const Field& u : traj.snapshots) out.push_back({u, sp.derivative(u, 1)});
  return out;
}

std::vector<Field> momenta(const Trajectory& traj) {
  Spectral sp(traj.grid());
  std::vector<Field> out;
  out.reserve(traj.snapshots.size());
  for (const Field& u : traj.snapshots) {
    const Field uxx = sp.derivative(u, 2);
    Field m(u.grid);
    for (std::size_t j = 0; j < u.size(); ++j) m[j] = u[j] - uxx[j];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Field momentum(const Field& u) {
  Spectral sp(u.grid);
  const Field uxx = sp.derivative(u, 2);
  Field m(u.grid);
  for (std::size_t j = 0; j < u.size(); ++j) m[j] = u[j] - uxx[j];
  return m;
}

double interpolate_cubic(const Field& f, double x) {
  const Grid& g = f.grid;
  const int n = g.n;
  const double s = x / g.dx();
  const double base = std::floor(s);
  const double t = s - base;
  long j = static_cast<long>(base) % n;
  if (j < 0) j += n;
  const double w[4] = {
      -t * (t - 1.0) * (t - 2.0) / 6.0,
      (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
      -(t + 1.0) * t * (t - 2.0) / 2.0,
      (t + 1.0) * t * (t - 1.0) / 6.0,
  };
  double v = 0.0;
  for (int i = 0; i < 4; ++i) v += w[i] * f[static_cast<std::size_t>((j - 1 + i + n) % n)];
  return v;
}

ParticleSet advect(const Trajectory& traj, std::span<const double> seeds, int k, std::size_t first,
                   std::size_t last) {
  if (traj.snapshots.empty()) throw std::invalid_argument("advect: empty trajectory");
  if (k < 1) throw std::invalid_argument("advect: k must be positive");
  last = std::min(last, traj.snapshots.size() - 1);
  if (first > last) throw std::invalid_argument("advect: first snapshot after last");

  const std::vector<SnapshotFields> fields = prepare(traj);
  const double L = traj.grid().length;

  ParticleSet ps;
  ps.seeds.assign(seeds.begin(), seeds.end());
  ps.times.assign(traj.times.begin() + static_cast<long>(first),
                  traj.times.begin() + static_cast<long>(last) + 1);
  ps.paths.assign(seeds.size(), {});
  ps.stretch.assign(seeds.size(), {});
  ps.left_core.assign(seeds.size(), false);

  auto in_core = [L](double x) {
    double r = std::fmod(x, L);
    if (r < 0) r += L;
    return r >= L / 8.0 && r <= L - L / 8.0;
  };

  for (std::size_t i = 0; i < seeds.size(); ++i) {
    double eta = seeds[i];
    double stretch = 1.0;
    ps.paths[i].push_back(eta);
    ps.stretch[i].push_back(stretch);
    if (!in_core(eta)) ps.left_core[i] = true;
    for (std::size_t n = first; n < last; ++n) {
      const double h = traj.times[n + 1] - traj.times[n];
      const SnapshotFields& a = fields[n];
      const SnapshotFields& b = fields[n + 1];
      // Velocity and stretching rate at position x, fraction theta of the interval.
      auto eval = [&](double x, double theta, double s, double& deta, double& ds) {
        const double u = (1.0 - theta) * interpolate_cubic(a.u, x) + theta * interpolate_cubic(b.u, x);
        const double ux =
            (1.0 - theta) * interpolate_cubic(a.ux, x) + theta * interpolate_cubic(b.ux, x);
        deta = ipow(u, k);
        ds = k * ipow(u, k - 1) * ux * s;
      };
      double e1, s1, e2, s2, e3, s3, e4, s4;
      eval(eta, 0.0, stretch, e1, s1);
      eval(eta + 0.5 * h * e1, 0.5, stretch + 0.5 * h * s1, e2, s2);
      eval(eta + 0.5 * h * e2, 0.5, stretch + 0.5 * h * s2, e3, s3);
      eval(eta + h * e3, 1.0, stretch + h * s3, e4, s4);
      eta += h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
      stretch += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
      if (!(stretch > 0.0)) {
        throw WaveBreaking("particle stretch became non-positive at t = " +
                           std::to_string(traj.times[n + 1]) + " (seed " + std::to_string(seeds[i]) + ")");
      }
      if (!in_core(eta)) ps.left_core[i] = true;
      ps.paths[i].push_back(eta);
      ps.stretch[i].push_back(stretch);
    }
  }
  return ps;
}

double invariant_residual(double m_along, double eta_x, double m0, const Params& p) {
  const double gamma3 = p.b / p.k;
  return std::abs(m_along * std::pow(eta_x, gamma3) - m0) / (std::abs(m0) + 1e-12);
}

std::vector<ParticleRow> particle_rows(const Trajectory& traj, const ParticleSet& ps, const Params& p) {
  const std::vector<Field> m = momenta(traj);
  // Locate the snapshot index of the particle set's first time.
  auto start = std::find(traj.times.begin(), traj.times.end(), ps.times.front());
  if (start == traj.times.end()) throw std::invalid_argument("particle times do not match trajectory");
  const std::size_t offset = static_cast<std::size_t>(start - traj.times.begin());

  std::vector<ParticleRow> rows;
  for (std::size_t i = 0; i < ps.seeds.size(); ++i) {
    const double m0 = interpolate_cubic(m[offset], ps.seeds[i]);
    for (std::size_t n = 0; n < ps.times.size(); ++n) {
      const double eta = ps.paths[i][n];
      const double s = ps.stretch[i][n];
      const double along = interpolate_cubic(m[offset + n], eta);
      rows.push_back({ps.seeds[i], ps.times[n], eta, s, along, invariant_residual(along, s, m0, p)});
    }
  }
  return rows;
}

double conservation_check(const Trajectory& traj, const ParticleSet& ps, const Params& p) {
  if (!is_gkbch(p)) {
    throw ParamError("conservation law m(eta) eta_x^{b/k} = m0 needs a = 0 and c = (3k - b)/2 (" +
                     describe(p) + ")");
  }
  double worst = 0.0;
  for (const ParticleRow& r : particle_rows(traj, ps, p)) worst = std::max(worst, r.invariant_residual);
  return worst;
}

}  // namespace kabc
