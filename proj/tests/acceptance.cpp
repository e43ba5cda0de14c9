// Acceptance suite: one PASS/FAIL line per criterion, plus a JSON manifest
// with the measurements and the growth-bound record of every run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kabc/commands.hpp"
#include "kabc/diagnostics.hpp"
#include "kabc/dynamics.hpp"
#include "kabc/exact.hpp"
#include "kabc/lagrangian.hpp"
#include "oracles.hpp"

using namespace kabc;
using nlohmann::json;
using kabc::testing::kPi;
using kabc::testing::max_abs_diff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  json data = json::object();
};

struct Criterion {
  int id;
  std::string name;
  double runtime_limit_s;
  std::function<Outcome()> body;
};

std::vector<json> growth_log;

void record_growth(const std::string& run, const Trajectory& tr) {
  json r = {{"run", run},
            {"hs_norm0", tr.scalars.front().hs_norm},
            {"bound", tr.hs_bound},
            {"sup", tr.hs_sup},
            {"ratio", tr.hs_sup / tr.hs_bound},
            {"horizon", tr.times.back()},
            {"exceeded_at", tr.hs_bound_exceeded_at ? json(*tr.hs_bound_exceeded_at) : json(nullptr)}};
  growth_log.push_back(std::move(r));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Field normalized_random(const Grid& g, int max_mode, std::mt19937_64& rng) {
  Field u = kabc::testing::random_band_limited(g, max_mode, rng, 4.0);
  const double s = 1.0 / u.max_abs();
  for (auto& v : u.values) v *= s;
  return u;
}

// 1. spectral kernel identities
Outcome spectral_suite() {
  std::mt19937_64 rng(1);
  double roundtrip = 0, parseval = 0, inverse = 0, green = 0, adjoint = 0;
  for (int n : {64, 256}) {
    const Grid g = make_grid(n, 2.0 * kPi);
    Spectral sp(g);
    for (int trial = 0; trial < 10; ++trial) {
      const Field f = kabc::testing::random_band_limited(g, n / 3, rng);
      const Field h = kabc::testing::random_band_limited(g, n / 3, rng);
      roundtrip = std::max(roundtrip, max_abs_diff(sp.transform_roundtrip(f), f) / f.max_abs());

      const Spectrum c = sp.forward(f.values);
      double spec = 0.0, phys = 0.0;
      for (int m = 0; m <= n / 2; ++m) spec += ((m == 0 || m == n / 2) ? 1.0 : 2.0) * std::norm(c[m]);
      for (double v : f.values) phys += v * v;
      parseval = std::max(parseval, std::abs(spec / n - phys) / phys);

      const Field df = sp.helmholtz_inverse(f);
      const Field ddf = sp.derivative(df, 2);
      Field back(g);
      for (int j = 0; j < n; ++j) back[j] = df[j] - ddf[j];
      inverse = std::max(inverse, max_abs_diff(back, f));

      const Field lhs = sp.derivative(sp.green_dx_convolve(f), 1);
      Field rhs = df;
      for (int j = 0; j < n; ++j) rhs[j] -= f[j];
      green = std::max(green, max_abs_diff(lhs, rhs));

      const double a = inner_product(df, h), b = inner_product(f, sp.helmholtz_inverse(h));
      adjoint = std::max(adjoint, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  }
  Outcome o;
  o.pass = roundtrip <= 1e-12 && parseval <= 1e-12 && inverse <= 1e-10 && green <= 1e-10 && adjoint <= 1e-12;
  o.detail = "roundtrip " + fmt(roundtrip) + ", Parseval " + fmt(parseval) + ", (1-d2)D^-2 " + fmt(inverse) +
             ", d2 G* " + fmt(green) + ", adjoint " + fmt(adjoint);
  o.data = {{"roundtrip_rel", roundtrip}, {"parseval_rel", parseval}, {"helmholtz_identity", inverse},
            {"green_identity", green}, {"self_adjoint_rel", adjoint}};
  return o;
}

// 2. local and nonlocal forms agree
Outcome equivalence() {
  std::mt19937_64 rng(2);
  const Grid g = make_grid(256, 2.0 * kPi);
  Outcome o;
  double worst = 0.0;
  for (PresetName name : {PresetName::ch, PresetName::dp, PresetName::novikov, PresetName::forq}) {
    const Params p = preset(name);
    Dynamics dyn(p, g);
    double w = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Field u = normalized_random(g, g.n / 6, rng);
      w = std::max(w, dyn.local_form_residual(u, dyn.rhs(u, 0.0)).max_abs());
    }
    o.data[std::string(to_string(name))] = w;
    worst = std::max(worst, w);
  }
  o.pass = worst <= 1e-8;
  o.detail = "max residual " + fmt(worst) + " (tol 1e-8)";
  return o;
}

// 3. manufactured-solution convergence
Outcome mms() {
  Outcome o;
  o.pass = true;
  std::string detail;
  const Grid g = make_grid(128, 2.0 * kPi);
  for (PresetName name : {PresetName::novikov, PresetName::forq}) {
    const auto levels = mms_study(preset(name), g, 0.1, 1.0, 0.2, 5);
    json rows = json::array();
    double lo = 1e9, hi = -1e9;
    for (const MmsLevel& l : levels) {
      rows.push_back({{"dt", l.dt}, {"max_error", l.max_error},
                      {"observed_order", l.observed_order ? json(*l.observed_order) : json(nullptr)}});
      if (l.observed_order) {
        lo = std::min(lo, *l.observed_order);
        hi = std::max(hi, *l.observed_order);
      }
    }
    const double finest = levels.back().max_error;
    const bool ok = lo >= 3.8 && hi <= 4.2 && finest <= 1e-8;
    o.pass = o.pass && ok;
    o.data[std::string(to_string(name))] = rows;
    detail += std::string(to_string(name)) + " orders [" + fmt(lo) + ", " + fmt(hi) + "] finest error " + fmt(finest) + "; ";
  }
  o.detail = detail + "tol order 4 +- 0.2, error 1e-8";
  return o;
}

// 4. peakon speeds
Outcome peakon_speeds() {
  struct Case {
    PresetName name;
    double gamma;
    double expected;
  };
  const std::vector<Case> cases = {{PresetName::ch, 1.0, 1.0},
                                   {PresetName::dp, 1.0, 1.0},
                                   {PresetName::novikov, std::sqrt(2.0), 2.0},
                                   {PresetName::forq, 1.0, 2.0 / 3.0}};
  // The 3 dx mollifier lowers the crest; the speed error is first order in dx
  // and drops under 2% for every preset at n = 32768.
  const Grid g = make_grid(32768, 40.0 * kPi);
  std::vector<std::future<std::pair<double, Trajectory>>> jobs;
  for (const Case& c : cases) {
    jobs.push_back(std::async(std::launch::async, [&g, c] {
      SimConfig cfg{.params = preset(c.name), .grid = g, .t_end = 5.0, .output_stride = 20};
      Trajectory tr = simulate(cfg, mollified_profile({.shape = ProfileShape::peakon, .gamma = c.gamma}, g));
      const double speed = crest_track(tr).speed;
      return std::make_pair(speed, std::move(tr));
    }));
  }
  Outcome o;
  o.pass = true;
  std::string detail;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto [speed, tr] = jobs[i].get();
    const std::string name(to_string(cases[i].name));
    const double rel = (speed - cases[i].expected) / cases[i].expected;
    o.pass = o.pass && tr.status == RunStatus::completed && std::abs(rel) <= 0.02;
    o.data[name] = {{"gamma", cases[i].gamma}, {"expected", cases[i].expected}, {"measured", speed}, {"rel_error", rel}};
    detail += name + " " + fmt(speed) + " (" + fmt(100 * rel) + "%) ";
    record_growth("peakon_" + name, tr);
  }
  o.detail = detail + "tol 2%";
  return o;
}

// 5. H1 conservation dichotomy
Outcome h1_dichotomy() {
  const Grid g = make_grid(512, 2.0 * kPi);
  const Field u0 = mollified_profile({.shape = ProfileShape::sine_bump, .gamma = 0.5, .width = kPi / 2}, g);
  auto drift = [&](const Params& p, const std::string& label) {
    SimConfig cfg{.params = p, .grid = g, .t_end = 1.0, .output_stride = 10};
    const Trajectory tr = simulate(cfg, u0);
    record_growth("h1_" + label, tr);
    return tr.status == RunStatus::completed ? h1_drift(tr) : std::nan("");
  };
  const double nov = drift(preset(PresetName::novikov), "novikov");
  const double forq = drift(preset(PresetName::forq), "forq");
  const double off = drift(validate(2, 0.0, 1.0, 1.0), "k2_a0_b1_c1");
  Outcome o;
  o.pass = nov <= 1e-7 && forq <= 1e-7 && off >= 1e-4;
  o.detail = "novikov " + fmt(nov) + ", forq " + fmt(forq) + " (tol 1e-7); (2,0,1,1) " + fmt(off) + " (need >= 1e-4)";
  o.data = {{"novikov", nov}, {"forq", forq}, {"k2_a0_b1_c1", off}, {"grid_n", 512}, {"length", g.length},
            {"profile", "0.5 sin(x) bump(pi/2)"}};
  return o;
}

// 6. persistence of exponential decay
Outcome persistence() {
  // Below n = 4096 the Novikov crest is under-resolved and grid-scale noise
  // of ~1e-8 reaches the far end of the u_x window, dragging r2 under 0.995.
  const Grid g = make_grid(4096, 40.0 * kPi);
  const Field u0 = mollified_profile({.shape = ProfileShape::exp_tail, .gamma = 1.0, .theta = 0.5}, g);
  Outcome o;
  o.pass = true;
  std::string detail;
  for (PresetName name : {PresetName::ch, PresetName::novikov}) {
    SimConfig cfg{.params = preset(name), .grid = g, .t_end = 1.0, .output_stride = 5};
    const Trajectory tr = simulate(cfg, u0);
    const std::string label(to_string(name));
    record_growth("persistence_" + label, tr);
    const PersistenceReport rep = persistence_report(tr, 0.5);
    const double mu = rep.min_theta_u.value_or(std::nan("")), mux = rep.min_theta_ux.value_or(std::nan(""));
    const bool ok = tr.status == RunStatus::completed && mu >= 0.45 && mux >= 0.45 && rep.min_r2 >= kExponentialR2 &&
                    !rep.any_floor_hit;
    o.pass = o.pass && ok;
    o.data[label] = {{"min_theta_u", mu}, {"min_theta_ux", mux}, {"min_r2", rep.min_r2},
                     {"floor_hit", rep.any_floor_hit}, {"fits", rep.series.size()}};
    detail += label + " theta_u " + fmt(mu) + " theta_ux " + fmt(mux) + " r2 " + fmt(rep.min_r2) + "; ";
  }
  o.detail = detail + "need >= 0.45, r2 >= 0.995, no floor";
  return o;
}

// 7. radiated e^{-x} tail from compact data
Outcome bump_tail() {
  const Grid g = make_grid(2048, 40.0 * kPi);
  SimConfig cfg{.params = preset(PresetName::ch), .grid = g, .t_end = 0.1, .output_stride = 1000};
  const Trajectory tr = simulate(cfg, mollified_profile({.shape = ProfileShape::bump, .width = 2.0}, g));
  record_growth("bump_tail_ch", tr);
  const DecayFit fit = decay_fit(tr.snapshots.back(), {4.0, 12.0}, Side::right);
  const double theta = fit.theta_hat.value_or(std::nan(""));
  Outcome o;
  o.pass = std::abs(theta - 1.0) <= 0.1 && fit.amplitude > 0.0 && !fit.floor_hit;
  o.detail = "theta_hat " + fmt(theta) + " amplitude " + fmt(fit.amplitude) + " r2 " + fmt(fit.r2) + " (tol 1 +- 0.1)";
  o.data = {{"theta_hat", theta}, {"amplitude", fit.amplitude}, {"r2", fit.r2}, {"window", {4.0, 12.0}},
            {"t", tr.times.back()}};
  return o;
}

// 8. Lagrangian conservation law
Outcome lagrangian() {
  auto residual = [](int n, double dt) {
    const Grid g = make_grid(n, 16.0 * kPi);
    SimConfig cfg{.params = preset(PresetName::novikov), .grid = g, .t_end = 0.5, .output_stride = 1};
    cfg.fixed_dt = dt;
    const Trajectory tr = simulate(cfg, mollified_profile({.shape = ProfileShape::sech, .gamma = 0.5}, g));
    record_growth("lagrangian_n" + std::to_string(n), tr);
    std::vector<double> seeds;
    for (int i = 0; i < 16; ++i) seeds.push_back(g.center() - 2.0 + 4.0 * i / 15.0);
    const ParticleSet ps = advect(tr, seeds, 2);
    return conservation_check(tr, ps, preset(PresetName::novikov));
  };
  const double coarse = residual(512, 0.01);
  const double fine = residual(1024, 0.005);
  Outcome o;
  o.pass = coarse <= 1e-4 && fine <= 0.5 * coarse;
  o.detail = "residual " + fmt(coarse) + " (n 512), " + fmt(fine) + " (n 1024); tol 1e-4 and halving";
  o.data = {{"residual_n512_dt0.01", coarse}, {"residual_n1024_dt0.005", fine}, {"ratio", coarse / fine}};
  return o;
}

// 9. scaling symmetry u -> lambda u(x, lambda^k t)
Outcome scaling() {
  const Grid g = make_grid(256, 16.0 * kPi);
  const double lambda = 2.0;
  const Field u0 = mollified_profile({.shape = ProfileShape::sech, .gamma = 0.5}, g);
  Field v0 = u0;
  for (auto& v : v0.values) v *= lambda;
  SimConfig cu{.params = preset(PresetName::novikov), .grid = g, .t_end = 1.0, .dt_max = 1e-2, .output_stride = 1};
  SimConfig cv = cu;
  cv.t_end = cu.t_end / 4.0;
  cv.dt_max = cu.dt_max / 4.0;
  const Trajectory tu = simulate(cu, u0);
  const Trajectory tv = simulate(cv, v0);
  record_growth("scaling_u", tu);
  record_growth("scaling_v", tv);
  double worst = tu.snapshots.size() == tv.snapshots.size() ? 0.0 : std::nan("");
  for (std::size_t i = 0; i < tu.snapshots.size() && i < tv.snapshots.size(); ++i) {
    Field s = tu.snapshots[i];
    for (auto& v : s.values) v *= lambda;
    worst = std::max(worst, max_abs_diff(s, tv.snapshots[i]) / s.max_abs());
    worst = std::max(worst, std::abs(4.0 * tv.times[i] - tu.times[i]));
  }
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = "max relative mismatch " + fmt(worst) + " over " + std::to_string(tu.snapshots.size()) + " times (tol 1e-6)";
  o.data = {{"max_rel", worst}, {"snapshots", tu.snapshots.size()}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string manifest_path = argc > 1 ? argv[1] : "acceptance_manifest.json";
  const std::vector<Criterion> criteria = {
      {1, "spectral kernel identities", 5, spectral_suite},
      {2, "local/nonlocal equivalence", 30, equivalence},
      {3, "MMS temporal convergence", 120, mms},
      {4, "peakon speeds", 300, peakon_speeds},
      {5, "H1 conservation dichotomy", 120, h1_dichotomy},
      {6, "persistence of exponential decay", 120, persistence},
      {7, "e^{-x} tail radiation from compact data", 60, bump_tail},
      {8, "Lagrangian conservation law", 120, lagrangian},
      {9, "scaling symmetry", 60, scaling},
  };

  json manifest = {{"criteria", json::array()}};
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.runtime_limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s: %s; %.1f s (limit %g s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.runtime_limit_s);
    std::fflush(stdout);
    manifest["criteria"].push_back({{"id", c.id}, {"name", c.name}, {"pass", pass}, {"runtime_s", secs},
                                    {"runtime_limit_s", c.runtime_limit_s}, {"detail", o.detail}, {"data", o.data}});
  }

  // 10. growth bound, warn-only
  int exceeded = 0;
  double worst_ratio = 0.0;
  for (const json& r : growth_log) {
    if (!r["exceeded_at"].is_null()) ++exceeded;
    worst_ratio = std::max(worst_ratio, r["ratio"].get<double>());
  }
  const bool bound_ok = exceeded == 0 && !growth_log.empty();
  std::printf("%s criterion 10: H^s growth bound 2^{1+1/k}||u0||: %zu runs recorded, %d exceed, worst sup/bound %.3g%s\n",
              bound_ok ? "PASS" : "FAIL", growth_log.size(), exceeded, worst_ratio,
              bound_ok ? "" : " (warn-only, not counted)");
  manifest["criteria"].push_back({{"id", 10}, {"name", "H^s growth bound"}, {"pass", bound_ok}, {"warn_only", true},
                                  {"data", {{"runs", growth_log}, {"hs_order", 3.0}}}});
  manifest["failures"] = failures;

  std::ofstream out(manifest_path);
  out << manifest.dump(2) << '\n';
  std::printf("%d of 9 gated criteria failed; manifest %s\n", failures, manifest_path.c_str());
  return failures == 0 ? 0 : 1;
}
