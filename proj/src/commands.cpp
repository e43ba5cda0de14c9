#include "kabc/commands.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "kabc/io.hpp"
#include "kabc/lagrangian.hpp"

namespace kabc {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_opt(const std::optional<double>& v) { return format_double(v.value_or(kNaN)); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json settings_json(const Settings& s) {
  json out = json::object();
  for (const auto& [k, v] : s) out[k] = v;
  return out;
}

json base_manifest(const RunSpec& spec) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = to_string(spec.command);
  m["params"] = {{"label", spec.params_label},
                 {"k", spec.params.k},
                 {"a", spec.params.a},
                 {"b", spec.params.b},
                 {"c", spec.params.c},
                 {"h1_conserved", h1_conserved(spec.params)},
                 {"h1_condition", h1_condition_is_extrapolated(spec.params) ? "unverified-by-paper"
                                                                            : "stated"},
                 {"periodic_peakon_admissible", periodic_peakon_admissible(spec.params)}};
  m["grid"] = {{"n", spec.grid.n}, {"length", spec.grid.length}, {"dx", spec.grid.dx()}};
  m["time"] = {{"t_end", spec.t_end},
               {"cfl_safety", spec.cfl_safety},
               {"dt_max", spec.dt_max},
               {"output_stride", spec.output_stride},
               {"fixed_dt", spec.fixed_dt ? json(*spec.fixed_dt) : json(nullptr)},
               {"filter", spec.filter},
               {"hs_order", spec.hs_order}};
  m["settings"] = settings_json(spec.settings);
  m["versions"] = {{"kabc", kVersion}, {"fftw", std::string(fftw_version)}, {"compiler", __VERSION__}};
  m["created"] = timestamp();
  return m;
}

json growth_record(const Trajectory& traj, double hs_order) {
  const double hs0 = traj.scalars.front().hs_norm;
  return {{"hs_order", hs_order},
          {"hs_norm0", hs0},
          {"bound", traj.hs_bound},
          {"sup", traj.hs_sup},
          {"sup_over_norm0", hs0 > 0 ? json(traj.hs_sup / hs0) : json(nullptr)},
          {"within_bound", traj.hs_sup <= traj.hs_bound},
          {"exceeded_at", traj.hs_bound_exceeded_at ? json(*traj.hs_bound_exceeded_at) : json(nullptr)}};
}

json summary_json(const Summary& s) {
  json out = json::object();
  for (const auto& [k, v] : s) out[k] = number_or_null(v);
  return out;
}

void write_manifest(const std::filesystem::path& out_dir, json manifest,
                    std::chrono::steady_clock::time_point start) {
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (out_dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

std::string snapshot_name(std::size_t i) {
  std::ostringstream os;
  os << "u_" << std::setw(6) << std::setfill('0') << i << ".csv";
  return os.str();
}

Trajectory run_simulation(const RunSpec& spec, const SimConfig& cfg) {
  return simulate(cfg, initial_field(spec));
}

int status_code(const Trajectory& traj) {
  return traj.status == RunStatus::blow_up ? kExitBlowUp : kExitOk;
}

void annotate_status(json& m, const Trajectory& traj) {
  m["status"] = traj.status == RunStatus::blow_up ? "blow_up" : "completed";
  m["last_good_time"] = traj.last_good_time;
  if (!traj.message.empty()) m["message"] = traj.message;
}

// ---------------------------------------------------------------- simulate

RunResult cmd_simulate(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  const Trajectory traj = run_simulation(spec, spec.sim_config());
  Spectral sp(spec.grid);

  bool fits_enabled = true;
  try {
    decay_fit(traj.snapshots.front(), spec.decay_window, spec.decay_side);
  } catch (const std::invalid_argument&) {
    fits_enabled = false;
  }

  CsvWriter diag(out / "diagnostics.csv",
                 {"t", "hs_norm", "h1_sq", "dt", "crest_x", "theta_hat_u", "theta_hat_ux", "r2", "floor_hit"});
  json snaps = json::array();
  std::size_t rec = 0;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Field& u = traj.snapshots[i];
    const double t = traj.times[i];
    while (rec + 1 < traj.scalars.size() && traj.scalars[rec].t < t) ++rec;
    const StepRecord& r = traj.scalars[rec];
    double crest = kNaN;
    try {
      crest = crest_position(u);
    } catch (const std::invalid_argument&) {
    }
    std::optional<double> th_u, th_ux;
    double r2 = kNaN;
    bool floor_hit = false;
    if (fits_enabled) {
      const DecayFit fu = decay_fit(u, spec.decay_window, spec.decay_side);
      const DecayFit fux = decay_fit(sp.derivative(u, 1), spec.decay_window, spec.decay_side);
      th_u = fu.theta_hat;
      th_ux = fux.theta_hat;
      r2 = fu.r2;
      floor_hit = fu.floor_hit || fux.floor_hit;
    }
    diag.row({format_double(t), format_double(r.hs_norm), format_double(r.h1_sq), format_double(r.dt),
              format_double(crest), fmt_opt(th_u), fmt_opt(th_ux), format_double(r2),
              floor_hit ? "1" : "0"});
    const std::string name = snapshot_name(i);
    write_snapshot(u, out / "snapshots" / name);
    snaps.push_back({{"t", t}, {"file", "snapshots/" + name}});
  }
  diag.close();

  RunResult res;
  res.exit_code = status_code(traj);
  double drift = kNaN;
  try {
    drift = h1_drift(traj);
  } catch (const std::invalid_argument&) {
  }
  const double hs0 = traj.scalars.front().hs_norm;
  res.summary = {{"final_time", traj.last_good_time},
                 {"h1_drift", drift},
                 {"hs_sup_ratio", hs0 > 0 ? traj.hs_sup / hs0 : kNaN},
                 {"steps", static_cast<double>(traj.scalars.size() - 1)}};
  annotate_status(manifest, traj);
  manifest["snapshots"] = snaps;
  manifest["growth_bound"] = growth_record(traj, spec.hs_order);
  manifest["decay_fits"] = fits_enabled;
  return res;
}

// ----------------------------------------------------------- peakon-verify

RunResult cmd_peakon_verify(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  if (spec.profile.shape != ProfileShape::peakon || spec.initial_file) {
    throw ConfigError("peakon-verify needs profile.shape = peakon");
  }
  const PeakonSpec peakon = make_peakon(spec.profile.gamma, spec.params, PeakonDomain::line);
  const Trajectory traj = run_simulation(spec, spec.sim_config());
  RunResult res;
  res.exit_code = status_code(traj);
  const double expected = peakon.speed();
  double measured = kNaN;
  if (traj.snapshots.size() >= 2) measured = crest_track(traj).speed;
  const double rel = expected != 0.0 ? std::abs(measured - expected) / std::abs(expected)
                                     : std::abs(measured);
  const bool pass = rel <= 0.02;
  CsvWriter table(out / "peakon_verify.csv", {"label", "k", "a", "b", "c", "gamma", "expected_speed",
                                              "measured_speed", "rel_error", "within_2pct"});
  table.row({spec.params_label, std::to_string(spec.params.k), format_double(spec.params.a),
             format_double(spec.params.b), format_double(spec.params.c), format_double(peakon.gamma),
             format_double(expected), format_double(measured), format_double(rel), pass ? "1" : "0"});
  table.close();
  res.summary = {{"expected_speed", expected}, {"measured_speed", measured}, {"rel_error", rel}};
  annotate_status(manifest, traj);
  manifest["growth_bound"] = growth_record(traj, spec.hs_order);
  return res;
}

// -------------------------------------------------------------------- mms

RunResult cmd_mms(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  const auto levels = mms_study(spec.params, spec.grid, spec.mms_amplitude, spec.t_end, spec.mms_dt0,
                                spec.mms_levels);
  CsvWriter table(out / "mms.csv", {"level", "dt", "max_error", "observed_order"});
  for (std::size_t i = 0; i < levels.size(); ++i) {
    table.row({std::to_string(i), format_double(levels[i].dt), format_double(levels[i].max_error),
               fmt_opt(levels[i].observed_order)});
  }
  table.close();
  RunResult res;
  res.summary = {{"finest_dt", levels.back().dt},
                 {"finest_error", levels.back().max_error},
                 {"finest_order", levels.back().observed_order.value_or(kNaN)}};
  for (const MmsLevel& l : levels) {
    if (!std::isfinite(l.max_error)) res.exit_code = kExitBlowUp;
  }
  manifest["status"] = res.exit_code == kExitOk ? "completed" : "blow_up";
  return res;
}

// ------------------------------------------------------------- decay-scan

RunResult cmd_decay_scan(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  if (spec.decay_side != Side::right) {
    throw ConfigError("decay-scan reports the right tail; set decay.side = right");
  }
  const Trajectory traj = run_simulation(spec, spec.sim_config());
  const PersistenceReport rep = persistence_report(traj, spec.decay_theta, spec.decay_window);
  CsvWriter table(out / "decay_scan.csv", {"t", "theta_hat_u", "r2_u", "floor_hit_u", "theta_hat_ux",
                                           "r2_ux", "floor_hit_ux"});
  for (const PersistencePoint& p : rep.series) {
    table.row({format_double(p.t), fmt_opt(p.u.theta_hat), format_double(p.u.r2),
               p.u.floor_hit ? "1" : "0", fmt_opt(p.ux.theta_hat), format_double(p.ux.r2),
               p.ux.floor_hit ? "1" : "0"});
  }
  table.close();
  RunResult res;
  res.exit_code = status_code(traj);
  res.summary = {{"theta", rep.theta},
                 {"min_theta_u", rep.min_theta_u.value_or(kNaN)},
                 {"min_theta_ux", rep.min_theta_ux.value_or(kNaN)},
                 {"min_r2", rep.min_r2},
                 {"any_floor_hit", rep.any_floor_hit ? 1.0 : 0.0},
                 {"persists", rep.persists() ? 1.0 : 0.0}};
  annotate_status(manifest, traj);
  manifest["window"] = {spec.decay_window.lo, spec.decay_window.hi};
  manifest["growth_bound"] = growth_record(traj, spec.hs_order);
  return res;
}

// ------------------------------------------------------------- lagrangian

RunResult cmd_lagrangian(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  SimConfig cfg = spec.sim_config();
  cfg.output_stride = 1;
  const Trajectory traj = run_simulation(spec, cfg);
  std::vector<double> seeds;
  for (double s : spec.seeds) seeds.push_back(spec.grid.center() + s);

  RunResult res;
  res.exit_code = status_code(traj);
  annotate_status(manifest, traj);
  manifest["growth_bound"] = growth_record(traj, spec.hs_order);
  ParticleSet ps;
  try {
    ps = advect(traj, seeds, spec.params.k);
  } catch (const WaveBreaking& e) {
    res.exit_code = kExitBlowUp;
    res.message = e.what();
    manifest["status"] = "wave_breaking";
    manifest["message"] = e.what();
    return res;
  }
  const auto rows = particle_rows(traj, ps, spec.params);
  CsvWriter table(out / "particles.csv", {"seed", "t", "eta", "eta_x", "m_along", "invariant_residual"});
  for (const ParticleRow& r : rows) {
    table.row({format_double(r.seed), format_double(r.t), format_double(r.eta), format_double(r.eta_x),
               format_double(r.m_along), format_double(r.invariant_residual)});
  }
  table.close();
  double residual = kNaN;
  if (is_gkbch(spec.params)) residual = conservation_check(traj, ps, spec.params);
  int left = 0;
  for (bool b : ps.left_core) left += b ? 1 : 0;
  res.summary = {{"conservation_residual", residual}, {"particles_left_core", static_cast<double>(left)}};
  manifest["conservation_law_applies"] = is_gkbch(spec.params);
  return res;
}

RunResult dispatch(const RunSpec& spec, const std::filesystem::path& out, json& manifest);

// ------------------------------------------------------------------ sweep

RunResult cmd_sweep(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  const std::vector<RunSpec> runs = expand_sweep(spec);
  std::vector<RunResult> results(runs.size());
  std::atomic<std::size_t> next{0};
  auto dir_of = [&](std::size_t i) {
    std::ostringstream os;
    os << "run_" << std::setw(4) << std::setfill('0') << i;
    return out / os.str();
  };
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) results[i] = run(runs[i], dir_of(i));
  };
  const int n_workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<std::string> header = {"run"};
  for (const SweepAxis& a : spec.sweep) header.push_back(a.key);
  header.push_back("exit_code");
  std::vector<std::string> metric_names;
  for (const RunResult& r : results) {
    for (const auto& [k, _] : r.summary) {
      if (std::find(metric_names.begin(), metric_names.end(), k) == metric_names.end()) {
        metric_names.push_back(k);
      }
    }
  }
  for (const auto& k : metric_names) header.push_back(k);
  CsvWriter table(out / "sweep.csv", header);
  RunResult res;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> row = {dir_of(i).filename().string()};
    for (const SweepAxis& a : spec.sweep) {
      const json& v = runs[i].settings.at(a.key);
      row.push_back(v.is_number() ? format_double(v.get<double>())
                                  : (v.is_string() ? v.get<std::string>() : v.dump()));
    }
    row.push_back(std::to_string(results[i].exit_code));
    for (const auto& k : metric_names) {
      double v = kNaN;
      for (const auto& [name, value] : results[i].summary) {
        if (name == k) v = value;
      }
      row.push_back(format_double(v));
    }
    table.row(row);
    res.exit_code = std::max(res.exit_code, results[i].exit_code);
  }
  table.close();
  manifest["sweep_command"] = to_string(spec.sweep_command);
  manifest["runs"] = runs.size();
  return res;
}

RunResult dispatch(const RunSpec& spec, const std::filesystem::path& out, json& manifest) {
  switch (spec.command) {
    case Command::simulate: return cmd_simulate(spec, out, manifest);
    case Command::peakon_verify: return cmd_peakon_verify(spec, out, manifest);
    case Command::mms: return cmd_mms(spec, out, manifest);
    case Command::decay_scan: return cmd_decay_scan(spec, out, manifest);
    case Command::lagrangian: return cmd_lagrangian(spec, out, manifest);
    case Command::sweep: return cmd_sweep(spec, out, manifest);
  }
  throw ConfigError("unknown command");
}

}  // namespace

Field initial_field(const RunSpec& spec) {
  if (spec.initial_file) return read_snapshot(*spec.initial_file, spec.grid);
  return mollified_profile(spec.profile, spec.grid);
}

std::vector<MmsLevel> mms_study(const Params& p, const Grid& grid, double amplitude, double t_end,
                                double dt0, int levels) {
  ManufacturedSolution star;
  star.value = [amplitude](double x, double t) { return amplitude * std::sin(x - t); };
  star.time_derivative = [amplitude](double x, double t) { return -amplitude * std::cos(x - t); };

  std::vector<MmsLevel> out;
  double dt = dt0;
  for (int level = 0; level < levels; ++level, dt *= 0.5) {
    SimConfig cfg;
    cfg.params = p;
    cfg.grid = grid;
    cfg.t_end = t_end;
    cfg.fixed_dt = dt;
    cfg.output_stride = std::numeric_limits<int>::max();
    cfg.forcing = mms_forcing(star, p, grid);
    const Field u0 = sample(grid, [&](double x) { return star.value(x, 0.0); });
    const Trajectory traj = simulate(cfg, u0);
    MmsLevel lv;
    lv.dt = dt;
    if (traj.status != RunStatus::completed) {
      lv.max_error = kNaN;
    } else {
      const Field& u = traj.snapshots.back();
      double err = 0.0;
      for (int j = 0; j < grid.n; ++j) err = std::max(err, std::abs(u[j] - star.value(grid.node(j), t_end)));
      lv.max_error = err;
    }
    if (!out.empty() && lv.max_error > 0.0 && out.back().max_error > 0.0) {
      lv.observed_order = std::log2(out.back().max_error / lv.max_error);
    }
    out.push_back(lv);
  }
  return out;
}

RunResult run(const RunSpec& spec, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  json manifest = base_manifest(spec);
  RunResult res;
  try {
    std::filesystem::create_directories(out_dir);
    res = dispatch(spec, out_dir, manifest);
  } catch (const ConfigError& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
  } catch (const ParamError& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
  } catch (const GridMismatch& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
  } catch (const IoError& e) {
    res.exit_code = kExitIo;
    res.message = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    res.exit_code = kExitIo;
    res.message = e.what();
  } catch (const std::invalid_argument& e) {
    res.exit_code = kExitConfig;
    res.message = e.what();
  }
  manifest["exit_code"] = res.exit_code;
  manifest["summary"] = summary_json(res.summary);
  if (!res.message.empty()) manifest["error"] = res.message;
  try {
    write_manifest(out_dir, manifest, start);
  } catch (const std::exception& e) {
    if (res.exit_code == kExitOk) {
      res.exit_code = kExitIo;
      res.message = e.what();
    }
  }
  return res;
}

}  // namespace kabc
