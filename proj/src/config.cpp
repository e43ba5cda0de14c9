#include "kabc/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace kabc {

using nlohmann::json;

namespace {

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"preset", "params.preset"},     {"k", "params.k"},
      {"a", "params.a"},               {"b", "params.b"},
      {"c", "params.c"},               {"n", "grid.n"},
      {"length", "grid.length"},       {"profile", "profile.shape"},
      {"gamma", "profile.gamma"},      {"theta", "profile.theta"},
      {"width", "profile.width"},      {"moll_width", "profile.moll_width"},
      {"initial_file", "profile.file"}, {"t_end", "time.t_end"},
      {"cfl_safety", "time.cfl_safety"}, {"dt_max", "time.dt_max"},
      {"output_stride", "time.output_stride"}, {"fixed_dt", "time.fixed_dt"},
      {"filter", "time.filter"},       {"seeds", "lagrangian.seeds"},
      {"workers", "run.workers"},
  };
  return table;
}

bool is_canonical(const std::string& key) {
  for (const auto& [k, _] : config_reference()) {
    if (k == key) return true;
  }
  return false;
}

std::string canonical(const std::string& key) {
  auto it = aliases().find(key);
  return it == aliases().end() ? key : it->second;
}

void flatten(const json& node, const std::string& prefix, Settings& out) {
  if (node.is_object() && !(prefix.size() > 0 && node.empty())) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  out[prefix] = node;
}

// Maps a raw dotted key onto its canonical form, or returns empty if unknown.
std::string normalize_key(const std::string& raw) {
  const std::string sweep_prefix = "sweep.";
  if (raw.rfind(sweep_prefix, 0) == 0 && raw != "sweep.command") {
    const std::string inner = canonical(raw.substr(sweep_prefix.size()));
    if (inner.rfind(sweep_prefix, 0) == 0 || inner.rfind("run.", 0) == 0) return {};
    return is_canonical(inner) ? sweep_prefix + inner : std::string{};
  }
  const std::string key = canonical(raw);
  return is_canonical(key) ? key : std::string{};
}

class Reader {
public:
  explicit Reader(const Settings& s) : s_(s) {}

  bool has(const std::string& key) const { return s_.count(key) > 0 && !s_.at(key).is_null(); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return number(key);
  }
  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + key + "' must be finite");
    return d;
  }
  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    return integer(key);
  }
  int integer(const std::string& key) const {
    const double d = number(key);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("'" + key + "' must be an integer");
    return static_cast<int>(d);
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = s_.at(key);
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = s_.at(key);
    if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError("'" + key + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

private:
  const json& require(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required key '" + key + "'");
    return s_.at(key);
  }
  const Settings& s_;
};

Params resolve_params(const Reader& r, std::string& label) {
  static const std::vector<std::string> fields = {"params.k", "params.a", "params.b", "params.c"};
  if (!r.has("params.preset")) {
    for (const auto& f : fields) {
      if (!r.has(f)) throw ConfigError("without params.preset all of k, a, b, c are required (missing " + f + ")");
    }
    label = "custom";
    return validate(r.integer("params.k"), r.number("params.a"), r.number("params.b"),
                    r.number("params.c"));
  }
  const std::string name = r.string("params.preset", "");
  const PresetName preset_name = preset_from_string(name);
  label = name;
  std::set<std::string> allowed;
  PresetArgs args;
  switch (preset_name) {
    case PresetName::ab:
      allowed = {"params.a", "params.b"};
      args.a = r.number("params.a");
      args.b = r.number("params.b");
      break;
    case PresetName::gkbch:
      allowed = {"params.k", "params.b"};
      args.k = r.integer("params.k");
      args.b = r.number("params.b");
      break;
    case PresetName::bfam:
      allowed = {"params.b"};
      args.b = r.number("params.b");
      break;
    default:
      break;
  }
  for (const auto& f : fields) {
    if (r.has(f) && !allowed.count(f)) {
      throw ConfigError("'" + f + "' is not a free parameter of preset '" + name + "'");
    }
  }
  return preset(preset_name, args);
}

}  // namespace

Command command_from_string(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "peakon-verify") return Command::peakon_verify;
  if (name == "mms") return Command::mms;
  if (name == "decay-scan") return Command::decay_scan;
  if (name == "lagrangian") return Command::lagrangian;
  if (name == "sweep") return Command::sweep;
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::peakon_verify: return "peakon-verify";
    case Command::mms: return "mms";
    case Command::decay_scan: return "decay-scan";
    case Command::lagrangian: return "lagrangian";
    case Command::sweep: return "sweep";
  }
  return "?";
}

const std::vector<std::pair<std::string, std::string>>& config_reference() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"params.preset", "ch | dp | novikov | forq | ab | gkbch | bfam"},
      {"params.k", "degree index k (explicit, gkbch)"},
      {"params.a", "coefficient a (explicit, ab)"},
      {"params.b", "coefficient b (explicit, ab, gkbch, bfam)"},
      {"params.c", "coefficient c (explicit only)"},
      {"grid.n", "number of nodes, even, >= 8 (default 512)"},
      {"grid.length", "box length L (default 40 pi)"},
      {"profile.shape", "peakon | exp_tail | bump | sech | sine_bump | sine | zero (default peakon)"},
      {"profile.gamma", "amplitude (default 1)"},
      {"profile.theta", "exp_tail decay rate (default 0.5)"},
      {"profile.width", "bump half-width (default 1)"},
      {"profile.moll_width", "Gaussian mollifier std (default 3 dx)"},
      {"profile.file", "snapshot CSV used as initial data instead of a shape"},
      {"time.t_end", "final time (default 1)"},
      {"time.cfl_safety", "CFL safety factor in (0, 1] (default 0.4)"},
      {"time.dt_max", "largest step (default 0.01)"},
      {"time.output_stride", "store every n-th step (default 10)"},
      {"time.fixed_dt", "fixed step, disables CFL control"},
      {"time.filter", "exponential filter on the top sixth of modes (default false)"},
      {"time.hs_order", "Sobolev index s of the recorded H^s norm (default 3)"},
      {"decay.window", "[lo, hi] distance from box center (default [L/8, L/4])"},
      {"decay.side", "left | right (default right)"},
      {"decay.theta", "rate tested by decay-scan (default profile.theta for exp_tail, else 0.5)"},
      {"lagrangian.seeds", "seed positions relative to box center"},
      {"lagrangian.seed_count", "evenly spaced seeds when no list is given (default 16)"},
      {"lagrangian.seed_lo", "first evenly spaced seed (default -2)"},
      {"lagrangian.seed_hi", "last evenly spaced seed (default 2)"},
      {"mms.amplitude", "A in u* = A sin(x - t) (default 0.1)"},
      {"mms.levels", "number of step sizes (default 5)"},
      {"mms.dt0", "coarsest step, halved per level (default 0.2)"},
      {"sweep.command", "subcommand run at each sweep point (default simulate)"},
      {"run.workers", "sweep worker threads (default: hardware concurrency)"},
  };
  return keys;
}

Settings flatten_settings(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Settings raw;
  flatten(doc, "", raw);
  Settings out;
  std::vector<std::string> unknown;
  for (auto& [key, value] : raw) {
    const std::string norm = normalize_key(key);
    if (norm.empty()) {
      unknown.push_back(key);
      continue;
    }
    if (out.count(norm)) throw ConfigError("key '" + norm + "' given more than once");
    out[norm] = value;
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  return out;
}

void apply_overrides(Settings& settings, const std::vector<std::string>& overrides) {
  std::vector<std::string> unknown;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "' is not key=value");
    const std::string key = normalize_key(item.substr(0, eq));
    if (key.empty()) {
      unknown.push_back(item.substr(0, eq));
      continue;
    }
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    settings[key] = value;
  }
  if (!unknown.empty()) {
    std::string msg = "unknown override keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
}

RunSpec resolve(Command command, const Settings& settings) {
  const Reader r(settings);
  RunSpec spec;
  spec.command = command;
  spec.settings = settings;

  spec.params = resolve_params(r, spec.params_label);
  try {
    spec.grid = make_grid(r.integer("grid.n", 512), r.number("grid.length", 40.0 * std::numbers::pi));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  spec.profile.shape = profile_shape_from_string(r.string("profile.shape", "peakon"));
  spec.profile.gamma = r.number("profile.gamma", 1.0);
  spec.profile.theta = r.number("profile.theta", 0.5);
  spec.profile.width = r.number("profile.width", 1.0);
  if (r.has("profile.moll_width")) spec.profile.moll_width = r.number("profile.moll_width");
  if (r.has("profile.file")) spec.initial_file = r.string("profile.file", "");

  spec.t_end = r.number("time.t_end", 1.0);
  spec.cfl_safety = r.number("time.cfl_safety", 0.4);
  spec.dt_max = r.number("time.dt_max", 1e-2);
  spec.output_stride = r.integer("time.output_stride", 10);
  if (r.has("time.fixed_dt")) spec.fixed_dt = r.number("time.fixed_dt");
  spec.filter = r.boolean("time.filter", false);
  spec.hs_order = r.number("time.hs_order", 3.0);

  spec.decay_window = default_tail_window(spec.grid);
  if (r.has("decay.window")) {
    const auto w = r.numbers("decay.window");
    if (w.size() != 2) throw ConfigError("'decay.window' must have two entries");
    spec.decay_window = DecayWindow{w[0], w[1]};
  }
  const std::string side = r.string("decay.side", "right");
  if (side != "left" && side != "right") throw ConfigError("'decay.side' must be left or right");
  spec.decay_side = side == "left" ? Side::left : Side::right;
  const bool tail_theta = spec.profile.shape == ProfileShape::exp_tail && spec.profile.theta > 0.0 &&
                          spec.profile.theta < 1.0;
  spec.decay_theta = r.number("decay.theta", tail_theta ? spec.profile.theta : 0.5);

  if (r.has("lagrangian.seeds")) {
    spec.seeds = r.numbers("lagrangian.seeds");
  } else {
    const int count = r.integer("lagrangian.seed_count", 16);
    const double lo = r.number("lagrangian.seed_lo", -2.0);
    const double hi = r.number("lagrangian.seed_hi", 2.0);
    if (count < 1) throw ConfigError("'lagrangian.seed_count' must be positive");
    for (int i = 0; i < count; ++i) {
      spec.seeds.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
  }

  spec.mms_amplitude = r.number("mms.amplitude", 0.1);
  spec.mms_levels = r.integer("mms.levels", 5);
  spec.mms_dt0 = r.number("mms.dt0", 0.2);
  if (command == Command::mms) {
    const double periods = spec.grid.length / (2.0 * std::numbers::pi);
    if (std::abs(periods - std::round(periods)) > 1e-9 || std::round(periods) < 1) {
      throw ConfigError("mms needs grid.length to be a multiple of 2 pi");
    }
    if (spec.mms_levels < 2) throw ConfigError("'mms.levels' must be >= 2");
    if (!(spec.mms_dt0 > 0.0)) throw ConfigError("'mms.dt0' must be positive");
  }

  spec.sweep_command = command_from_string(r.string("sweep.command", "simulate"));
  if (spec.sweep_command == Command::sweep) throw ConfigError("sweep.command cannot be sweep");
  for (const auto& [key, value] : settings) {
    if (key.rfind("sweep.", 0) != 0 || key == "sweep.command") continue;
    if (!value.is_array() || value.empty()) {
      throw ConfigError("sweep axis '" + key + "' must be a non-empty array");
    }
    SweepAxis axis{key.substr(6), {}};
    for (const json& v : value) {
      if (v.is_number() && !std::isfinite(v.get<double>())) {
        throw ConfigError("sweep axis '" + key + "' has a non-finite value");
      }
      axis.values.push_back(v);
    }
    spec.sweep.push_back(std::move(axis));
  }
  if (command == Command::sweep && spec.sweep.empty()) throw ConfigError("sweep needs at least one axis");

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  spec.workers = r.integer("run.workers", static_cast<int>(hw));
  if (spec.workers < 1) throw ConfigError("'run.workers' must be positive");

  try {
    check_config(spec.sim_config());
  } catch (const ParamError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

SimConfig RunSpec::sim_config() const {
  SimConfig cfg;
  cfg.params = params;
  cfg.grid = grid;
  cfg.t_end = t_end;
  cfg.cfl_safety = cfl_safety;
  cfg.dt_max = dt_max;
  cfg.output_stride = output_stride;
  cfg.fixed_dt = fixed_dt;
  cfg.spectral_filter = filter;
  cfg.hs_order = hs_order;
  return cfg;
}

RunSpec parse_config_text(Command command, const std::string& text,
                          const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError("config is not well-formed JSON");
  Settings settings = flatten_settings(doc);
  apply_overrides(settings, overrides);
  return resolve(command, settings);
}

RunSpec parse_config(Command command, const std::filesystem::path& path,
                     const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(command, ss.str(), overrides);
}

std::vector<RunSpec> expand_sweep(const RunSpec& spec) {
  std::vector<Settings> points = {spec.settings};
  for (const SweepAxis& axis : spec.sweep) {
    std::vector<Settings> next;
    for (const Settings& base : points) {
      for (const json& v : axis.values) {
        Settings s = base;
        s[axis.key] = v;
        next.push_back(std::move(s));
      }
    }
    points = std::move(next);
  }
  std::vector<RunSpec> out;
  out.reserve(points.size());
  for (Settings& s : points) {
    for (auto it = s.begin(); it != s.end();) {
      it = it->first.rfind("sweep.", 0) == 0 ? s.erase(it) : std::next(it);
    }
    out.push_back(resolve(spec.sweep_command, s));
  }
  return out;
}

}  // namespace kabc
