#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kabc/diagnostics.hpp"
#include "kabc/dynamics.hpp"
#include "kabc/exact.hpp"

namespace kabc {

/// Malformed configuration: unknown keys, bad types, missing values.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Command { simulate, peakon_verify, mms, decay_scan, lagrangian, sweep };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

/// Flat view of a config: canonical dotted key -> JSON scalar or array.
using Settings = std::map<std::string, nlohmann::json>;

struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

/// A fully resolved run description.
struct RunSpec {
  Command command = Command::simulate;
  Settings settings;

  Params params;
  std::string params_label;
  Grid grid;
  ProfileSpec profile;
  std::optional<std::filesystem::path> initial_file;

  double t_end = 1.0;
  double cfl_safety = 0.4;
  double dt_max = 1e-2;
  int output_stride = 10;
  std::optional<double> fixed_dt;
  bool filter = false;
  double hs_order = 3.0;

  DecayWindow decay_window;
  Side decay_side = Side::right;
  double decay_theta = 0.5;

  /// Seed positions relative to the box center.
  std::vector<double> seeds;

  double mms_amplitude = 0.1;
  int mms_levels = 5;
  double mms_dt0 = 0.2;

  Command sweep_command = Command::simulate;
  std::vector<SweepAxis> sweep;
  int workers = 1;

  SimConfig sim_config() const;
};

/// Every accepted canonical key with a one-line description.
const std::vector<std::pair<std::string, std::string>>& config_reference();

/// Flattens a JSON object into dotted keys, maps short aliases onto
/// canonical keys, and rejects unknown keys (all of them listed).
Settings flatten_settings(const nlohmann::json& doc);

/// Applies "key=value" overrides. Values are parsed as JSON when possible,
/// otherwise kept as strings.
void apply_overrides(Settings& settings, const std::vector<std::string>& overrides);

/// Resolves settings into a RunSpec with defaults filled. Parameter errors
/// propagate as ParamError.
RunSpec resolve(Command command, const Settings& settings);

RunSpec parse_config(Command command, const std::filesystem::path& path,
                     const std::vector<std::string>& overrides = {});
RunSpec parse_config_text(Command command, const std::string& text,
                          const std::vector<std::string>& overrides = {});

/// Cartesian expansion of the sweep axes; each point is a resolved RunSpec
/// of spec.sweep_command.
std::vector<RunSpec> expand_sweep(const RunSpec& spec);

}  // namespace kabc
