#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kabc/commands.hpp"
#include "kabc/io.hpp"

namespace {

std::filesystem::path default_out(const std::string& command) {
  const char* root = std::getenv("KABC_OUT_ROOT");
  return std::filesystem::path(root ? root : "kabc_out") / command;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator for the k-abc family of wave equations"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool list_keys = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "advance initial data; write snapshots, diagnostics.csv and a manifest"},
      {"peakon-verify", "measure a mollified peakon's crest speed against (1 - a) gamma^k"},
      {"mms", "manufactured-solution temporal convergence table"},
      {"decay-scan", "exponential tail fits of u and u_x over a run"},
      {"lagrangian", "particle paths and the momentum conservation residual"},
      {"sweep", "one sub-run per point of the sweep axes, plus sweep.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--set", overrides, "override key=value (repeatable)");
    sub->add_option("--out", out_dir, "output directory (default $KABC_OUT_ROOT/<command>)");
  }
  app.add_flag("--list-keys", list_keys, "print the accepted config keys and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kabc::kExitConfig;
  }
  if (list_keys) {
    for (const auto& [key, help] : kabc::config_reference()) std::cout << key << "\t" << help << '\n';
    return kabc::kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kabc::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  kabc::RunSpec spec;
  try {
    const kabc::Command command = kabc::command_from_string(name);
    spec = config_path.empty() ? kabc::parse_config_text(command, "{}", overrides)
                               : kabc::parse_config(command, config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "kabc: configuration error: " << e.what() << '\n';
    return kabc::kExitConfig;
  }

  const std::filesystem::path out = out_dir.empty() ? default_out(name) : std::filesystem::path(out_dir);
  const kabc::RunResult res = kabc::run(spec, out);
  for (const auto& [key, value] : res.summary) {
    std::cout << key << " = " << kabc::format_double(value) << '\n';
  }
  if (!res.message.empty()) std::cerr << "kabc: " << res.message << '\n';
  std::cout << "artifacts: " << out.string() << " (exit " << res.exit_code << ")\n";
  return res.exit_code;
}
