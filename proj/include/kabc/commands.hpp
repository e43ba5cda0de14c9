#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kabc/config.hpp"

namespace kabc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBlowUp = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitIo = 4;

/// Ordered scalar results of one run; also the row content of a sweep.
using Summary = std::vector<std::pair<std::string, double>>;

struct RunResult {
  int exit_code = kExitOk;
  Summary summary;
  std::string message;
};

/// Initial data of a run: the snapshot file when given, else the profile.
Field initial_field(const RunSpec& spec);

struct MmsLevel {
  double dt = 0.0;
  double max_error = 0.0;
  /// log2 of the error ratio to the previous (coarser) level.
  std::optional<double> observed_order;
};

/// Manufactured-solution convergence study with u* = A sin(x - t): one
/// fixed-step run per level, dt0 halved each level.
std::vector<MmsLevel> mms_study(const Params& p, const Grid& grid, double amplitude, double t_end,
                                double dt0, int levels);

/// Executes one subcommand, writing artifacts under out_dir. Never throws for
/// physics or configuration failures; they map to exit codes.
RunResult run(const RunSpec& spec, const std::filesystem::path& out_dir);

}  // namespace kabc
