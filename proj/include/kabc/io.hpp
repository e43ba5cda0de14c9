#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kabc/spectral.hpp"

namespace kabc {

/// File could not be read or written, or its contents are malformed.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips, at most 17 significant digits.
std::string format_double(double v);

/// CSV with header "x,u" and one row per node.
void write_snapshot(const Field& field, const std::filesystem::path& path);

/// Reads a snapshot written by write_snapshot. Throws GridMismatch when the
/// row count differs from grid.n and IoError on malformed content.
Field read_snapshot(const std::filesystem::path& path, const Grid& grid);

/// Small CSV writer: header then rows of already-formatted cells.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();

private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
};

}  // namespace kabc
