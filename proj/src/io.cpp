#include "kabc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kabc {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_snapshot(const Field& field, const std::filesystem::path& path) {
  CsvWriter out(path, {"x", "u"});
  for (int j = 0; j < field.grid.n; ++j) {
    out.row({format_double(field.grid.node(j)), format_double(field[static_cast<std::size_t>(j)])});
  }
  out.close();
}

Field read_snapshot(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "x,u") {
    throw IoError("snapshot " + path.string() + " lacks the 'x,u' header");
  }
  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("snapshot " + path.string() + ": malformed row " + std::to_string(lineno));
    }
    double v = 0.0;
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw IoError("snapshot " + path.string() + ": bad value on row " + std::to_string(lineno));
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(grid.n)) {
    throw GridMismatch("snapshot " + path.string() + " has " + std::to_string(values.size()) +
                       " rows, grid has " + std::to_string(grid.n));
  }
  return Field(grid, std::move(values));
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw IoError("cannot write " + path_.string());
  out << buffer_;
  if (!out) throw IoError("write failed for " + path_.string());
}

}  // namespace kabc
