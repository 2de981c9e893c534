#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "swatom/field.hpp"

namespace swatom {

/// Column-oriented numeric table.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;

  void add_row(std::vector<double> row) { rows.push_back(std::move(row)); }
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Writes `content` to `path` through a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Series file: `# key=value ...` metadata line, comma-separated column names, then one line per row.
std::string render_series(const Series& series);
void write_series(const Series& series, const std::filesystem::path& path);

/// Field file: metadata line declaring nx, ny and both axes as (min, max, count), a layout line,
/// then ny lines of nx comma-separated values (row-major, rows indexed by y).
std::string render_field(const Field2D& field);
void write_field(const Field2D& field, const std::filesystem::path& path);

/// Readers for the two formats above.
Series read_series(const std::filesystem::path& path);
Field2D read_field(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace swatom
