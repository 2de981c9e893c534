#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace swatom {

/// Uniform axis stored as (min, max, count).
struct Axis {
  std::string label;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double step() const noexcept { return count > 1 ? (max - min) / static_cast<double>(count - 1) : 0.0; }
  double at(std::size_t i) const noexcept { return min + step() * static_cast<double>(i); }
};

/// Real scalar field on a 2-D grid, row-major with y as the row index.
struct Field2D {
  Axis x;
  Axis y;
  std::string value_label;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  Field2D() = default;
  Field2D(Axis x_axis, Axis y_axis, std::string label)
      : x(std::move(x_axis)), y(std::move(y_axis)), value_label(std::move(label)), values(x.count * y.count, 0.0) {}

  double& at(std::size_t ix, std::size_t iy) { return values[iy * x.count + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * x.count + ix]; }

  bool shape_ok() const noexcept { return values.size() == x.count * y.count; }
  bool all_finite() const noexcept;
};

}  // namespace swatom
