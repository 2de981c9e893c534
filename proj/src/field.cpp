#include "swatom/field.hpp"

#include <algorithm>
#include <cmath>

namespace swatom {

bool Field2D::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace swatom
