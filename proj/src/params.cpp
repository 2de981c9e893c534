#include "swatom/params.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "swatom/errors.hpp"

namespace swatom {
namespace {

// CODATA 2018, exact.
constexpr double kHbar = 1.054571817e-34;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite, got " + std::to_string(value));
  }
}

}  // namespace

void MomentumGridSpec::validate() const {
  if (!std::isfinite(center)) throw InvalidParameter("grid center must be finite");
  if (half_span < 32) throw InvalidParameter("grid half_span must be >= 32, got " + std::to_string(half_span));
  if (subdivisions < 1) throw InvalidParameter("grid subdivisions must be >= 1, got " + std::to_string(subdivisions));
  const double points = 2.0 * half_span * static_cast<double>(subdivisions) + 1.0;
  if (points > static_cast<double>(std::numeric_limits<std::ptrdiff_t>::max()) / 64.0) {
    throw InvalidParameter("momentum grid is too large to address");
  }
}

void DimensionlessParams::validate() const {
  // Zero is admitted: it is the kinetic-free (Raman-Nath) limit used as an exact reference.
  if (!(recoil_frequency >= 0.0) || !std::isfinite(recoil_frequency)) {
    throw InvalidParameter("recoil_frequency must be >= 0 and finite, got " + std::to_string(recoil_frequency));
  }
  require_positive(packet_width, "packet_width");
  require_positive(dt, "dt");
  if (!std::isfinite(detuning)) throw InvalidParameter("detuning must be finite");
  if (!std::isfinite(initial_momentum)) throw InvalidParameter("initial_momentum must be finite");
  if (!std::isfinite(initial_position)) throw InvalidParameter("initial_position must be finite");
  if (!(tau_max >= 0.0) || !std::isfinite(tau_max)) throw InvalidParameter("tau_max must be >= 0");
  grid.validate();
}

DimensionlessParams normalize(const PhysicalParams& phys, const DimensionlessParams& defaults) {
  require_positive(phys.atomic_mass, "atomic_mass");
  require_positive(phys.wavelength, "wavelength");
  require_positive(phys.rabi_frequency, "rabi_frequency");
  require_positive(phys.transition_frequency, "transition_frequency");
  require_positive(phys.laser_frequency, "laser_frequency");

  const double k = 2.0 * std::numbers::pi / phys.wavelength;
  DimensionlessParams out = defaults;
  out.recoil_frequency = kHbar * k * k / (phys.atomic_mass * phys.rabi_frequency);
  out.detuning = (phys.laser_frequency - phys.transition_frequency) / phys.rabi_frequency;
  out.grid.center = out.initial_momentum;
  return out;
}

double doppler_shift(double recoil_frequency, double momentum) noexcept {
  return recoil_frequency * std::abs(momentum);
}

double doppler_shift(const DimensionlessParams& params, double momentum) noexcept {
  return doppler_shift(params.recoil_frequency, momentum);
}

}  // namespace swatom
