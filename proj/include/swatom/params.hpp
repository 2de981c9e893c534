#pragma once

#include <cstddef>

namespace swatom {

/// SI description of the atom and the standing-wave laser.
struct PhysicalParams {
  double atomic_mass = 0.0;           // kg
  double wavelength = 0.0;            // m
  double rabi_frequency = 0.0;        // rad/s
  double transition_frequency = 0.0;  // rad/s
  double laser_frequency = 0.0;       // rad/s
};

/// Uniform momentum grid in photon-recoil units.
///
/// Points are p_i = center + (i - half_span * Q) / Q for i in [0, 2 * half_span * Q].
/// Because the spacing is 1/Q, a shift of p by one recoil is an exact index shift of Q.
struct MomentumGridSpec {
  double center = 55.0;
  int half_span = 256;
  int subdivisions = 8;  // Q

  std::size_t size() const noexcept {
    return 2 * static_cast<std::size_t>(half_span) * static_cast<std::size_t>(subdivisions) + 1;
  }
  double spacing() const noexcept { return 1.0 / subdivisions; }
  double min() const noexcept { return center - half_span; }
  double max() const noexcept { return center + half_span; }
  double momentum(std::size_t i) const noexcept {
    return center + (static_cast<double>(i) - static_cast<double>(half_span) * subdivisions) / subdivisions;
  }
  /// Index shift corresponding to one photon recoil.
  std::size_t recoil_shift() const noexcept { return static_cast<std::size_t>(subdivisions); }

  void validate() const;
};

/// Dimensionless control parameters plus integration settings.
struct DimensionlessParams {
  double recoil_frequency = 1e-3;  // omega_r
  double detuning = 1.0;           // Delta
  double initial_momentum = 55.0;  // p0
  double packet_width = 2.0;       // sigma_p
  double initial_position = 0.0;   // x0
  MomentumGridSpec grid{};
  double dt = 1e-3;
  double tau_max = 1000.0;

  void validate() const;
};

/// Converts SI parameters into omega_r = hbar k^2 / (m Omega) and Delta = (omega_f - omega_a) / Omega.
/// Grid and integration fields are copied from `defaults`, with the grid centred on p0.
DimensionlessParams normalize(const PhysicalParams& phys, const DimensionlessParams& defaults = {});

/// Normalized Doppler shift omega_D = omega_r |p|.
double doppler_shift(double recoil_frequency, double momentum) noexcept;
double doppler_shift(const DimensionlessParams& params, double momentum) noexcept;

}  // namespace swatom
