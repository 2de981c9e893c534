#pragma once

#include <string_view>

namespace swatom {

struct Quasienergies {
  double plus = 0.0;
  double minus = 0.0;
};

/// Mixing angle of the dressed basis, kept as a (sin, cos) pair so nodes are not singular.
///
///   |+> = sin(theta) |2> + cos(theta) |1>,   |-> = cos(theta) |2> - sin(theta) |1>
struct MixingAngle {
  double sin = 0.0;
  double cos = 1.0;

  double angle() const noexcept;
  /// tan(theta); infinite where cos(theta) vanishes.
  double tan() const noexcept;
};

/// Amplitudes of the bare ground state |1> on the dressed states |+> and |->.
struct GroundDecomposition {
  double plus = 0.0;
  double minus = 0.0;
};

enum class Regime { adiabatic, resonant_following, chaotic_crossing };

std::string_view to_string(Regime regime) noexcept;

struct RegimeThresholds {
  double adiabatic_ratio = 10.0;  // Delta^2 / omega_D at or above this is adiabatic
  double resonant_ratio = 0.1;    // at or below this is resonant-following
};

struct RegimeVerdict {
  double p_lz = 0.0;
  double ratio = 0.0;  // Delta^2 / omega_D
  Regime regime = Regime::chaotic_crossing;
};

/// E_plus/minus = +/- sqrt(Delta^2/4 + cos^2 x).
Quasienergies quasienergies(double x, double detuning) noexcept;

/// Dressed mixing angle at position x.
///
/// The pair is the normalized E_plus eigenvector (sin, cos) of the internal Hamiltonian
/// [[-Delta/2, -cos x], [-cos x, Delta/2]] in the bare (|2>, |1>) basis. For Delta >= 0 the sign is
/// fixed by cos(theta) >= 0; for Delta < 0 by sin(theta) >= 0, which keeps theta continuous
/// through the nodes in both cases (Delta = 0 is genuinely degenerate there).
MixingAngle mixing_angle(double x, double detuning) noexcept;

/// Depth |sqrt(Delta^2/4 + 1) - |Delta|/2| of the non-resonant optical potential.
double potential_depth(double detuning) noexcept;

/// |1> = c_plus |+> + c_minus |->, with c_plus = 1/sqrt(1+tan^2), c_minus = -tan/sqrt(1+tan^2).
GroundDecomposition ground_state_decomposition(double x, double detuning) noexcept;

/// Asymptotic Landau-Zener probability exp(-pi Delta^2 / omega_D). Throws InvalidParameter for
/// omega_D <= 0.
double lz_probability(double detuning, double doppler);

RegimeVerdict classify_regime(double detuning, double doppler, const RegimeThresholds& thresholds = {});

}  // namespace swatom
