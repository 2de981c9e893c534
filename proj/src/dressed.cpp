#include "swatom/dressed.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "swatom/errors.hpp"

namespace swatom {

double MixingAngle::angle() const noexcept { return std::atan2(sin, cos); }

double MixingAngle::tan() const noexcept {
  if (cos == 0.0) return sin >= 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return sin / cos;
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::adiabatic: return "adiabatic";
    case Regime::resonant_following: return "resonant-following";
    case Regime::chaotic_crossing: return "chaotic-crossing";
  }
  return "unknown";
}

Quasienergies quasienergies(double x, double detuning) noexcept {
  const double c = std::cos(x);
  const double e = std::sqrt(0.25 * detuning * detuning + c * c);
  return {e, -e};
}

MixingAngle mixing_angle(double x, double detuning) noexcept {
  const double c = std::cos(x);
  const double half = 0.5 * detuning;
  const double e = std::sqrt(half * half + c * c);
  // Two equivalent forms of the E_plus eigenvector; each avoids cancellation for one sign of Delta.
  double s = 0.0;
  double k = 0.0;
  if (detuning >= 0.0) {
    s = -c;
    k = half + e;
    if (k == 0.0) {  // Delta = 0 exactly at a node: degenerate, pick |1>
      return {0.0, 1.0};
    }
  } else {
    s = e - half;
    k = -c;
  }
  const double r = std::hypot(s, k);
  return {s / r, k / r};
}

double potential_depth(double detuning) noexcept {
  return std::abs(std::sqrt(0.25 * detuning * detuning + 1.0) - 0.5 * std::abs(detuning));
}

GroundDecomposition ground_state_decomposition(double x, double detuning) noexcept {
  // <+|1> = cos(theta), <-|1> = -sin(theta), normalized to the cos(theta) >= 0 representative.
  MixingAngle m = mixing_angle(x, detuning);
  if (m.cos < 0.0) {
    m.cos = -m.cos;
    m.sin = -m.sin;
  }
  return {m.cos, -m.sin};
}

double lz_probability(double detuning, double doppler) {
  if (!(doppler > 0.0)) {
    throw InvalidParameter("Doppler shift must be positive, got " + std::to_string(doppler));
  }
  return std::exp(-std::numbers::pi * detuning * detuning / doppler);
}

RegimeVerdict classify_regime(double detuning, double doppler, const RegimeThresholds& thresholds) {
  RegimeVerdict v;
  v.p_lz = lz_probability(detuning, doppler);
  v.ratio = detuning * detuning / doppler;
  if (v.ratio >= thresholds.adiabatic_ratio) {
    v.regime = Regime::adiabatic;
  } else if (v.ratio <= thresholds.resonant_ratio) {
    v.regime = Regime::resonant_following;
  } else {
    v.regime = Regime::chaotic_crossing;
  }
  return v;
}

}  // namespace swatom
