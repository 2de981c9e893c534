#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace swatom {

/// Point-atom state: position x (optical phase), momentum p (recoil units) and Bloch vector (u, v, z).
struct SemiclassicalState {
  double x = 0.0;
  double p = 0.0;
  double u = 0.0;
  double v = 0.0;
  double z = -1.0;

  double bloch_norm() const noexcept { return u * u + v * v + z * z; }
  std::array<double, 5> as_array() const noexcept { return {x, p, u, v, z}; }
  static SemiclassicalState from_array(const std::array<double, 5>& a) noexcept { return {a[0], a[1], a[2], a[3], a[4]}; }
};

struct ScParams {
  double detuning = 0.0;
  double recoil_frequency = 1e-3;
};

/// Relative drift limits for the two integrals of motion (W floored at unit scale).
struct DriftBudget {
  double energy = 1e-6;
  double bloch_norm = 1e-6;
};

struct TrajectoryRecord {
  std::vector<double> tau;
  std::vector<SemiclassicalState> states;
  std::vector<double> energy;
  std::vector<double> bloch_norm;

  double max_energy_drift() const noexcept;
  double max_bloch_drift() const noexcept;
};

/// Hamilton-Schroedinger equations:
///   x' = w_r p,  p' = -u sin x,  u' = D v,  v' = -D u + 2 z cos x,  z' = -2 v cos x.
SemiclassicalState rhs_sc(const SemiclassicalState& s, const ScParams& params) noexcept;

/// W = (w_r / 2) p^2 - u cos x - (D / 2) z.
double total_energy(const SemiclassicalState& s, const ScParams& params) noexcept;

/// One classical RK4 step of size h (h may be negative).
SemiclassicalState rk4_step(const SemiclassicalState& s, const ScParams& params, double h) noexcept;

/// Fixed-step RK4 trajectory from tau = 0 to tau_max (dt may be negative to integrate backwards).
/// A sample is recorded every `record_every` steps plus the final state. Throws IntegrityError
/// when the energy or Bloch-norm drift leaves the budget.
TrajectoryRecord integrate_sc(const SemiclassicalState& s0, const ScParams& params, double tau_max, double dt,
                              std::size_t record_every = 1, const DriftBudget& budget = {});

struct LyapunovOptions {
  double tau_total = 1e5;
  double renorm_interval = 1.0;
  double offset = 1e-8;
  double transient_fraction = 0.1;
  double dt = 1e-3;
  DriftBudget budget{};
};

/// Separation metric: Euclidean on (x, p sqrt(w_r), u, v, z).
double phase_distance(const SemiclassicalState& a, const SemiclassicalState& b, double recoil_frequency) noexcept;

/// Largest Lyapunov exponent by the two-trajectory (Benettin) method.
double lyapunov_max(const SemiclassicalState& s0, const ScParams& params, const LyapunovOptions& options = {});

struct EnsembleSpec {
  std::size_t size = 5;
  std::uint64_t seed = 1;
};

/// Initial conditions for the detuning sweep: x0 = 0, p = p0, Bloch vector uniform on the sphere.
std::vector<SemiclassicalState> sweep_ensemble(double p0, const EnsembleSpec& spec);

/// Median exponent over the ensemble for each detuning. Results are indexed like `detunings`
/// and do not depend on `workers`.
std::vector<double> lyapunov_sweep(std::span<const double> detunings, double recoil_frequency, double p0,
                                   const EnsembleSpec& ensemble, const LyapunovOptions& options = {},
                                   unsigned workers = 1);

struct PoincarePoint {
  double v = 0.0;
  double z = 0.0;
  int hemisphere = 0;   // sign of u at the crossing
  int node_parity = 0;  // sign of sin x at the crossing
  double tau = 0.0;
  std::size_t member = 0;
};

struct PoincareOptions {
  double tau_max = 1e5;
  double dt = 1e-3;
  double shell_tolerance = 1e-9;
  DriftBudget budget{};
};

/// Initial conditions on the energy shell W: Bloch vector uniform on the sphere, x uniform in
/// [0, 2 pi), p from the energy equation with a random sign (negative radicands are redrawn).
std::vector<SemiclassicalState> shell_ensemble(double energy, const ScParams& params, std::size_t size,
                                               std::uint64_t seed);

/// Crossings of the nodes cos x = 0, refined by bisection to |cos x| < 1e-10.
/// Throws InvalidParameter when a member is off the energy shell or off the Bloch sphere.
std::vector<PoincarePoint> poincare_section(std::span<const SemiclassicalState> ensemble, double energy,
                                            const ScParams& params, const PoincareOptions& options = {},
                                            unsigned workers = 1);

/// Local straight-line fit residual of a planar point set: median over points of
/// sqrt(lambda_min / lambda_max) of the covariance of each point's nearest neighbours.
/// Close to 0 for points on a smooth curve, O(1) for points filling an area.
double curve_residual(std::span<const PoincarePoint> points, std::size_t neighbours = 12);

enum class SectionShape { curve, area, undecided };

/// Residual cut-offs: below `curve_max` the points trace a closed curve (an island), above
/// `area_min` they fill a region (the chaotic sea).
struct ShapeThresholds {
  double curve_max = 0.1;
  double area_min = 0.4;
};

/// Classifies one member's section points by curve_residual. Fewer than neighbours + 1 points
/// is undecided.
SectionShape section_shape(std::span<const PoincarePoint> points, const ShapeThresholds& thresholds = {},
                           std::size_t neighbours = 12);

}  // namespace swatom
