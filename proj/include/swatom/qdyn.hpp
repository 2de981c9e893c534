#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "swatom/params.hpp"

namespace swatom {

using cplx = std::complex<double>;

/// Momentum-space amplitudes of the excited (a) and ground (b) states.
struct QuantumState {
  MomentumGridSpec grid{};
  std::vector<cplx> a;
  std::vector<cplx> b;
  double tau = 0.0;

  /// Sum of |a|^2 + |b|^2 weighted by the grid spacing.
  double norm() const noexcept;
  /// Probability in the outermost 5% of points on each side of the grid.
  double edge_mass() const noexcept;
};

struct MomentumDistribution {
  MomentumGridSpec grid{};
  std::vector<double> values;
  double tau = 0.0;

  double momentum(std::size_t i) const noexcept { return grid.momentum(i); }
  /// Probability in [p_lo, p_hi] (inclusive, Riemann sum).
  double mass_between(double p_lo, double p_hi) const noexcept;
};

/// Norm and edge-mass limits enforced by `evolve`.
struct IntegrityBudget {
  double norm_drift = 1e-6;
  double edge_mass = 1e-4;
};

/// Ground-state Gaussian packet centred on p0 with momentum std sigma_p at position x0.
QuantumState initial_packet(const DimensionlessParams& params);

/// Zero state on the grid described by `params`.
QuantumState zero_state(const MomentumGridSpec& grid);

/// Time derivatives (da, db) of the coupled amplitude equations. Missing neighbours beyond the
/// grid edge count as zero.
void rhs(const QuantumState& state, const DimensionlessParams& params, std::span<cplx> da, std::span<cplx> db);

struct StateDerivative {
  std::vector<cplx> da;
  std::vector<cplx> db;
};
StateDerivative rhs(const QuantumState& state, const DimensionlessParams& params);

/// Fixed-step RK4 propagator with preallocated stage buffers.
class Propagator {
public:
  using Observer = std::function<void(const QuantumState&)>;

  explicit Propagator(const DimensionlessParams& params, IntegrityBudget budget = {});

  /// Advances `state` to tau_target in place. The step is dt, shrunk uniformly so the last step
  /// lands exactly on tau_target. Throws IntegrityError on norm drift or edge mass beyond budget.
  void advance(QuantumState& state, double tau_target);

  /// Advances to tau_target and calls `observe` at tau = state.tau + k * sample_interval, k = 0, 1, ...
  /// (each sample is taken at the first step within half a step of its due time).
  void run(QuantumState& state, double tau_target, double sample_interval, const Observer& observe);

  const DimensionlessParams& params() const noexcept { return params_; }

private:
  void derivative(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> da, std::span<cplx> db) const;
  void step(double h);
  void check(const QuantumState& state, double reference_norm) const;

  DimensionlessParams params_;
  IntegrityBudget budget_;
  std::vector<double> diag_a_;
  std::vector<double> diag_b_;
  std::vector<cplx> ka_, kb_, y0_a_, y0_b_, acc_a_, acc_b_, tmp_a_, tmp_b_;
};

/// Returns `state` advanced to tau_target.
QuantumState evolve(QuantumState state, const DimensionlessParams& params, double tau_target);

MomentumDistribution momentum_distribution(const QuantumState& state);
double mean_momentum(const QuantumState& state) noexcept;

}  // namespace swatom
