#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "swatom/field.hpp"
#include "swatom/qdyn.hpp"

namespace swatom {

/// Position grid dual to a momentum grid: N points x_j = (j - (N-1)/2) dx with N dx = 2 pi / dp.
/// The box length 2 pi Q spans Q optical periods, and x = 0 is a grid point.
struct PositionGrid {
  std::size_t count = 0;
  double spacing = 0.0;

  double period() const noexcept { return spacing * static_cast<double>(count); }
  double at(std::size_t j) const noexcept {
    return (static_cast<double>(j) - 0.5 * static_cast<double>(count - 1)) * spacing;
  }
  double min() const noexcept { return at(0); }
  double max() const noexcept { return at(count - 1); }
};

PositionGrid position_grid(const MomentumGridSpec& grid);

struct PositionState {
  MomentumGridSpec momentum_grid{};
  PositionGrid grid{};
  std::vector<cplx> a;
  std::vector<cplx> b;
  double tau = 0.0;

  double norm() const noexcept;
  /// |a(x)|^2 + |b(x)|^2 per grid point.
  std::vector<double> density() const;
};

/// Discrete Fourier transform a(x) = dp / sqrt(2 pi) * sum_p exp(i p x) a(p) on the dual grid.
/// The prefactor makes the transform unitary between the two Riemann-sum measures.
PositionState to_position(const QuantumState& state);

/// Inverse of to_position.
QuantumState to_momentum(const PositionState& pos);

struct DressedOccupations {
  std::vector<double> plus;   // |C_+(x)|^2
  std::vector<double> minus;  // |C_-(x)|^2
};

/// Densities in the two dressed potentials, C_+ = a sin + b cos, C_- = a cos - b sin.
DressedOccupations dressed_occupations(const PositionState& pos, double detuning);

enum class Component { excited, ground };

std::string_view to_string(Component c) noexcept;

/// Restricts which rows (momenta) and columns (positions) of the Wigner function are evaluated.
/// Rows sit on the half-spacing grid p_min + s dp / 2.
struct WignerWindow {
  double p_min = -std::numeric_limits<double>::infinity();
  double p_max = std::numeric_limits<double>::infinity();
  std::size_t row_stride = 1;
  std::size_t x_stride = 1;
};

/// Callback receiving one Wigner row: its momentum, its values on the (strided) x grid, and the
/// largest imaginary residue seen while evaluating it.
using WignerRowSink = std::function<void(double p, std::span<const double> row, double imag_residue)>;

/// Evaluates W(x, p) = (dp / 2 pi) sum_{j+k=2s} exp(-i (p_k - p_j) x) phi_j conj(phi_k) row by row,
/// where phi is the component's amplitude on the half-spacing grid (grid values plus midpoints
/// interpolated through the one-period position amplitude). Pairs are a whole grid step apart, so
/// each row has the box period and periodic copies of the packet do not interfere inside the box.
///
/// Summing a row over x (weight dx) gives |phi(p)|^2; summing over p with weight dp / 2 gives the
/// component's position density. Requires an even number of subdivisions per recoil; throws
/// GridError otherwise.
void wigner_rows(const QuantumState& state, Component component, const WignerWindow& window,
                 const WignerRowSink& sink);

/// Wigner field over (x, p). The largest imaginary residue is recorded in metadata["imag_residue"].
Field2D wigner(const QuantumState& state, Component component, const WignerWindow& window = {});

/// Sum over x (weight dx) of the rows of a full-resolution Wigner field that sit on momentum grid
/// points. Reproduces |psi(p)|^2 of the selected component.
std::vector<double> wigner_momentum_marginal(const Field2D& field, const MomentumGridSpec& grid);

/// Sum over p (weight dp / 2) of a full-resolution Wigner field. Reproduces the position density.
std::vector<double> wigner_position_marginal(const Field2D& field);

/// Node lines of the standing wave in a co-moving frame: x = pi/2 + n pi - v tau, wrapped into the box.
struct NodeLines {
  std::vector<double> tau;
  std::vector<std::vector<double>> x;  // x[n][row]
};

struct ComovingField {
  Field2D field;
  NodeLines nodes;
};

/// Shifts each row (fixed tau = y) of a periodic (x, tau) field by -velocity * tau with periodic
/// wrap and linear interpolation. The x axis is taken to sample one period, i.e. period = count * step.
ComovingField comoving_frame(const Field2D& field, double velocity);

/// Mean over rows and node lines of |f(right) - f(left)|, where left/right are the two x samples
/// straddling the node line in that row (periodic).
double node_line_jump(const ComovingField& comoving);

}  // namespace swatom
