#include "swatom/phase_space.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "swatom/dressed.hpp"
#include "swatom/errors.hpp"
#include "swatom/io.hpp"

namespace swatom {
namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place 1-D complex DFT of fixed size. FFTW_ESTIMATE keeps plans (and results) reproducible.
class Dft {
public:
  Dft(std::size_t n, int sign) : n_(n) {
    std::lock_guard lock(planner_mutex());
    buf_ = fftw_alloc_complex(n);
    if (buf_ == nullptr) throw Error("fftw allocation failed");
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) {
      fftw_free(buf_);
      throw Error("fftw planning failed");
    }
  }
  ~Dft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::span<cplx> data() noexcept { return {reinterpret_cast<cplx*>(buf_), n_}; }
  void execute() noexcept { fftw_execute(plan_); }

private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// exp(2 pi i m M / N) for m in [0, N), with M = (N - 1) / 2.
std::vector<cplx> centring_phases(std::size_t n) {
  const std::size_t m_half = (n - 1) / 2;
  std::vector<cplx> ph(n);
  for (std::size_t m = 0; m < n; ++m) {
    // Reduce the integer product first so the angle stays small and exact.
    const std::size_t r = (m * m_half) % n;
    ph[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n));
  }
  return ph;
}

double wrap(double x, double lo, double period) {
  double r = std::fmod(x - lo, period);
  if (r < 0.0) r += period;
  return lo + r;
}

}  // namespace

PositionGrid position_grid(const MomentumGridSpec& grid) {
  PositionGrid g;
  g.count = grid.size();
  g.spacing = 2.0 * kPi / (grid.spacing() * static_cast<double>(g.count));
  return g;
}

double PositionState::norm() const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::norm(a[j]) + std::norm(b[j]);
  return sum * grid.spacing;
}

std::vector<double> PositionState::density() const {
  std::vector<double> d(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d[j] = std::norm(a[j]) + std::norm(b[j]);
  return d;
}

PositionState to_position(const QuantumState& state) {
  const std::size_t n = state.a.size();
  PositionState pos;
  pos.momentum_grid = state.grid;
  pos.grid = position_grid(state.grid);
  pos.tau = state.tau;
  pos.a.resize(n);
  pos.b.resize(n);

  const double dp = state.grid.spacing();
  const double scale = dp / std::sqrt(2.0 * kPi);
  const double p_min = state.grid.min();
  const auto centring = centring_phases(n);

  Dft dft(n, FFTW_BACKWARD);
  auto buf = dft.data();
  auto transform = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    for (std::size_t k = 0; k < n; ++k) buf[k] = in[k] * std::conj(centring[k]);
    dft.execute();
    for (std::size_t j = 0; j < n; ++j) out[j] = scale * std::polar(1.0, p_min * pos.grid.at(j)) * buf[j];
  };
  transform(state.a, pos.a);
  transform(state.b, pos.b);
  return pos;
}

QuantumState to_momentum(const PositionState& pos) {
  const std::size_t n = pos.a.size();
  QuantumState state;
  state.grid = pos.momentum_grid;
  state.tau = pos.tau;
  state.a.resize(n);
  state.b.resize(n);

  const double dp = state.grid.spacing();
  const double scale = std::sqrt(2.0 * kPi) / (dp * static_cast<double>(n));
  const double p_min = state.grid.min();
  const auto centring = centring_phases(n);

  Dft dft(n, FFTW_FORWARD);
  auto buf = dft.data();
  auto transform = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = in[j] * std::polar(1.0, -p_min * pos.grid.at(j));
    dft.execute();
    for (std::size_t k = 0; k < n; ++k) out[k] = scale * centring[k] * buf[k];
  };
  transform(pos.a, state.a);
  transform(pos.b, state.b);
  return state;
}

DressedOccupations dressed_occupations(const PositionState& pos, double detuning) {
  const std::size_t n = pos.a.size();
  DressedOccupations occ{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const MixingAngle m = mixing_angle(pos.grid.at(j), detuning);
    occ.plus[j] = std::norm(pos.a[j] * m.sin + pos.b[j] * m.cos);
    occ.minus[j] = std::norm(pos.a[j] * m.cos - pos.b[j] * m.sin);
  }
  return occ;
}

std::string_view to_string(Component c) noexcept { return c == Component::excited ? "excited" : "ground"; }

namespace {

// Amplitudes on the half-spacing grid p_min + m dp / 2, m in [0, 2N - 2]. Even m are the grid
// values; odd m are read off the one-period position amplitude, which is the band-limited
// interpolant of a packet confined to the box.
std::vector<cplx> half_grid_amplitudes(const QuantumState& state, Component component) {
  const std::size_t n = state.a.size();
  PositionState pos = to_position(state);
  auto& psi_x = component == Component::excited ? pos.a : pos.b;
  const double half = 0.5 * state.grid.spacing();
  for (std::size_t j = 0; j < n; ++j) psi_x[j] *= std::polar(1.0, -half * pos.grid.at(j));
  const QuantumState shifted = to_momentum(pos);
  const auto& mid = component == Component::excited ? shifted.a : shifted.b;
  const auto& psi = component == Component::excited ? state.a : state.b;

  std::vector<cplx> out(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) out[2 * i] = psi[i];
  for (std::size_t i = 0; i + 1 < n; ++i) out[2 * i + 1] = mid[i];
  return out;
}

}  // namespace

void wigner_rows(const QuantumState& state, Component component, const WignerWindow& window,
                 const WignerRowSink& sink) {
  if (state.grid.subdivisions % 2 != 0) {
    throw GridError("Wigner evaluation needs an even number of subdivisions per recoil, got " +
                    std::to_string(state.grid.subdivisions));
  }
  if (window.row_stride == 0 || window.x_stride == 0) throw InvalidParameter("Wigner strides must be positive");

  const std::size_t n = state.a.size();
  const auto phi = half_grid_amplitudes(state, component);
  const std::size_t nf = phi.size();
  const double dp = state.grid.spacing();
  const double p_min = state.grid.min();
  const double prefactor = dp / (2.0 * kPi);
  const auto centring = centring_phases(n);

  Dft dft(n, FFTW_FORWARD);
  auto buf = dft.data();
  std::vector<double> row;
  row.reserve(n / window.x_stride + 1);

  for (std::size_t s = 0; s < nf; s += window.row_stride) {
    const double p = p_min + 0.5 * dp * static_cast<double>(s);
    if (p < window.p_min || p > window.p_max) continue;

    std::fill(buf.begin(), buf.end(), cplx{});
    // Pairs (j, k) on the half grid with j + k = 2s; the momentum difference (k - j) dp / 2 is a
    // whole number r of grid steps, folded mod N onto the position grid.
    const std::size_t sum = 2 * s;
    const std::size_t j_lo = sum >= nf ? sum - (nf - 1) : 0;
    const std::size_t j_hi = std::min(sum, nf - 1);
    const auto ni = static_cast<std::ptrdiff_t>(n);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const std::size_t k = sum - j;
      const std::ptrdiff_t r = (static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(j)) / 2;
      const auto m = static_cast<std::size_t>(((r % ni) + ni) % ni);
      buf[m] += phi[j] * std::conj(phi[k]);
    }
    for (std::size_t m = 0; m < n; ++m) buf[m] *= centring[m];
    dft.execute();

    row.clear();
    double residue = 0.0;
    for (std::size_t i = 0; i < n; i += window.x_stride) {
      const cplx w = prefactor * buf[i];
      residue = std::max(residue, std::abs(w.imag()));
      row.push_back(w.real());
    }
    sink(p, row, residue);
  }
}

Field2D wigner(const QuantumState& state, Component component, const WignerWindow& window) {
  const auto xgrid = position_grid(state.grid);
  std::vector<double> values;
  std::vector<double> momenta;
  double residue = 0.0;
  wigner_rows(state, component, window, [&](double p, std::span<const double> row, double r) {
    momenta.push_back(p);
    values.insert(values.end(), row.begin(), row.end());
    residue = std::max(residue, r);
  });
  if (momenta.empty()) throw InvalidParameter("Wigner window selects no momentum rows");

  const std::size_t nx = (xgrid.count + window.x_stride - 1) / window.x_stride;
  Axis xa{"x", xgrid.min(), xgrid.at((nx - 1) * window.x_stride), nx};
  Axis pa{"p", momenta.front(), momenta.back(), momenta.size()};
  Field2D field(xa, pa, "W");
  field.values = std::move(values);
  field.metadata["component"] = std::string(to_string(component));
  field.metadata["tau"] = std::to_string(state.tau);
  field.metadata["imag_residue"] = std::to_string(residue);
  return field;
}

std::vector<double> wigner_momentum_marginal(const Field2D& field, const MomentumGridSpec& grid) {
  const double dx = field.x.step();
  const double half = 0.5 * grid.spacing();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t iy = 0; iy < field.y.count; ++iy) {
    // Rows midway between grid points carry the interpolated density and are skipped.
    const auto s = std::llround((field.y.at(iy) - grid.min()) / half);
    if (s < 0 || s % 2 != 0 || static_cast<std::size_t>(s / 2) >= out.size()) continue;
    double integral = 0.0;
    for (std::size_t ix = 0; ix < field.x.count; ++ix) integral += field.at(ix, iy);
    out[static_cast<std::size_t>(s / 2)] = integral * dx;
  }
  return out;
}

std::vector<double> wigner_position_marginal(const Field2D& field) {
  const double weight = field.y.step();
  std::vector<double> out(field.x.count, 0.0);
  for (std::size_t iy = 0; iy < field.y.count; ++iy) {
    for (std::size_t ix = 0; ix < field.x.count; ++ix) out[ix] += field.at(ix, iy) * weight;
  }
  return out;
}

ComovingField comoving_frame(const Field2D& field, double velocity) {
  const std::size_t nx = field.x.count;
  const double dx = field.x.step();
  const double period = dx * static_cast<double>(nx);
  const double x0 = field.x.min;

  ComovingField out;
  out.field = field;
  out.field.metadata["frame_velocity"] = format_double(velocity);

  for (std::size_t iy = 0; iy < field.y.count; ++iy) {
    const double shift = velocity * field.y.at(iy);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      // Co-moving x' samples the lab field at x' + v tau.
      const double pos = (wrap(field.x.at(ix) + shift, x0, period) - x0) / dx;
      const auto i0 = static_cast<std::size_t>(std::floor(pos)) % nx;
      const std::size_t i1 = (i0 + 1) % nx;
      const double f = pos - std::floor(pos);
      out.field.at(ix, iy) = (1.0 - f) * field.at(i0, iy) + f * field.at(i1, iy);
    }
  }

  const auto n_nodes = static_cast<std::size_t>(std::llround(period / kPi));
  out.nodes.tau.resize(field.y.count);
  out.nodes.x.assign(n_nodes, std::vector<double>(field.y.count));
  const double first = std::ceil((x0 - 0.5 * kPi) / kPi);
  for (std::size_t iy = 0; iy < field.y.count; ++iy) {
    const double tau = field.y.at(iy);
    out.nodes.tau[iy] = tau;
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const double lab = 0.5 * kPi + (first + static_cast<double>(n)) * kPi;
      out.nodes.x[n][iy] = wrap(lab - velocity * tau, x0, period);
    }
  }
  return out;
}

double node_line_jump(const ComovingField& comoving) {
  const Field2D& f = comoving.field;
  const std::size_t nx = f.x.count;
  if (nx < 2 || comoving.nodes.x.empty() || f.y.count == 0) return 0.0;
  const double dx = f.x.step();
  double total = 0.0;
  std::size_t samples = 0;
  for (const auto& line : comoving.nodes.x) {
    for (std::size_t iy = 0; iy < f.y.count; ++iy) {
      const auto left = static_cast<std::size_t>(std::floor((line[iy] - f.x.min) / dx)) % nx;
      total += std::abs(f.at((left + 1) % nx, iy) - f.at(left, iy));
      ++samples;
    }
  }
  return total / static_cast<double>(samples);
}

}  // namespace swatom
