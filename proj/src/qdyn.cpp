#include "swatom/qdyn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swatom/errors.hpp"

namespace swatom {
namespace {

std::size_t edge_points(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
}

// -i * w
inline cplx minus_i(cplx w) noexcept { return {w.imag(), -w.real()}; }

}  // namespace

double QuantumState::norm() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i]) + std::norm(b[i]);
  return sum * grid.spacing();
}

double QuantumState::edge_mass() const noexcept {
  const std::size_t n = a.size();
  const std::size_t edge = std::min(edge_points(n), n / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    sum += std::norm(a[i]) + std::norm(b[i]);
    sum += std::norm(a[n - 1 - i]) + std::norm(b[n - 1 - i]);
  }
  return sum * grid.spacing();
}

double MomentumDistribution::mass_between(double p_lo, double p_hi) const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double p = grid.momentum(i);
    if (p >= p_lo && p <= p_hi) sum += values[i];
  }
  return sum * grid.spacing();
}

QuantumState zero_state(const MomentumGridSpec& grid) {
  grid.validate();
  QuantumState s;
  s.grid = grid;
  s.a.assign(grid.size(), cplx{});
  s.b.assign(grid.size(), cplx{});
  return s;
}

QuantumState initial_packet(const DimensionlessParams& params) {
  params.validate();
  const auto& grid = params.grid;
  const double sigma = params.packet_width;
  if (sigma < 3.0 * grid.spacing()) {
    throw GridError("packet width " + std::to_string(sigma) + " is not resolvable with spacing " +
                    std::to_string(grid.spacing()));
  }
  const double span = 2.0 * grid.half_span;
  if (sigma > span / 4.0) {
    throw GridError("packet width " + std::to_string(sigma) + " exceeds a quarter of the grid span " +
                    std::to_string(span));
  }
  if (std::abs(params.initial_momentum - grid.center) + 6.0 * sigma > grid.half_span) {
    throw GridError("packet centred at p0=" + std::to_string(params.initial_momentum) +
                    " is truncated by the momentum grid");
  }

  QuantumState s = zero_state(grid);
  for (std::size_t i = 0; i < s.b.size(); ++i) {
    const double p = grid.momentum(i);
    const double dp = p - params.initial_momentum;
    const double envelope = std::exp(-dp * dp / (4.0 * sigma * sigma));
    s.b[i] = envelope * std::polar(1.0, -p * params.initial_position);
  }
  const double scale = 1.0 / std::sqrt(s.norm());
  for (auto& v : s.b) v *= scale;
  return s;
}

void rhs(const QuantumState& state, const DimensionlessParams& params, std::span<cplx> da, std::span<cplx> db) {
  const std::size_t n = state.a.size();
  const std::size_t q = state.grid.recoil_shift();
  const double half_delta = 0.5 * params.detuning;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = state.grid.momentum(i);
    const double kinetic = 0.5 * params.recoil_frequency * p * p;
    const cplx b_up = i + q < n ? state.b[i + q] : cplx{};
    const cplx b_dn = i >= q ? state.b[i - q] : cplx{};
    const cplx a_up = i + q < n ? state.a[i + q] : cplx{};
    const cplx a_dn = i >= q ? state.a[i - q] : cplx{};
    da[i] = minus_i((kinetic - half_delta) * state.a[i] - 0.5 * (b_up + b_dn));
    db[i] = minus_i((kinetic + half_delta) * state.b[i] - 0.5 * (a_up + a_dn));
  }
}

StateDerivative rhs(const QuantumState& state, const DimensionlessParams& params) {
  StateDerivative d{std::vector<cplx>(state.a.size()), std::vector<cplx>(state.b.size())};
  rhs(state, params, d.da, d.db);
  return d;
}

Propagator::Propagator(const DimensionlessParams& params, IntegrityBudget budget)
    : params_(params), budget_(budget) {
  params_.validate();
  const auto& grid = params_.grid;
  const std::size_t n = grid.size();
  const std::size_t q = grid.recoil_shift();
  diag_a_.resize(n);
  diag_b_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = grid.momentum(i);
    const double kinetic = 0.5 * params_.recoil_frequency * p * p;
    diag_a_[i] = kinetic - 0.5 * params_.detuning;
    diag_b_[i] = kinetic + 0.5 * params_.detuning;
  }
  ka_.resize(n);
  kb_.resize(n);
  // Padded by one recoil on each side so neighbour access needs no bounds checks.
  acc_a_.assign(n + 2 * q, cplx{});
  acc_b_.assign(n + 2 * q, cplx{});
  tmp_a_.assign(n + 2 * q, cplx{});
  tmp_b_.assign(n + 2 * q, cplx{});
}

void Propagator::derivative(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> da,
                            std::span<cplx> db) const {
  // a and b are padded views; da and db are not.
  const std::size_t n = diag_a_.size();
  const std::size_t q = params_.grid.recoil_shift();
  const cplx* pa = a.data() + q;
  const cplx* pb = b.data() + q;
  const double* wa = diag_a_.data();
  const double* wb = diag_b_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx ha = wa[i] * pa[i] - 0.5 * (pb[i + q] + pb[i - q]);
    const cplx hb = wb[i] * pb[i] - 0.5 * (pa[i + q] + pa[i - q]);
    da[i] = minus_i(ha);
    db[i] = minus_i(hb);
  }
}

// The running state lives in the padded acc_ buffers (see run).
void Propagator::step(double h) {
  const std::size_t n = diag_a_.size();
  const std::size_t q = params_.grid.recoil_shift();
  cplx* ya = acc_a_.data() + q;
  cplx* yb = acc_b_.data() + q;
  cplx* ta = tmp_a_.data() + q;
  cplx* tb = tmp_b_.data() + q;

  y0_a_.assign(ya, ya + n);
  y0_b_.assign(yb, yb + n);
  const cplx* y0a = y0_a_.data();
  const cplx* y0b = y0_b_.data();

  const double h2 = 0.5 * h;
  const double h3 = h / 3.0;
  const double h6 = h / 6.0;

  // k1
  derivative(acc_a_, acc_b_, ka_, kb_);
  for (std::size_t i = 0; i < n; ++i) {
    ta[i] = y0a[i] + h2 * ka_[i];
    tb[i] = y0b[i] + h2 * kb_[i];
    ya[i] = y0a[i] + h6 * ka_[i];
    yb[i] = y0b[i] + h6 * kb_[i];
  }
  // k2
  derivative(tmp_a_, tmp_b_, ka_, kb_);
  for (std::size_t i = 0; i < n; ++i) {
    ta[i] = y0a[i] + h2 * ka_[i];
    tb[i] = y0b[i] + h2 * kb_[i];
    ya[i] += h3 * ka_[i];
    yb[i] += h3 * kb_[i];
  }
  // k3
  derivative(tmp_a_, tmp_b_, ka_, kb_);
  for (std::size_t i = 0; i < n; ++i) {
    ta[i] = y0a[i] + h * ka_[i];
    tb[i] = y0b[i] + h * kb_[i];
    ya[i] += h3 * ka_[i];
    yb[i] += h3 * kb_[i];
  }
  // k4
  derivative(tmp_a_, tmp_b_, ka_, kb_);
  for (std::size_t i = 0; i < n; ++i) {
    ya[i] += h6 * ka_[i];
    yb[i] += h6 * kb_[i];
  }
}

void Propagator::check(const QuantumState& state, double reference_norm) const {
  const double drift = std::abs(state.norm() - reference_norm);
  if (drift > budget_.norm_drift) {
    throw IntegrityError("norm conservation", state.tau, "drift " + std::to_string(drift));
  }
  const double edge = state.edge_mass();
  if (edge > budget_.edge_mass) {
    throw IntegrityError("edge mass", state.tau, "edge probability " + std::to_string(edge));
  }
}

void Propagator::run(QuantumState& state, double tau_target, double sample_interval, const Observer& observe) {
  if (!(tau_target >= state.tau)) {
    throw InvalidParameter("tau_target " + std::to_string(tau_target) + " precedes state tau " +
                           std::to_string(state.tau));
  }
  if (state.grid.size() != diag_a_.size() || state.grid.recoil_shift() != params_.grid.recoil_shift() ||
      state.grid.center != params_.grid.center) {
    throw GridError("state grid does not match propagator grid");
  }
  if (observe && !(sample_interval > 0.0)) throw InvalidParameter("sample_interval must be positive");

  const std::size_t n = diag_a_.size();
  const std::size_t q = params_.grid.recoil_shift();
  const double reference_norm = state.norm();
  const double tau0 = state.tau;
  const double span = tau_target - tau0;
  const auto steps =
      static_cast<std::size_t>(std::ceil(span / params_.dt - 1e-9 * std::max(1.0, span / params_.dt)));
  const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;

  std::copy(state.a.begin(), state.a.end(), acc_a_.begin() + static_cast<std::ptrdiff_t>(q));
  std::copy(state.b.begin(), state.b.end(), acc_b_.begin() + static_cast<std::ptrdiff_t>(q));

  auto sync_out = [&](std::size_t done) {
    std::copy_n(acc_a_.begin() + static_cast<std::ptrdiff_t>(q), n, state.a.begin());
    std::copy_n(acc_b_.begin() + static_cast<std::ptrdiff_t>(q), n, state.b.begin());
    state.tau = done == steps ? tau_target : tau0 + h * static_cast<double>(done);
  };

  // Sample k is due once tau0 + k * interval is reached (to within half a step).
  std::size_t next_sample = 0;
  auto maybe_observe = [&](std::size_t done) {
    if (!observe) return;
    const double now = done == steps ? tau_target : tau0 + h * static_cast<double>(done);
    bool synced = false;
    while (tau0 + sample_interval * static_cast<double>(next_sample) <= now + 0.5 * h + 1e-12) {
      if (!synced) {
        sync_out(done);
        synced = true;
      }
      observe(state);
      ++next_sample;
    }
  };

  constexpr std::size_t kCheckEvery = 64;
  maybe_observe(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    step(h);
    if (k % kCheckEvery == 0 || k == steps) {
      sync_out(k);
      check(state, reference_norm);
    }
    maybe_observe(k);
  }
  sync_out(steps);
}

void Propagator::advance(QuantumState& state, double tau_target) { run(state, tau_target, 0.0, nullptr); }

QuantumState evolve(QuantumState state, const DimensionlessParams& params, double tau_target) {
  DimensionlessParams p = params;
  p.grid = state.grid;
  Propagator prop(p);
  prop.advance(state, tau_target);
  return state;
}

MomentumDistribution momentum_distribution(const QuantumState& state) {
  MomentumDistribution d;
  d.grid = state.grid;
  d.tau = state.tau;
  d.values.resize(state.a.size());
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = std::norm(state.a[i]) + std::norm(state.b[i]);
  return d;
}

double mean_momentum(const QuantumState& state) noexcept {
  double weighted = 0.0;
  for (std::size_t i = 0; i < state.a.size(); ++i) {
    weighted += state.grid.momentum(i) * (std::norm(state.a[i]) + std::norm(state.b[i]));
  }
  return weighted * state.grid.spacing();
}

}  // namespace swatom
