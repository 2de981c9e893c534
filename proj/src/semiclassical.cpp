#include "swatom/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swatom/errors.hpp"
#include "swatom/parallel.hpp"
#include "swatom/rng.hpp"

namespace swatom {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCrossingTolerance = 1e-10;

SemiclassicalState axpy(const SemiclassicalState& y, double h, const SemiclassicalState& k) noexcept {
  return {y.x + h * k.x, y.p + h * k.p, y.u + h * k.u, y.v + h * k.v, y.z + h * k.z};
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void sample_sphere(std::mt19937_64& rng, SemiclassicalState& s) {
  s.z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * kPi * uniform01(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - s.z * s.z));
  s.u = r * std::cos(phi);
  s.v = r * std::sin(phi);
}

// Tracks the two integrals against their initial values.
class DriftMonitor {
public:
  DriftMonitor(const SemiclassicalState& s0, const ScParams& params, const DriftBudget& budget)
      : params_(params), budget_(budget), energy0_(total_energy(s0, params)), bloch0_(s0.bloch_norm()) {}

  double energy_drift(const SemiclassicalState& s) const noexcept {
    return std::abs(total_energy(s, params_) - energy0_) / std::max(1.0, std::abs(energy0_));
  }
  double bloch_drift(const SemiclassicalState& s) const noexcept {
    return std::abs(s.bloch_norm() - bloch0_) / bloch0_;
  }
  void check(const SemiclassicalState& s, double tau) const {
    const double e = energy_drift(s);
    if (e > budget_.energy) throw IntegrityError("energy conservation", tau, "relative drift " + std::to_string(e));
    const double b = bloch_drift(s);
    if (b > budget_.bloch_norm) throw IntegrityError("Bloch-vector length", tau, "relative drift " + std::to_string(b));
  }

private:
  ScParams params_;
  DriftBudget budget_;
  double energy0_;
  double bloch0_;
};

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double TrajectoryRecord::max_energy_drift() const noexcept {
  double worst = 0.0;
  if (energy.empty()) return worst;
  for (const double e : energy) worst = std::max(worst, std::abs(e - energy.front()) / std::max(1.0, std::abs(energy.front())));
  return worst;
}

double TrajectoryRecord::max_bloch_drift() const noexcept {
  double worst = 0.0;
  if (bloch_norm.empty()) return worst;
  for (const double b : bloch_norm) worst = std::max(worst, std::abs(b - bloch_norm.front()) / bloch_norm.front());
  return worst;
}

SemiclassicalState rhs_sc(const SemiclassicalState& s, const ScParams& params) noexcept {
  const double c = std::cos(s.x);
  return {params.recoil_frequency * s.p,
          -s.u * std::sin(s.x),
          params.detuning * s.v,
          -params.detuning * s.u + 2.0 * s.z * c,
          -2.0 * s.v * c};
}

double total_energy(const SemiclassicalState& s, const ScParams& params) noexcept {
  return 0.5 * params.recoil_frequency * s.p * s.p - s.u * std::cos(s.x) - 0.5 * params.detuning * s.z;
}

SemiclassicalState rk4_step(const SemiclassicalState& s, const ScParams& params, double h) noexcept {
  const auto k1 = rhs_sc(s, params);
  const auto k2 = rhs_sc(axpy(s, 0.5 * h, k1), params);
  const auto k3 = rhs_sc(axpy(s, 0.5 * h, k2), params);
  const auto k4 = rhs_sc(axpy(s, h, k3), params);
  const double h6 = h / 6.0;
  const double h3 = h / 3.0;
  return {s.x + h6 * (k1.x + k4.x) + h3 * (k2.x + k3.x), s.p + h6 * (k1.p + k4.p) + h3 * (k2.p + k3.p),
          s.u + h6 * (k1.u + k4.u) + h3 * (k2.u + k3.u), s.v + h6 * (k1.v + k4.v) + h3 * (k2.v + k3.v),
          s.z + h6 * (k1.z + k4.z) + h3 * (k2.z + k3.z)};
}

TrajectoryRecord integrate_sc(const SemiclassicalState& s0, const ScParams& params, double tau_max, double dt,
                              std::size_t record_every, const DriftBudget& budget) {
  if (dt == 0.0 || !std::isfinite(dt)) throw InvalidParameter("dt must be non-zero and finite");
  if (!(tau_max >= 0.0)) throw InvalidParameter("tau_max must be >= 0");
  if (record_every == 0) record_every = 1;
  if (std::abs(s0.bloch_norm() - 1.0) > 1e-9) {
    throw InvalidParameter("initial Bloch vector must have unit length, got |B|^2=" + std::to_string(s0.bloch_norm()));
  }

  const double step_len = std::abs(dt);
  const auto steps = static_cast<std::size_t>(std::llround(tau_max / step_len));
  const double direction = dt > 0.0 ? 1.0 : -1.0;
  const DriftMonitor monitor(s0, params, budget);

  TrajectoryRecord rec;
  auto record = [&](const SemiclassicalState& s, double tau) {
    rec.tau.push_back(tau);
    rec.states.push_back(s);
    rec.energy.push_back(total_energy(s, params));
    rec.bloch_norm.push_back(s.bloch_norm());
  };

  SemiclassicalState s = s0;
  record(s, 0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    s = rk4_step(s, params, dt);
    const double tau = direction * step_len * static_cast<double>(k);
    if (k % record_every == 0 || k == steps) {
      monitor.check(s, tau);
      record(s, tau);
    }
  }
  return rec;
}

double phase_distance(const SemiclassicalState& a, const SemiclassicalState& b, double recoil_frequency) noexcept {
  const double w = std::sqrt(recoil_frequency);
  const double dx = a.x - b.x;
  const double dp = (a.p - b.p) * w;
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dp * dp + du * du + dv * dv + dz * dz);
}

double lyapunov_max(const SemiclassicalState& s0, const ScParams& params, const LyapunovOptions& options) {
  if (!(options.renorm_interval > 0.0) || !(options.dt > 0.0) || !(options.offset > 0.0)) {
    throw InvalidParameter("Lyapunov renorm_interval, dt and offset must be positive");
  }
  if (!(options.tau_total > options.renorm_interval)) {
    throw InvalidParameter("Lyapunov tau_total must exceed renorm_interval");
  }
  if (options.transient_fraction < 0.0 || options.transient_fraction >= 1.0) {
    throw InvalidParameter("Lyapunov transient_fraction must lie in [0, 1)");
  }

  const auto steps_per_interval = static_cast<std::size_t>(std::max(1LL, std::llround(options.renorm_interval / options.dt)));
  const double h = options.renorm_interval / static_cast<double>(steps_per_interval);
  const auto intervals = static_cast<std::size_t>(std::llround(options.tau_total / options.renorm_interval));
  const auto transient = static_cast<std::size_t>(std::floor(options.transient_fraction * static_cast<double>(intervals)));

  // Initial separation along the metric diagonal.
  const double e = options.offset / std::sqrt(5.0);
  const double w = std::sqrt(params.recoil_frequency);
  SemiclassicalState ref = s0;
  SemiclassicalState shadow{s0.x + e, s0.p + e / w, s0.u + e, s0.v + e, s0.z + e};
  const DriftMonitor monitor(s0, params, options.budget);

  double log_sum = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) {
    for (std::size_t i = 0; i < steps_per_interval; ++i) {
      ref = rk4_step(ref, params, h);
      shadow = rk4_step(shadow, params, h);
    }
    monitor.check(ref, static_cast<double>(k + 1) * options.renorm_interval);
    const double d = phase_distance(ref, shadow, params.recoil_frequency);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw IntegrityError("trajectory separation", static_cast<double>(k + 1) * options.renorm_interval,
                           "degenerate separation " + std::to_string(d));
    }
    if (k >= transient) log_sum += std::log(d / options.offset);
    const double scale = options.offset / d;
    shadow = {ref.x + (shadow.x - ref.x) * scale, ref.p + (shadow.p - ref.p) * scale,
              ref.u + (shadow.u - ref.u) * scale, ref.v + (shadow.v - ref.v) * scale,
              ref.z + (shadow.z - ref.z) * scale};
  }
  return log_sum / (static_cast<double>(intervals - transient) * options.renorm_interval);
}

std::vector<SemiclassicalState> sweep_ensemble(double p0, const EnsembleSpec& spec) {
  std::vector<SemiclassicalState> out(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    auto rng = stream_rng(spec.seed, "lyapunov-ensemble", i);
    out[i].x = 0.0;
    out[i].p = p0;
    sample_sphere(rng, out[i]);
  }
  return out;
}

std::vector<double> lyapunov_sweep(std::span<const double> detunings, double recoil_frequency, double p0,
                                   const EnsembleSpec& ensemble, const LyapunovOptions& options, unsigned workers) {
  if (detunings.empty()) throw InvalidParameter("detuning grid is empty");
  if (ensemble.size == 0) throw InvalidParameter("ensemble size must be positive");
  const auto members = sweep_ensemble(p0, ensemble);
  const std::size_t m = members.size();
  std::vector<double> exponents(detunings.size() * m);
  parallel_for(exponents.size(), workers, [&](std::size_t task) {
    const std::size_t id = task / m;
    const ScParams params{detunings[id], recoil_frequency};
    exponents[task] = lyapunov_max(members[task % m], params, options);
  });
  std::vector<double> out(detunings.size());
  for (std::size_t id = 0; id < detunings.size(); ++id) {
    out[id] = median({exponents.begin() + static_cast<std::ptrdiff_t>(id * m),
                      exponents.begin() + static_cast<std::ptrdiff_t>((id + 1) * m)});
  }
  return out;
}

std::vector<SemiclassicalState> shell_ensemble(double energy, const ScParams& params, std::size_t size,
                                               std::uint64_t seed) {
  if (!(params.recoil_frequency > 0.0)) throw InvalidParameter("recoil_frequency must be positive");
  std::vector<SemiclassicalState> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    auto rng = stream_rng(seed, "poincare-shell", i);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw InvalidParameter("energy shell W=" + std::to_string(energy) + " is empty");
      SemiclassicalState s;
      sample_sphere(rng, s);
      s.x = 2.0 * kPi * uniform01(rng);
      const double kinetic = energy + s.u * std::cos(s.x) + 0.5 * params.detuning * s.z;
      const bool negative = uniform01(rng) < 0.5;
      if (kinetic < 0.0) continue;
      s.p = std::sqrt(2.0 * kinetic / params.recoil_frequency) * (negative ? -1.0 : 1.0);
      out.push_back(s);
      break;
    }
  }
  return out;
}

std::vector<PoincarePoint> poincare_section(std::span<const SemiclassicalState> ensemble, double energy,
                                            const ScParams& params, const PoincareOptions& options,
                                            unsigned workers) {
  if (!(options.dt > 0.0)) throw InvalidParameter("dt must be positive");
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double off = std::abs(total_energy(ensemble[i], params) - energy);
    if (off >= options.shell_tolerance) {
      throw InvalidParameter("ensemble member " + std::to_string(i) + " is off the energy shell by " +
                             std::to_string(off));
    }
    if (std::abs(ensemble[i].bloch_norm() - 1.0) > 1e-9) {
      throw InvalidParameter("ensemble member " + std::to_string(i) + " is off the Bloch sphere");
    }
  }

  std::vector<std::vector<PoincarePoint>> per_member(ensemble.size());
  parallel_for(ensemble.size(), workers, [&](std::size_t member) {
    const DriftMonitor monitor(ensemble[member], params, options.budget);
    const auto steps = static_cast<std::size_t>(std::llround(options.tau_max / options.dt));
    auto& points = per_member[member];
    SemiclassicalState s = ensemble[member];
    double c_prev = std::cos(s.x);
    for (std::size_t k = 0; k < steps; ++k) {
      const SemiclassicalState next = rk4_step(s, params, options.dt);
      const double c_next = std::cos(next.x);
      if ((c_prev < 0.0 && c_next >= 0.0) || (c_prev > 0.0 && c_next <= 0.0)) {
        // Bisection on the sub-step length.
        double lo = 0.0;
        double hi = options.dt;
        SemiclassicalState hit = next;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          hit = rk4_step(s, params, mid);
          const double c_mid = std::cos(hit.x);
          if (std::abs(c_mid) < kCrossingTolerance) break;
          if ((c_mid < 0.0) == (c_prev < 0.0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        const double tau = options.dt * static_cast<double>(k) + (hi + lo) * 0.5;
        points.push_back({hit.v, hit.z, hit.u >= 0.0 ? 1 : -1, std::sin(hit.x) >= 0.0 ? 1 : -1, tau, member});
      }
      s = next;
      c_prev = c_next;
      if ((k + 1) % 4096 == 0) monitor.check(s, options.dt * static_cast<double>(k + 1));
    }
    monitor.check(s, options.dt * static_cast<double>(steps));
  });

  std::vector<PoincarePoint> out;
  for (auto& pts : per_member) out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

double curve_residual(std::span<const PoincarePoint> points, std::size_t neighbours) {
  const std::size_t n = points.size();
  if (n < neighbours + 1 || neighbours < 3) throw InvalidParameter("too few points for a local curve fit");
  std::vector<double> ratios;
  ratios.reserve(n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dv = points[j].v - points[i].v;
      const double dz = points[j].z - points[i].z;
      dist[j] = {dv * dv + dz * dz, j};
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours), dist.end());
    // Covariance of the point and its nearest neighbours.
    double mv = 0.0, mz = 0.0;
    for (std::size_t k = 0; k <= neighbours; ++k) {
      mv += points[dist[k].second].v;
      mz += points[dist[k].second].z;
    }
    const double cnt = static_cast<double>(neighbours + 1);
    mv /= cnt;
    mz /= cnt;
    double cvv = 0.0, czz = 0.0, cvz = 0.0;
    for (std::size_t k = 0; k <= neighbours; ++k) {
      const double dv = points[dist[k].second].v - mv;
      const double dz = points[dist[k].second].z - mz;
      cvv += dv * dv;
      czz += dz * dz;
      cvz += dv * dz;
    }
    const double tr = cvv + czz;
    const double det = cvv * czz - cvz * cvz;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double l_max = 0.5 * tr + disc;
    const double l_min = std::max(0.0, 0.5 * tr - disc);
    if (l_max > 0.0) ratios.push_back(std::sqrt(l_min / l_max));
  }
  return median(std::move(ratios));
}

SectionShape section_shape(std::span<const PoincarePoint> points, const ShapeThresholds& thresholds,
                           std::size_t neighbours) {
  if (points.size() < neighbours + 1) return SectionShape::undecided;
  const double r = curve_residual(points, neighbours);
  if (r < thresholds.curve_max) return SectionShape::curve;
  if (r > thresholds.area_min) return SectionShape::area;
  return SectionShape::undecided;
}

}  // namespace swatom
