// Acceptance suite: one PASS/FAIL line per criterion with the measured values.
// Usage: swatom_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"

#include "swatom/config.hpp"
#include "swatom/dressed.hpp"
#include "swatom/errors.hpp"
#include "swatom/phase_space.hpp"
#include "swatom/presets.hpp"
#include "swatom/qdyn.hpp"
#include "swatom/semiclassical.hpp"

using namespace swatom;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLowMomentum = 20.0;  // |p| below this counts as trapped
constexpr double kTransient = 150.0;   // autocorrelation ignores the capture phase
constexpr double kWignerTime = 200.0;

struct Result {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------------------------
// Shared default-grid quantum runs.

struct WignerStats {
  double residue = 0.0;
  double momentum_marginal_error = 0.0;
  double position_marginal_error = 0.0;
  double support_area = 0.0;
};

struct QuantumRun {
  double detuning = 0.0;
  double max_norm_drift = 0.0;
  double min_mass_core = 1.0;  // p in [35, 75]
  double final_negative_mass = 0.0;
  double max_high_mass = 0.0;  // p >= 75
  std::vector<double> low_fraction;
  Field2D minus_lab;
  WignerStats wigner;
  double seconds = 0.0;
};

WignerStats wigner_stats(const QuantumState& s) {
  WignerStats st;
  const PositionGrid xg = position_grid(s.grid);
  const double dx = xg.spacing;
  const double half = 0.5 * s.grid.spacing();
  std::vector<double> xmarg(xg.count, 0.0);
  double wmax = 0.0;
  wigner_rows(s, Component::ground, {}, [&](double p, std::span<const double> row, double residue) {
    st.residue = std::max(st.residue, residue);
    double integral = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      integral += row[j];
      xmarg[j] += row[j] * half;
      wmax = std::max(wmax, std::abs(row[j]));
    }
    const auto sidx = std::llround((p - s.grid.min()) / half);
    if (sidx % 2 == 0) {
      const double want = std::norm(s.b[static_cast<std::size_t>(sidx / 2)]);
      st.momentum_marginal_error = std::max(st.momentum_marginal_error, std::abs(integral * dx - want));
    }
  });
  const PositionState pos = to_position(s);
  for (std::size_t j = 0; j < xg.count; ++j) {
    st.position_marginal_error = std::max(st.position_marginal_error, std::abs(xmarg[j] - std::norm(pos.b[j])));
  }
  std::size_t count = 0;
  wigner_rows(s, Component::ground, {}, [&](double, std::span<const double> row, double) {
    for (const double w : row) count += std::abs(w) > 0.01 * wmax ? 1 : 0;
  });
  st.support_area = static_cast<double>(count) * dx * half;
  return st;
}

QuantumRun run_quantum(double detuning) {
  const auto start = std::chrono::steady_clock::now();
  QuantumRun r;
  r.detuning = detuning;
  DimensionlessParams p;  // default grid, w_r = 1e-3, p0 = 55
  p.detuning = detuning;
  const double tau_max = 1000.0;
  const auto rows = static_cast<std::size_t>(tau_max) + 1;
  const PositionGrid xg = position_grid(p.grid);
  r.minus_lab = Field2D(Axis{"x", xg.min(), xg.max(), xg.count}, Axis{"tau", 0.0, tau_max, rows}, "minus");

  QuantumState s = initial_packet(p);
  Propagator prop(p);
  std::size_t row = 0;
  const double dp = p.grid.spacing();
  prop.run(s, tau_max, 1.0, [&](const QuantumState& st) {
    const MomentumDistribution d = momentum_distribution(st);
    r.max_norm_drift = std::max(r.max_norm_drift, std::abs(st.norm() - 1.0));
    r.min_mass_core = std::min(r.min_mass_core, d.mass_between(35.0, 75.0));
    r.max_high_mass = std::max(r.max_high_mass, d.mass_between(75.0, p.grid.max()));
    r.final_negative_mass = d.mass_between(p.grid.min(), -0.5 * dp);
    r.low_fraction.push_back(d.mass_between(-kLowMomentum, kLowMomentum) / st.norm());
    const DressedOccupations occ = dressed_occupations(to_position(st), detuning);
    std::copy(occ.minus.begin(), occ.minus.end(), r.minus_lab.values.begin() + static_cast<std::ptrdiff_t>(row * xg.count));
    ++row;
    if (std::abs(st.tau - kWignerTime) < 0.5 * p.dt) r.wigner = wigner_stats(st);
  });
  if (row != rows) throw Error("expected " + std::to_string(rows) + " samples, got " + std::to_string(row));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("  (quantum run at detuning %s: %.0f s)\n", fmt(detuning).c_str(), r.seconds);
  std::fflush(stdout);
  return r;
}

// Autocorrelation peaks of the low-|p| fraction after the transient, with a quadratic trend removed.
std::vector<std::pair<std::size_t, double>> autocorrelation_peaks(const std::vector<double>& series) {
  std::vector<double> x(series.begin() + static_cast<std::ptrdiff_t>(kTransient), series.end());
  const auto n = static_cast<double>(x.size());
  // Least-squares quadratic via normal equations on t in [-1, 1].
  double s[5] = {0, 0, 0, 0, 0}, b[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = 2.0 * static_cast<double>(i) / (n - 1.0) - 1.0;
    double tk = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += tk;
      if (k < 3) b[k] += tk * x[i];
      tk *= t;
    }
  }
  double m[3][4] = {{s[0], s[1], s[2], b[0]}, {s[1], s[2], s[3], b[1]}, {s[2], s[3], s[4], b[2]}};
  for (int c = 0; c < 3; ++c) {
    for (int r = c + 1; r < 3; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  double coef[3];
  for (int r = 2; r >= 0; --r) {
    double v = m[r][3];
    for (int k = r + 1; k < 3; ++k) v -= m[r][k] * coef[k];
    coef[r] = v / m[r][r];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = 2.0 * static_cast<double>(i) / (n - 1.0) - 1.0;
    x[i] -= coef[0] + coef[1] * t + coef[2] * t * t;
  }
  std::vector<double> ac(x.size() / 2);
  for (std::size_t lag = 0; lag < ac.size(); ++lag) {
    double sum = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i) sum += x[i] * x[i + lag];
    ac[lag] = sum;
  }
  std::vector<std::pair<std::size_t, double>> peaks;
  for (std::size_t lag = 1; lag + 1 < ac.size(); ++lag) {
    if (ac[lag] > 0.0 && ac[lag] > ac[lag - 1] && ac[lag] >= ac[lag + 1]) peaks.emplace_back(lag, ac[lag] / ac[0]);
  }
  return peaks;
}

std::map<double, QuantumRun>& quantum_runs() {
  static std::map<double, QuantumRun> runs;
  return runs;
}

const QuantumRun& quantum(double detuning) {
  auto& runs = quantum_runs();
  auto it = runs.find(detuning);
  if (it == runs.end()) it = runs.emplace(detuning, run_quantum(detuning)).first;
  return it->second;
}

// ---------------------------------------------------------------------------------------------

Result closed_form() {
  Result r;
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  const Quasienergies e0 = quasienergies(0.0, 0.0);
  const Quasienergies e1 = quasienergies(kPi / 2, 0.2);
  const Quasienergies e2 = quasienergies(0.0, 1.0);
  r.check(near(e0.plus, 1.0, 1e-15) && near(e0.minus, -1.0, 1e-15) && near(e1.plus, 0.1, 1e-15) &&
              near(e1.minus, -0.1, 1e-15) && near(e2.plus, 1.1180339887498949, 1e-15) &&
              near(e2.minus, -1.1180339887498949, 1e-15),
          "quasienergies");
  r.check(near(mixing_angle(0.0, 0.0).tan(), -1.0, 1e-15) &&
              near(mixing_angle(0.0, 0.2).tan(), 0.1 - std::sqrt(1.01), 1e-15) &&
              near(mixing_angle(0.0, 0.2).tan(), -0.9049876, 1e-7),
          "mixing angle");
  r.check(near(potential_depth(0.0), 1.0, 1e-15) && near(potential_depth(2.0), 0.4142136, 1e-7), "depth");
  const GroundDecomposition g = ground_state_decomposition(0.0, 0.2);
  const GroundDecomposition g0 = ground_state_decomposition(0.0, 0.0);
  r.check(near(std::abs(g.plus), 0.74, 0.02) && near(std::abs(g.minus), 0.66, 0.02) &&
              near(g.plus * g.plus + g.minus * g.minus, 1.0, 1e-15) &&
              near(std::abs(g0.plus), 1.0 / std::sqrt(2.0), 1e-15) && near(std::abs(g0.minus), 1.0 / std::sqrt(2.0), 1e-15),
          "ground decomposition (" + fmt(std::abs(g.plus)) + ", " + fmt(std::abs(g.minus)) + ")");
  bool threw = false;
  try {
    lz_probability(0.2, 0.0);
  } catch (const InvalidParameter&) {
    threw = true;
  }
  r.check(lz_probability(0.0, 0.3) == 1.0 && near(lz_probability(1.0, 0.055), std::exp(-kPi / 0.055), 1e-35) &&
              near(lz_probability(0.2, 0.055), 0.1017, 5e-4) && threw,
          "Landau-Zener");
  r.check(classify_regime(1.0, 0.055).regime == Regime::adiabatic &&
              classify_regime(0.2, 0.055).regime == Regime::chaotic_crossing &&
              classify_regime(0.01, 0.055).regime == Regime::resonant_following,
          "regimes");
  return r;
}

Result regime_table() {
  Result r;
  const RegimeVerdict a = classify_regime(1.0, 0.055);
  const RegimeVerdict c = classify_regime(0.2, 0.055);
  r.check(a.regime == Regime::adiabatic && a.p_lz < 1e-20,
          "Delta=1: " + std::string(to_string(a.regime)) + ", P_LZ=" + fmt(a.p_lz));
  r.check(c.regime == Regime::chaotic_crossing && c.p_lz >= 0.08 && c.p_lz <= 0.13,
          "Delta=0.2: " + std::string(to_string(c.regime)) + ", P_LZ=" + fmt(c.p_lz));
  return r;
}

Result raman_nath() {
  Result r;
  DimensionlessParams p;
  p.recoil_frequency = 0.0;
  p.detuning = 0.0;
  p.grid.center = 0.0;
  p.grid.half_span = 40;
  p.initial_momentum = 0.0;
  const QuantumState s0 = initial_packet(p);
  const QuantumState s = evolve(s0, p, 1.0);
  const int q = p.grid.subdivisions;
  const auto n = static_cast<long long>(s.a.size());
  double worst = 0.0;
  for (long long i = 0; i < n; ++i) {
    cplx want_a{}, want_b{};
    for (int m = -20; m <= 20; ++m) {
      const long long src = i - static_cast<long long>(m) * q;
      if (src < 0 || src >= n) continue;
      const cplx c = s0.b[static_cast<std::size_t>(src)] * oracle::raman_nath(m, 1.0);
      (m % 2 == 0 ? want_b : want_a) += c;
    }
    worst = std::max({worst, std::abs(s.a[static_cast<std::size_t>(i)] - want_a),
                      std::abs(s.b[static_cast<std::size_t>(i)] - want_b)});
  }
  r.check(worst <= 1e-8, "max amplitude error over " + std::to_string(q) + " classes at tau=1: " + fmt(worst));
  return r;
}

Result conservation() {
  Result r;
  const double qd = std::max(quantum(1.0).max_norm_drift, quantum(0.2).max_norm_drift);
  r.check(qd <= 1e-8, "quantum norm drift " + fmt(qd));
  double bloch = 0.0, energy = 0.0;
  for (const double detuning : {1.0, 0.2}) {
    const auto rec = integrate_sc({0.0, 55.0, 0.0, 0.0, -1.0}, {detuning, 1e-3}, 1000.0, 1e-3, 1000);
    bloch = std::max(bloch, rec.max_bloch_drift());
    energy = std::max(energy, rec.max_energy_drift());
  }
  r.check(bloch <= 1e-9, "Bloch drift " + fmt(bloch));
  r.check(energy <= 1e-8, "W drift " + fmt(energy));
  return r;
}

Result regular_regime() {
  Result r;
  const double m = quantum(1.0).min_mass_core;
  r.check(m >= 0.99, "min mass in [35,75] " + fmt(m));
  return r;
}

Result chaotic_regime() {
  Result r;
  const QuantumRun& q = quantum(0.2);
  r.check(q.final_negative_mass >= 0.05, "mass at p<0 " + fmt(q.final_negative_mass));
  r.check(q.max_high_mass >= 1e-3, "mass at p>=75 " + fmt(q.max_high_mass));
  const auto peaks = autocorrelation_peaks(q.low_fraction);
  const double period = peaks.empty() ? 0.0 : static_cast<double>(peaks.front().first);
  std::string listed;
  for (std::size_t i = 0; i < std::min<std::size_t>(peaks.size(), 5); ++i) {
    listed += (i ? "," : "") + std::to_string(peaks[i].first);
  }
  r.check(period >= 280.0 * 0.85 && period <= 280.0 * 1.15,
          "low-|p| period " + fmt(period) + " (autocorrelation peaks at " + listed + ")");
  return r;
}

Result node_transitions() {
  Result r;
  const double v = 1e-3 * 55.0;
  const double j1 = node_line_jump(comoving_frame(quantum(1.0).minus_lab, v));
  const double j02 = node_line_jump(comoving_frame(quantum(0.2).minus_lab, v));
  r.check(j02 >= 10.0 * j1, "jump Delta=0.2 " + fmt(j02) + " vs Delta=1 " + fmt(j1) + " (ratio " + fmt(j02 / j1) + ")");
  return r;
}

Result wigner_checks() {
  Result r;
  const WignerStats& a = quantum(1.0).wigner;
  const WignerStats& b = quantum(0.2).wigner;
  r.check(std::max(a.residue, b.residue) < 1e-10, "imag residue " + fmt(std::max(a.residue, b.residue)));
  const double pm = std::max(a.momentum_marginal_error, b.momentum_marginal_error);
  const double xm = std::max(a.position_marginal_error, b.position_marginal_error);
  r.check(pm <= 1e-6 && xm <= 1e-6, "marginal errors p " + fmt(pm) + ", x " + fmt(xm));
  r.check(b.support_area >= 2.0 * a.support_area,
          "support area Delta=0.2 " + fmt(b.support_area) + " vs Delta=1 " + fmt(a.support_area));
  return r;
}

Result lyapunov() {
  Result r;
  const ExperimentConfig c = preset_defaults("fig7");
  LyapunovOptions opt;
  opt.tau_total = c.lyap_tau_total;
  opt.renorm_interval = c.lyap_renorm_interval;
  opt.offset = c.lyap_offset;
  opt.transient_fraction = c.lyap_transient_fraction;
  opt.dt = c.lyap_dt;
  const auto& grid = c.detuning_grid;
  const auto lambda = lyapunov_sweep(grid, c.params.recoil_frequency, c.params.initial_momentum,
                                     {c.ensemble_size, c.seed}, opt, worker_count_from_env());
  auto at = [&](double d) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - d) < 1e-12) return lambda[i];
    }
    throw Error("detuning " + fmt(d) + " not on the sweep grid");
  };
  const double step = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  std::string table;
  bool band = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table += (i ? " " : "") + fmt(grid[i]) + ":" + fmt(lambda[i]);
    if (lambda[i] > 5e-3 && !(grid[i] > 0.0 && grid[i] < 0.8 + step)) band = false;
  }
  r.check(at(0.0) < 5e-3, "lambda(0) " + fmt(at(0.0)));
  r.check(at(0.4) > 1e-2, "lambda(0.4) " + fmt(at(0.4)));
  r.check(at(1.2) < 5e-3, "lambda(1.2) " + fmt(at(1.2)));
  r.check(band, "positive band inside (0, 0.8] [" + table + "]");
  return r;
}

Result poincare() {
  Result r;
  const ExperimentConfig c = preset_defaults("fig8");
  const ScParams par{c.params.detuning, c.params.recoil_frequency};
  const auto ensemble = shell_ensemble(c.energy, par, c.ensemble_size, c.seed);
  PoincareOptions opt;
  opt.tau_max = c.poincare_tau_max;
  opt.dt = c.poincare_dt;
  const auto points = poincare_section(ensemble, c.energy, par, opt, worker_count_from_env());
  std::size_t upper = 0, lower = 0, curves = 0, areas = 0;
  for (const auto& pt : points) (pt.hemisphere > 0 ? upper : lower) += 1;
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    for (const int hemi : {1, -1}) {
      std::vector<PoincarePoint> own;
      for (const auto& pt : points) {
        if (pt.member == m && pt.hemisphere == hemi) own.push_back(pt);
      }
      const SectionShape shape = section_shape(own);
      curves += shape == SectionShape::curve ? 1 : 0;
      areas += shape == SectionShape::area ? 1 : 0;
    }
  }
  r.check(c.ensemble_size >= 20 && opt.tau_max <= 1e5, std::to_string(c.ensemble_size) + " members to tau " + fmt(opt.tau_max));
  r.check(upper > 0 && lower > 0, "points u>0 " + std::to_string(upper) + ", u<0 " + std::to_string(lower));
  r.check(curves > 0, "island sections " + std::to_string(curves));
  r.check(areas > 0, "sea sections " + std::to_string(areas));
  return r;
}

std::map<std::string, std::string> checksums(const RunManifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& f : m.files) out[f.path] = f.sha256;
  return out;
}

Result determinism() {
  Result r;
  const fs::path base = fs::temp_directory_path() / ("swatom_acceptance_" + std::to_string(::getpid()));
  auto run = [&](const std::string& preset, const std::string& tag, unsigned workers,
                 std::vector<std::pair<std::string, std::string>> o) {
    o.emplace_back("output_dir", (base / (preset + "_" + tag)).string());
    return checksums(run_preset(load_config(preset, {}, o), workers));
  };
  const std::vector<std::pair<std::string, std::string>> q{{"grid_half_span", "64"}, {"tau_max", "20"}};
  r.check(run("fig3", "a", 1, q) == run("fig3", "b", 1, q), "fig3 rerun identical");
  const std::vector<std::pair<std::string, std::string>> l{
      {"detuning_grid", "0,0.4,1.2"}, {"lyap_tau_total", "500"}, {"ensemble_size", "3"}};
  r.check(run("fig7", "a", 1, l) == run("fig7", "b", 1, l), "fig7 rerun identical");
  r.check(run("fig7", "s", 1, l) == run("fig7", "p", 3, l), "fig7 parallel = serial");
  const std::vector<std::pair<std::string, std::string>> s{{"poincare_tau_max", "2000"}, {"ensemble_size", "6"}};
  r.check(run("fig8", "s", 1, s) == run("fig8", "p", 3, s), "fig8 parallel = serial");
  fs::remove_all(base);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"closed-form dressed-state suite", closed_form},
      {"Landau-Zener regime table", regime_table},
      {"propagator vs Raman-Nath oracle", raman_nath},
      {"conservation", conservation},
      {"regular regime confinement", regular_regime},
      {"chaotic regime spreading and period", chaotic_regime},
      {"node-transition signature", node_transitions},
      {"Wigner checks", wigner_checks},
      {"Lyapunov sweep", lyapunov},
      {"Poincare islands and sea", poincare},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1f s)\n", res.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                res.detail.c_str(), secs);
    std::fflush(stdout);
    failed += res.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
