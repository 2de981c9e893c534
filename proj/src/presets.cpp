#include "swatom/presets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>

#include "json.hpp"

#include "swatom/dressed.hpp"
#include "swatom/errors.hpp"
#include "swatom/io.hpp"
#include "swatom/phase_space.hpp"
#include "swatom/qdyn.hpp"
#include "swatom/rng.hpp"
#include "swatom/semiclassical.hpp"

namespace swatom {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

class Emitter {
public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) {}

  void series(const std::string& name, const Series& s) {
    write_series(s, dir_ / name);
    names_.push_back(name);
  }
  void field(const std::string& name, const Field2D& f) {
    write_field(f, dir_ / name);
    names_.push_back(name);
  }
  void text(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    names_.push_back(name);
  }

  std::vector<EmittedFile> files() const {
    std::vector<EmittedFile> out;
    for (const auto& name : names_) {
      const fs::path path = dir_ / name;
      std::error_code ec;
      const auto bytes = fs::file_size(path, ec);
      if (ec) continue;
      out.push_back({name, sha256_file(path), bytes});
    }
    return out;
  }

private:
  fs::path dir_;
  std::vector<std::string> names_;
};

struct Context {
  const ExperimentConfig& config;
  unsigned workers;
  Emitter& emit;
  RunManifest& manifest;

  void track(const std::string& key, double value) {
    auto [it, inserted] = manifest.drift.emplace(key, value);
    if (!inserted) it->second = std::max(it->second, value);
  }
};

std::string tag(double v) { return format_double(v); }

std::map<std::string, std::string> base_metadata(const ExperimentConfig& c, double detuning) {
  return {{"preset", c.preset},
          {"detuning", format_double(detuning)},
          {"recoil_frequency", format_double(c.params.recoil_frequency)},
          {"initial_momentum", format_double(c.params.initial_momentum)}};
}

double component_mass(const std::vector<cplx>& amp, double dp) {
  double s = 0.0;
  for (const auto& v : amp) s += std::norm(v);
  return s * dp;
}

// Runs the quantum propagation from the initial packet and hands every sample with its index.
void run_quantum(Context& ctx, const DimensionlessParams& params,
                 const std::function<void(const QuantumState&, std::size_t)>& on_sample) {
  QuantumState state = initial_packet(params);
  const double n0 = state.norm();
  Propagator prop(params);
  std::size_t k = 0;
  prop.run(state, params.tau_max, ctx.config.sample_interval, [&](const QuantumState& s) {
    ctx.track("quantum_norm", std::abs(s.norm() - n0));
    ctx.track("quantum_edge_mass", s.edge_mass());
    on_sample(s, k++);
  });
}

Axis time_axis(std::size_t rows, double interval) {
  return {"tau", 0.0, interval * static_cast<double>(rows == 0 ? 0 : rows - 1), rows};
}

Field2D stack_rows(Axis x, std::size_t rows, double interval, const std::string& label,
                   const std::vector<double>& values) {
  Field2D f;
  f.x = std::move(x);
  f.y = time_axis(rows, interval);
  f.value_label = label;
  f.values = values;
  return f;
}

// --- presets -------------------------------------------------------------------------------

void preset_fig1(Context& ctx) {
  constexpr std::size_t kPoints = 721;
  for (const double d : ctx.config.detunings) {
    Series s;
    s.columns = {"x", "E_plus", "E_minus"};
    s.metadata = {{"preset", ctx.config.preset}, {"detuning", format_double(d)}};
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double x = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(kPoints - 1);
      const Quasienergies e = quasienergies(x, d);
      s.add_row({x, e.plus, e.minus});
    }
    ctx.emit.series("potentials_d" + tag(d) + ".csv", s);
  }
}

void preset_fig2(Context& ctx) {
  for (const double d : ctx.config.detunings) {
    DimensionlessParams p = ctx.config.params;
    p.detuning = d;
    Series s;
    s.columns = {"tau", "mean_momentum", "norm", "excited_population", "edge_mass"};
    s.metadata = base_metadata(ctx.config, d);
    const double dp = p.grid.spacing();
    run_quantum(ctx, p, [&](const QuantumState& st, std::size_t k) {
      s.add_row({ctx.config.sample_interval * static_cast<double>(k), mean_momentum(st), st.norm(),
                 component_mass(st.a, dp), st.edge_mass()});
    });
    ctx.emit.series("mean_momentum_d" + tag(d) + ".csv", s);
  }
}

void preset_fig3(Context& ctx) {
  const auto& c = ctx.config;
  for (const double d : c.detunings) {
    DimensionlessParams p = c.params;
    p.detuning = d;
    const MomentumGridSpec& g = p.grid;
    const double dp = g.spacing();
    const auto last = static_cast<long>(g.size()) - 1;
    const long lo = std::clamp(static_cast<long>(std::ceil((c.p_window_min - g.min()) / dp - 1e-9)), 0L, last);
    const long hi = std::clamp(static_cast<long>(std::floor((c.p_window_max - g.min()) / dp + 1e-9)), 0L, last);
    const auto stride = static_cast<long>(c.p_stride);
    const std::size_t cols = static_cast<std::size_t>((hi - lo) / stride + 1);
    Axis px{"p", g.momentum(static_cast<std::size_t>(lo)),
            g.momentum(static_cast<std::size_t>(lo + stride * static_cast<long>(cols - 1))), cols};

    std::vector<double> values;
    std::size_t rows = 0;
    run_quantum(ctx, p, [&](const QuantumState& st, std::size_t) {
      for (std::size_t i = 0; i < cols; ++i) {
        const auto j = static_cast<std::size_t>(lo + stride * static_cast<long>(i));
        values.push_back(std::norm(st.a[j]) + std::norm(st.b[j]));
      }
      ++rows;
    });
    Field2D f = stack_rows(px, rows, c.sample_interval, "momentum_density", values);
    f.metadata = base_metadata(c, d);
    ctx.emit.field("momentum_density_d" + tag(d) + ".csv", f);
  }
}

void preset_fig4(Context& ctx) {
  const auto& c = ctx.config;
  Series jumps;
  jumps.columns = {"detuning", "node_line_jump"};
  jumps.metadata = {{"preset", c.preset}, {"frame_velocity", format_double(c.params.recoil_frequency * c.params.initial_momentum)}};
  for (const double d : c.detunings) {
    DimensionlessParams p = c.params;
    p.detuning = d;
    const PositionGrid xg = position_grid(p.grid);
    std::vector<double> values;
    std::size_t rows = 0;
    run_quantum(ctx, p, [&](const QuantumState& st, std::size_t) {
      const PositionState pos = to_position(st);
      const DressedOccupations occ = dressed_occupations(pos, d);
      values.insert(values.end(), occ.minus.begin(), occ.minus.end());
      ++rows;
    });
    Field2D lab = stack_rows(Axis{"x", xg.min(), xg.max(), xg.count}, rows, c.sample_interval, "minus_density", values);
    const double velocity = p.recoil_frequency * p.initial_momentum;
    ComovingField cm = comoving_frame(lab, velocity);
    const double jump = node_line_jump(cm);
    jumps.add_row({d, jump});

    // Decimate columns for the emitted field; node lines are kept at full precision.
    const std::size_t stride = c.x_stride;
    const std::size_t cols = (cm.field.x.count + stride - 1) / stride;
    Field2D out;
    out.x = Axis{"x", cm.field.x.min, cm.field.x.min + cm.field.x.step() * static_cast<double>(stride * (cols - 1)), cols};
    out.y = cm.field.y;
    out.value_label = cm.field.value_label;
    out.metadata = base_metadata(c, d);
    out.metadata["frame_velocity"] = format_double(velocity);
    out.values.reserve(cols * out.y.count);
    for (std::size_t iy = 0; iy < out.y.count; ++iy) {
      for (std::size_t i = 0; i < cols; ++i) out.values.push_back(cm.field.at(i * stride, iy));
    }
    ctx.emit.field("minus_density_comoving_d" + tag(d) + ".csv", out);

    Series nodes;
    nodes.columns.push_back("tau");
    for (std::size_t n = 0; n < cm.nodes.x.size(); ++n) nodes.columns.push_back("node_" + std::to_string(n));
    nodes.metadata = base_metadata(c, d);
    nodes.metadata["frame_velocity"] = format_double(velocity);
    for (std::size_t iy = 0; iy < cm.nodes.tau.size(); ++iy) {
      std::vector<double> row{cm.nodes.tau[iy]};
      for (const auto& line : cm.nodes.x) row.push_back(line[iy]);
      nodes.add_row(std::move(row));
    }
    ctx.emit.series("node_lines_d" + tag(d) + ".csv", nodes);
  }
  ctx.emit.series("node_jumps.csv", jumps);
}

void preset_wigner(Context& ctx) {
  const auto& c = ctx.config;
  DimensionlessParams p = c.params;
  std::vector<double> times = c.snapshot_times;
  std::sort(times.begin(), times.end());
  QuantumState state = initial_packet(p);
  const double n0 = state.norm();
  Propagator prop(p);
  const WignerWindow window{c.p_window_min, c.p_window_max, c.wigner_row_stride, c.x_stride};
  for (const double t : times) {
    prop.advance(state, t);
    ctx.track("quantum_norm", std::abs(state.norm() - n0));
    ctx.track("quantum_edge_mass", state.edge_mass());
    Field2D w = wigner(state, c.wigner_component, window);
    ctx.track("wigner_imag_residue", std::stod(w.metadata.at("imag_residue")));
    for (const auto& [k, v] : base_metadata(c, p.detuning)) w.metadata[k] = v;
    w.metadata["tau"] = format_double(t);
    ctx.emit.field("wigner_" + std::string(to_string(c.wigner_component)) + "_t" + tag(t) + ".csv", w);
  }
}

void preset_fig7(Context& ctx) {
  const auto& c = ctx.config;
  LyapunovOptions opt;
  opt.tau_total = c.lyap_tau_total;
  opt.renorm_interval = c.lyap_renorm_interval;
  opt.offset = c.lyap_offset;
  opt.transient_fraction = c.lyap_transient_fraction;
  opt.dt = c.lyap_dt;
  const std::vector<double> lambda = lyapunov_sweep(c.detuning_grid, c.params.recoil_frequency,
                                                    c.params.initial_momentum, {c.ensemble_size, c.seed}, opt,
                                                    ctx.workers);
  Series s;
  s.columns = {"detuning", "lyapunov"};
  s.metadata = {{"preset", c.preset},
                {"recoil_frequency", format_double(c.params.recoil_frequency)},
                {"initial_momentum", format_double(c.params.initial_momentum)},
                {"ensemble_size", std::to_string(c.ensemble_size)},
                {"seed", std::to_string(c.seed)},
                {"tau_total", format_double(c.lyap_tau_total)},
                {"dt", format_double(c.lyap_dt)},
                {"aggregate", "median"}};
  for (std::size_t i = 0; i < lambda.size(); ++i) s.add_row({c.detuning_grid[i], lambda[i]});
  ctx.emit.series("lyapunov.csv", s);
}

void preset_fig8(Context& ctx) {
  const auto& c = ctx.config;
  const ScParams sc{c.params.detuning, c.params.recoil_frequency};
  const auto ensemble = shell_ensemble(c.energy, sc, c.ensemble_size, c.seed);
  PoincareOptions opt;
  opt.tau_max = c.poincare_tau_max;
  opt.dt = c.poincare_dt;
  const auto points = poincare_section(ensemble, c.energy, sc, opt, ctx.workers);

  std::map<std::string, std::string> meta{{"preset", c.preset},
                                          {"detuning", format_double(sc.detuning)},
                                          {"recoil_frequency", format_double(sc.recoil_frequency)},
                                          {"energy", format_double(c.energy)},
                                          {"seed", std::to_string(c.seed)},
                                          {"ensemble_size", std::to_string(c.ensemble_size)},
                                          {"surface", "cos_x=0"}};
  for (const int hemi : {1, -1}) {
    Series s;
    s.columns = {"v", "z", "member", "tau", "node_parity"};
    s.metadata = meta;
    s.metadata["hemisphere"] = hemi > 0 ? "u>0" : "u<0";
    for (const auto& pt : points) {
      if (pt.hemisphere == hemi) s.add_row({pt.v, pt.z, static_cast<double>(pt.member), pt.tau, double(pt.node_parity)});
    }
    ctx.emit.series(hemi > 0 ? "poincare_upper.csv" : "poincare_lower.csv", s);
  }

  Series members;
  members.columns = {"member", "x0", "p0", "u0", "v0", "z0", "hemisphere", "points", "curve_residual"};
  members.metadata = meta;
  members.metadata["curve_residual"] = "-1_when_fewer_than_13_points";
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    for (const int hemi : {1, -1}) {
      std::vector<PoincarePoint> own;
      for (const auto& pt : points) {
        if (pt.member == m && pt.hemisphere == hemi) own.push_back(pt);
      }
      const double residual = own.size() >= 13 ? curve_residual(own) : -1.0;
      const auto& s0 = ensemble[m];
      members.add_row({static_cast<double>(m), s0.x, s0.p, s0.u, s0.v, s0.z, static_cast<double>(hemi),
                       static_cast<double>(own.size()), residual});
    }
  }
  ctx.emit.series("poincare_members.csv", members);
}

void preset_lz_table(Context& ctx) {
  const auto& c = ctx.config;
  Series s;
  s.columns = {"detuning", "doppler", "p_lz", "ratio", "regime"};
  s.metadata = {{"preset", c.preset},
                {"regime_codes", "0:adiabatic,1:resonant-following,2:chaotic-crossing"},
                {"adiabatic_ratio", format_double(c.thresholds.adiabatic_ratio)},
                {"resonant_ratio", format_double(c.thresholds.resonant_ratio)}};
  for (const double d : c.detuning_grid) {
    for (const double w : c.doppler_grid) {
      const RegimeVerdict v = classify_regime(d, w, c.thresholds);
      s.add_row({d, w, v.p_lz, v.ratio, static_cast<double>(static_cast<int>(v.regime))});
    }
  }
  ctx.emit.series("lz_table.csv", s);
}

void preset_quantum(Context& ctx) {
  const auto& c = ctx.config;
  const DimensionlessParams& p = c.params;
  const double dp = p.grid.spacing();
  Series s;
  s.columns = {"tau", "mean_momentum", "norm", "excited_population", "minus_population", "edge_mass"};
  s.metadata = base_metadata(c, p.detuning);
  QuantumState last;
  run_quantum(ctx, p, [&](const QuantumState& st, std::size_t k) {
    const PositionState pos = to_position(st);
    const DressedOccupations occ = dressed_occupations(pos, p.detuning);
    double minus = 0.0;
    for (const double v : occ.minus) minus += v;
    s.add_row({c.sample_interval * static_cast<double>(k), mean_momentum(st), st.norm(), component_mass(st.a, dp),
               minus * pos.grid.spacing, st.edge_mass()});
    last = st;
  });
  ctx.emit.series("observables.csv", s);

  Series dist;
  dist.columns = {"p", "excited", "ground"};
  dist.metadata = base_metadata(c, p.detuning);
  dist.metadata["tau"] = format_double(p.tau_max);
  for (std::size_t i = 0; i < last.a.size(); ++i) {
    const double pi = last.grid.momentum(i);
    if (pi < c.p_window_min || pi > c.p_window_max) continue;
    dist.add_row({pi, std::norm(last.a[i]), std::norm(last.b[i])});
  }
  ctx.emit.series("momentum_final.csv", dist);
}

void preset_semiclassical(Context& ctx) {
  const auto& c = ctx.config;
  const ScParams sc{c.params.detuning, c.params.recoil_frequency};
  const SemiclassicalState s0{c.params.initial_position, c.params.initial_momentum, c.initial_u, c.initial_v,
                              c.initial_z};
  const auto every = static_cast<std::size_t>(std::max(1.0, std::round(c.sample_interval / c.sc_dt)));
  const TrajectoryRecord rec = integrate_sc(s0, sc, c.sc_tau_max, c.sc_dt, every);
  ctx.track("sc_energy", rec.max_energy_drift());
  ctx.track("sc_bloch_norm", rec.max_bloch_drift());
  Series s;
  s.columns = {"tau", "x", "p", "u", "v", "z", "energy", "bloch_norm"};
  s.metadata = base_metadata(c, sc.detuning);
  s.metadata["dt"] = format_double(c.sc_dt);
  for (std::size_t i = 0; i < rec.tau.size(); ++i) {
    const auto& st = rec.states[i];
    s.add_row({rec.tau[i], st.x, st.p, st.u, st.v, st.z, rec.energy[i], rec.bloch_norm[i]});
  }
  ctx.emit.series("trajectory.csv", s);
}

// --- plot scripts --------------------------------------------------------------------------

constexpr const char* kPlotHeader = R"PY(#!/usr/bin/env python3
import glob, os, sys
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def meta(line):
    return dict(t.split("=", 1) for t in line[2:].split() if "=" in t)


def read_series(name):
    with open(os.path.join(HERE, name)) as f:
        m = meta(f.readline())
        cols = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    return m, {c: data[:, i] if data.size else np.array([]) for i, c in enumerate(cols)}


def read_field(name):
    with open(os.path.join(HERE, name)) as f:
        m = meta(f.readline())
        f.readline()
        z = np.loadtxt(f, delimiter=",", ndmin=2)
    x = np.linspace(float(m["x_min"]), float(m["x_max"]), int(m["x_count"]))
    y = np.linspace(float(m["y_min"]), float(m["y_max"]), int(m["y_count"]))
    return m, x, y, z


def files(pattern):
    return sorted(os.path.basename(p) for p in glob.glob(os.path.join(HERE, pattern)))

)PY";

std::string plot_script(const std::string& preset) {
  std::string body;
  if (preset == "fig1") {
    body = R"PY(for name in files("potentials_d*.csv"):
    m, s = read_series(name)
    plt.plot(s["x"], s["E_plus"], label="E+ D=" + m["detuning"])
    plt.plot(s["x"], s["E_minus"], "--", label="E- D=" + m["detuning"])
plt.xlabel("x"); plt.ylabel("quasienergy"); plt.legend()
)PY";
  } else if (preset == "fig2") {
    body = R"PY(for name in files("mean_momentum_d*.csv"):
    m, s = read_series(name)
    plt.plot(s["tau"], s["mean_momentum"], label="D=" + m["detuning"])
plt.xlabel("tau"); plt.ylabel("<p>"); plt.legend()
)PY";
  } else if (preset == "fig3") {
    body = R"PY(names = files("momentum_density_d*.csv")
fig, axes = plt.subplots(1, len(names), figsize=(6 * len(names), 5), squeeze=False)
for ax, name in zip(axes[0], names):
    m, x, y, z = read_field(name)
    ax.pcolormesh(x, y, z, shading="auto")
    ax.set_xlabel("p"); ax.set_ylabel("tau"); ax.set_title("D=" + m["detuning"])
)PY";
  } else if (preset == "fig4") {
    body = R"PY(names = files("minus_density_comoving_d*.csv")
fig, axes = plt.subplots(1, len(names), figsize=(6 * len(names), 5), squeeze=False)
for ax, name in zip(axes[0], names):
    m, x, y, z = read_field(name)
    ax.pcolormesh(x, y, z, shading="auto")
    _, nodes = read_series(name.replace("minus_density_comoving", "node_lines"))
    for k, v in nodes.items():
        if k.startswith("node_"):
            ax.plot(v, nodes["tau"], "w,")
    ax.set_xlim(x[0], x[-1]); ax.set_xlabel("x (co-moving)"); ax.set_ylabel("tau"); ax.set_title("D=" + m["detuning"])
)PY";
  } else if (preset == "fig5" || preset == "fig6") {
    body = R"PY(names = files("wigner_*_t*.csv")
fig, axes = plt.subplots(1, len(names), figsize=(6 * len(names), 5), squeeze=False)
for ax, name in zip(axes[0], names):
    m, x, y, z = read_field(name)
    lim = np.abs(z).max()
    ax.pcolormesh(x, y, z, shading="auto", cmap="RdBu_r", vmin=-lim, vmax=lim)
    ax.set_xlabel("x"); ax.set_ylabel("p"); ax.set_title("tau=" + m["tau"])
)PY";
  } else if (preset == "fig7") {
    body = R"PY(m, s = read_series("lyapunov.csv")
plt.plot(s["detuning"], s["lyapunov"], "o-")
plt.xlabel("detuning"); plt.ylabel("lambda")
)PY";
  } else if (preset == "fig8") {
    body = R"PY(fig, axes = plt.subplots(1, 2, figsize=(10, 5))
for ax, name in zip(axes, ["poincare_upper.csv", "poincare_lower.csv"]):
    m, s = read_series(name)
    ax.scatter(s["v"], s["z"], s=0.2, c=s["member"], cmap="tab20")
    ax.set_xlabel("v"); ax.set_ylabel("z"); ax.set_title(m["hemisphere"])
)PY";
  } else if (preset == "lz-table") {
    body = R"PY(m, s = read_series("lz_table.csv")
plt.scatter(s["doppler"], s["detuning"], c=s["regime"], cmap="viridis", vmin=0, vmax=2)
plt.xscale("log"); plt.xlabel("doppler shift"); plt.ylabel("detuning"); plt.colorbar(label=m["regime_codes"])
)PY";
  } else if (preset == "quantum") {
    body = R"PY(m, s = read_series("observables.csv")
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
axes[0].plot(s["tau"], s["mean_momentum"]); axes[0].set_xlabel("tau"); axes[0].set_ylabel("<p>")
axes[1].plot(s["tau"], s["minus_population"]); axes[1].set_xlabel("tau"); axes[1].set_ylabel("P-")
)PY";
  } else {
    body = R"PY(m, s = read_series("trajectory.csv")
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
axes[0].plot(s["tau"], s["p"]); axes[0].set_xlabel("tau"); axes[0].set_ylabel("p")
axes[1].plot(s["tau"], s["z"]); axes[1].set_xlabel("tau"); axes[1].set_ylabel("z")
)PY";
  }
  return std::string(kPlotHeader) + body + "plt.tight_layout()\nplt.savefig(os.path.join(HERE, \"" + preset +
         ".png\"), dpi=150)\n";
}

void write_manifest(const RunManifest& m) {
  write_atomic(fs::path(m.config.output_dir) / "run_manifest.json", m.to_json());
}

}  // namespace

std::string RunManifest::to_json() const {
  ojson j;
  j["engine"] = "swatom";
  j["engine_version"] = engine_version;
  j["preset"] = config.preset;
  j["status"] = ok ? "ok" : "failed";
  if (!ok) j["error"] = {{"kind", error_kind}, {"message", error}};
  j["workers"] = workers;
  j["seed"] = seed;
  j["rng"] = std::string(kRngDiscipline);
  j["wall_time_s"] = wall_time_s;
  ojson cfg = ojson::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  ojson drift_json = ojson::object();
  for (const auto& [k, v] : drift) drift_json[k] = v;
  j["drift"] = drift_json;
  ojson list = ojson::array();
  for (const auto& f : files) list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = list;
  return j.dump(2) + "\n";
}

unsigned worker_count_from_env() {
  const char* raw = std::getenv("SWATOM_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0 || v > 1024) {
    throw ConfigError(std::string("SWATOM_WORKERS must be a positive integer, got '") + raw + "'");
  }
  return static_cast<unsigned>(v);
}

RunManifest run_preset(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config = config;
  manifest.workers = std::max(1u, workers);
  manifest.seed = config.seed;

  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  Emitter emit(dir);
  Context ctx{config, manifest.workers, emit, manifest};
  auto finish = [&] {
    manifest.files = emit.files();
    manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest);
  };
  auto fail = [&](const char* kind, const std::exception& e) {
    manifest.ok = false;
    manifest.error_kind = kind;
    manifest.error = e.what();
    finish();
  };

  try {
    const std::string& p = config.preset;
    if (p == "fig1") {
      preset_fig1(ctx);
    } else if (p == "fig2") {
      preset_fig2(ctx);
    } else if (p == "fig3") {
      preset_fig3(ctx);
    } else if (p == "fig4") {
      preset_fig4(ctx);
    } else if (p == "fig5" || p == "fig6") {
      preset_wigner(ctx);
    } else if (p == "fig7") {
      preset_fig7(ctx);
    } else if (p == "fig8") {
      preset_fig8(ctx);
    } else if (p == "lz-table") {
      preset_lz_table(ctx);
    } else if (p == "quantum") {
      preset_quantum(ctx);
    } else if (p == "semiclassical") {
      preset_semiclassical(ctx);
    } else {
      throw ConfigError("unknown preset '" + p + "'");
    }
    emit.text("plot_" + p + ".py", plot_script(p));
  } catch (const IntegrityError& e) {
    fail("integrity", e);
    throw;
  } catch (const ConfigError& e) {
    fail("config", e);
    throw;
  } catch (const IoError& e) {
    fail("io", e);
    throw;
  } catch (const std::exception& e) {
    fail("error", e);
    throw;
  }
  finish();
  return manifest;
}

std::vector<std::string> verify_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("files")) throw IoError(manifest_path.string() + ": not a run manifest");
  std::vector<std::string> bad;
  const fs::path dir = manifest_path.parent_path();
  for (const auto& f : j["files"]) {
    const std::string path = f.at("path").get<std::string>();
    const fs::path full = dir / path;
    std::error_code ec;
    if (!fs::exists(full, ec) || sha256_file(full) != f.at("sha256").get<std::string>() ||
        fs::file_size(full, ec) != f.at("bytes").get<std::uintmax_t>()) {
      bad.push_back(path);
    }
  }
  return bad;
}

}  // namespace swatom
