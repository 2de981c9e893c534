#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <span>

#include "swatom/config.hpp"
#include "swatom/dressed.hpp"
#include "swatom/errors.hpp"
#include "swatom/params.hpp"
#include "swatom/phase_space.hpp"
#include "swatom/presets.hpp"
#include "swatom/qdyn.hpp"
#include "swatom/semiclassical.hpp"

namespace py = pybind11;
using namespace swatom;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<cplx> to_vector(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> field_values(const Field2D& f) {
  py::array_t<double> out({static_cast<py::ssize_t>(f.y.count), static_cast<py::ssize_t>(f.x.count)});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::array_t<double> axis_values(const Axis& a) {
  std::vector<double> v(a.count);
  for (std::size_t i = 0; i < a.count; ++i) v[i] = a.at(i);
  return to_array(v);
}

py::dict poincare_dict(const std::vector<PoincarePoint>& pts) {
  std::vector<double> v, z, tau;
  std::vector<int> hemi, parity;
  std::vector<std::size_t> member;
  for (const auto& p : pts) {
    v.push_back(p.v);
    z.push_back(p.z);
    tau.push_back(p.tau);
    hemi.push_back(p.hemisphere);
    parity.push_back(p.node_parity);
    member.push_back(p.member);
  }
  py::dict d;
  d["v"] = to_array(v);
  d["z"] = to_array(z);
  d["tau"] = to_array(tau);
  d["hemisphere"] = to_array(hemi);
  d["node_parity"] = to_array(parity);
  d["member"] = to_array(member);
  return d;
}

std::vector<PoincarePoint> poincare_points(const py::dict& d) {
  const auto v = d["v"].cast<std::vector<double>>();
  const auto z = d["z"].cast<std::vector<double>>();
  std::vector<PoincarePoint> pts(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    pts[i].v = v[i];
    pts[i].z = z.at(i);
  }
  return pts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-level atom in a standing-wave laser: quantum, dressed-state and semiclassical dynamics.";
  m.attr("__version__") = kEngineVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<GridError>(m, "GridError", base.ptr());
  py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  // Parameters ---------------------------------------------------------------------------------
  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("atomic_mass", &PhysicalParams::atomic_mass)
      .def_readwrite("wavelength", &PhysicalParams::wavelength)
      .def_readwrite("rabi_frequency", &PhysicalParams::rabi_frequency)
      .def_readwrite("transition_frequency", &PhysicalParams::transition_frequency)
      .def_readwrite("laser_frequency", &PhysicalParams::laser_frequency);

  py::class_<MomentumGridSpec>(m, "MomentumGrid")
      .def(py::init<>())
      .def_readwrite("center", &MomentumGridSpec::center)
      .def_readwrite("half_span", &MomentumGridSpec::half_span)
      .def_readwrite("subdivisions", &MomentumGridSpec::subdivisions)
      .def_property_readonly("size", &MomentumGridSpec::size)
      .def_property_readonly("spacing", &MomentumGridSpec::spacing)
      .def("momenta", [](const MomentumGridSpec& g) {
        std::vector<double> p(g.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = g.momentum(i);
        return to_array(p);
      });

  py::class_<DimensionlessParams>(m, "Params")
      .def(py::init<>())
      .def_readwrite("recoil_frequency", &DimensionlessParams::recoil_frequency)
      .def_readwrite("detuning", &DimensionlessParams::detuning)
      .def_readwrite("initial_momentum", &DimensionlessParams::initial_momentum)
      .def_readwrite("packet_width", &DimensionlessParams::packet_width)
      .def_readwrite("initial_position", &DimensionlessParams::initial_position)
      .def_readwrite("grid", &DimensionlessParams::grid)
      .def_readwrite("dt", &DimensionlessParams::dt)
      .def_readwrite("tau_max", &DimensionlessParams::tau_max)
      .def("validate", &DimensionlessParams::validate);

  m.def("normalize", [](const PhysicalParams& p) { return normalize(p); }, py::arg("physical"));
  m.def("doppler_shift", py::overload_cast<double, double>(&doppler_shift), py::arg("recoil_frequency"),
        py::arg("momentum"));

  // Quantum propagation ------------------------------------------------------------------------
  py::class_<QuantumState>(m, "QuantumState")
      .def_readonly("grid", &QuantumState::grid)
      .def_readwrite("tau", &QuantumState::tau)
      .def_property(
          "a", [](const QuantumState& s) { return to_array(s.a); },
          [](QuantumState& s, const py::array_t<cplx, py::array::c_style | py::array::forcecast>& v) {
            if (static_cast<std::size_t>(v.size()) != s.grid.size()) throw InvalidParameter("amplitude size mismatch");
            s.a = to_vector(v);
          })
      .def_property(
          "b", [](const QuantumState& s) { return to_array(s.b); },
          [](QuantumState& s, const py::array_t<cplx, py::array::c_style | py::array::forcecast>& v) {
            if (static_cast<std::size_t>(v.size()) != s.grid.size()) throw InvalidParameter("amplitude size mismatch");
            s.b = to_vector(v);
          })
      .def("norm", &QuantumState::norm)
      .def("edge_mass", &QuantumState::edge_mass);

  m.def("initial_packet", &initial_packet, py::arg("params"));
  m.def("zero_state", &zero_state, py::arg("grid"));
  m.def("evolve", &evolve, py::arg("state"), py::arg("params"), py::arg("tau"),
        py::call_guard<py::gil_scoped_release>());
  m.def("mean_momentum", &mean_momentum, py::arg("state"));
  m.def("momentum_distribution", [](const QuantumState& s) {
    const MomentumDistribution d = momentum_distribution(s);
    std::vector<double> p(d.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = d.momentum(i);
    return py::make_tuple(to_array(p), to_array(d.values));
  });

  // Dressed states -----------------------------------------------------------------------------
  m.def("quasienergies", [](double x, double d) {
    const Quasienergies e = quasienergies(x, d);
    return py::make_tuple(e.plus, e.minus);
  }, py::arg("x"), py::arg("detuning"));
  m.def("mixing_angle", [](double x, double d) {
    const MixingAngle a = mixing_angle(x, d);
    return py::make_tuple(a.sin, a.cos);
  }, py::arg("x"), py::arg("detuning"), "(sin theta, cos theta) of the upper dressed state.");
  m.def("potential_depth", &potential_depth, py::arg("detuning"));
  m.def("ground_state_decomposition", [](double x, double d) {
    const GroundDecomposition g = ground_state_decomposition(x, d);
    return py::make_tuple(g.plus, g.minus);
  }, py::arg("x"), py::arg("detuning"));
  m.def("lz_probability", &lz_probability, py::arg("detuning"), py::arg("doppler"));
  m.def("classify_regime", [](double d, double w) {
    const RegimeVerdict v = classify_regime(d, w);
    py::dict out;
    out["regime"] = std::string(to_string(v.regime));
    out["p_lz"] = v.p_lz;
    out["ratio"] = v.ratio;
    return out;
  }, py::arg("detuning"), py::arg("doppler"));

  // Phase space --------------------------------------------------------------------------------
  m.def("to_position", [](const QuantumState& s) {
    const PositionState pos = to_position(s);
    std::vector<double> x(pos.grid.count);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = pos.grid.at(j);
    return py::make_tuple(to_array(x), to_array(pos.a), to_array(pos.b));
  }, py::arg("state"), "Returns (x, a(x), b(x)).");
  m.def("dressed_occupations", [](const QuantumState& s, double detuning) {
    const DressedOccupations occ = dressed_occupations(to_position(s), detuning);
    return py::make_tuple(to_array(occ.plus), to_array(occ.minus));
  }, py::arg("state"), py::arg("detuning"), "Returns (|C+(x)|^2, |C-(x)|^2).");
  m.def("wigner", [](const QuantumState& s, const std::string& component, double p_min, double p_max,
                     std::size_t row_stride, std::size_t x_stride) {
    const Component c = component == "excited" ? Component::excited : Component::ground;
    if (component != "excited" && component != "ground") throw InvalidParameter("component must be 'ground' or 'excited'");
    Field2D f;
    {
      py::gil_scoped_release release;
      f = wigner(s, c, WignerWindow{p_min, p_max, row_stride, x_stride});
    }
    py::dict out;
    out["x"] = axis_values(f.x);
    out["p"] = axis_values(f.y);
    out["W"] = field_values(f);
    out["imag_residue"] = std::stod(f.metadata.at("imag_residue"));
    return out;
  }, py::arg("state"), py::arg("component") = "ground", py::arg("p_min") = -std::numeric_limits<double>::infinity(),
     py::arg("p_max") = std::numeric_limits<double>::infinity(), py::arg("row_stride") = 1, py::arg("x_stride") = 1);

  // Semiclassical ------------------------------------------------------------------------------
  py::class_<SemiclassicalState>(m, "SemiclassicalState")
      .def(py::init([](double x, double p, double u, double v, double z) { return SemiclassicalState{x, p, u, v, z}; }),
           py::arg("x") = 0.0, py::arg("p") = 0.0, py::arg("u") = 0.0, py::arg("v") = 0.0, py::arg("z") = -1.0)
      .def_readwrite("x", &SemiclassicalState::x)
      .def_readwrite("p", &SemiclassicalState::p)
      .def_readwrite("u", &SemiclassicalState::u)
      .def_readwrite("v", &SemiclassicalState::v)
      .def_readwrite("z", &SemiclassicalState::z)
      .def("__repr__", [](const SemiclassicalState& s) {
        return "SemiclassicalState(x=" + std::to_string(s.x) + ", p=" + std::to_string(s.p) + ", u=" +
               std::to_string(s.u) + ", v=" + std::to_string(s.v) + ", z=" + std::to_string(s.z) + ")";
      });

  m.def("total_energy", [](const SemiclassicalState& s, double d, double w) { return total_energy(s, {d, w}); },
        py::arg("state"), py::arg("detuning"), py::arg("recoil_frequency"));
  m.def("integrate_sc", [](const SemiclassicalState& s, double d, double w, double tau_max, double dt,
                           std::size_t record_every) {
    TrajectoryRecord r;
    {
      py::gil_scoped_release release;
      r = integrate_sc(s, {d, w}, tau_max, dt, record_every);
    }
    std::vector<double> cols[5];
    for (const auto& st : r.states) {
      const auto a = st.as_array();
      for (int k = 0; k < 5; ++k) cols[k].push_back(a[k]);
    }
    py::dict out;
    out["tau"] = to_array(r.tau);
    const char* names[5] = {"x", "p", "u", "v", "z"};
    for (int k = 0; k < 5; ++k) out[names[k]] = to_array(cols[k]);
    out["energy"] = to_array(r.energy);
    out["bloch_norm"] = to_array(r.bloch_norm);
    return out;
  }, py::arg("state"), py::arg("detuning"), py::arg("recoil_frequency"), py::arg("tau_max"), py::arg("dt") = 1e-3,
     py::arg("record_every") = 1000);
  m.def("lyapunov_max", [](const SemiclassicalState& s, double d, double w, double tau_total, double dt) {
    LyapunovOptions opt;
    opt.tau_total = tau_total;
    opt.dt = dt;
    return lyapunov_max(s, {d, w}, opt);
  }, py::arg("state"), py::arg("detuning"), py::arg("recoil_frequency"), py::arg("tau_total") = 1e5,
     py::arg("dt") = 1e-3, py::call_guard<py::gil_scoped_release>());
  m.def("lyapunov_sweep", [](const std::vector<double>& detunings, double w, double p0, std::size_t size,
                             std::uint64_t seed, double tau_total, double dt, unsigned workers) {
    LyapunovOptions opt;
    opt.tau_total = tau_total;
    opt.dt = dt;
    return lyapunov_sweep(detunings, w, p0, {size, seed}, opt, workers);
  }, py::arg("detunings"), py::arg("recoil_frequency") = 1e-3, py::arg("p0") = 55.0, py::arg("ensemble_size") = 5,
     py::arg("seed") = 1, py::arg("tau_total") = 1e5, py::arg("dt") = 5e-3, py::arg("workers") = 1,
     py::call_guard<py::gil_scoped_release>());
  m.def("shell_ensemble", [](double energy, double d, double w, std::size_t size, std::uint64_t seed) {
    return shell_ensemble(energy, {d, w}, size, seed);
  }, py::arg("energy"), py::arg("detuning"), py::arg("recoil_frequency"), py::arg("size"), py::arg("seed") = 1);
  m.def("poincare_section", [](const std::vector<SemiclassicalState>& ensemble, double energy, double d, double w,
                               double tau_max, double dt, unsigned workers) {
    PoincareOptions opt;
    opt.tau_max = tau_max;
    opt.dt = dt;
    std::vector<PoincarePoint> pts;
    {
      py::gil_scoped_release release;
      pts = poincare_section(ensemble, energy, {d, w}, opt, workers);
    }
    return poincare_dict(pts);
  }, py::arg("ensemble"), py::arg("energy"), py::arg("detuning"), py::arg("recoil_frequency"),
     py::arg("tau_max") = 1e5, py::arg("dt") = 5e-3, py::arg("workers") = 1);
  m.def("curve_residual", [](const py::dict& points) {
    const auto pts = poincare_points(points);
    return curve_residual(pts);
  }, py::arg("points"), "Local straight-line residual of a dict with 'v' and 'z' arrays.");

  // Presets ------------------------------------------------------------------------------------
  m.def("preset_names", &preset_names);
  m.def("resolve_config", [](const std::string& preset, const std::map<std::string, std::string>& overrides) {
    std::vector<std::pair<std::string, std::string>> o(overrides.begin(), overrides.end());
    return load_config(preset, {}, o).entries();
  }, py::arg("preset"), py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("run_preset", [](const std::string& preset, const std::string& output_dir,
                         const std::map<std::string, std::string>& overrides, unsigned workers) {
    std::vector<std::pair<std::string, std::string>> o(overrides.begin(), overrides.end());
    o.emplace_back("output_dir", output_dir);
    const ExperimentConfig c = load_config(preset, {}, o);
    RunManifest manifest;
    {
      py::gil_scoped_release release;
      manifest = run_preset(c, workers);
    }
    return py::module_::import("json").attr("loads")(manifest.to_json());
  }, py::arg("preset"), py::arg("output_dir"), py::arg("overrides") = std::map<std::string, std::string>{},
     py::arg("workers") = 1, "Runs a preset and returns its manifest as a dict.");
  m.def("verify_manifest", [](const std::filesystem::path& p) { return verify_manifest(p); }, py::arg("path"));
}
