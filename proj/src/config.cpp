#include "swatom/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "swatom/errors.hpp"
#include "swatom/io.hpp"

namespace swatom {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "' expects a comma-separated list of numbers");
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

Component to_component(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "ground") return Component::ground;
  if (t == "excited") return Component::excited;
  throw ConfigError("key '" + key + "' expects 'ground' or 'excited', got '" + text + "'");
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Member>
KeyHandler number(Member member) {
  return {[member](ExperimentConfig& c, const std::string& k, const std::string& v) { member(c) = to_double(k, v); },
          [member](const ExperimentConfig& c) { return format_double(member(c)); }};
}

// Ordered table of every configuration key.
const std::vector<std::pair<std::string, KeyHandler>>& key_table() {
  static const std::vector<std::pair<std::string, KeyHandler>> table = [] {
    std::vector<std::pair<std::string, KeyHandler>> t;
    auto text = [](auto member) -> KeyHandler {
      return {[member](ExperimentConfig& c, const std::string&, const std::string& v) { member(c) = trim(v); },
              [member](const ExperimentConfig& c) { return member(c); }};
    };
    auto list = [](auto member) -> KeyHandler {
      return {[member](ExperimentConfig& c, const std::string& k, const std::string& v) { member(c) = to_list(k, v); },
              [member](const ExperimentConfig& c) { return join(member(c)); }};
    };
    auto count = [](auto member) -> KeyHandler {
      return {[member](ExperimentConfig& c, const std::string& k, const std::string& v) {
                member(c) = to_integer<std::size_t>(k, v);
              },
              [member](const ExperimentConfig& c) { return std::to_string(member(c)); }};
    };

    t.emplace_back("preset", text([](auto& c) -> auto& { return c.preset; }));
    t.emplace_back("output_dir", text([](auto& c) -> auto& { return c.output_dir; }));
    t.emplace_back("recoil_frequency", number([](auto& c) -> auto& { return c.params.recoil_frequency; }));
    t.emplace_back("detuning", number([](auto& c) -> auto& { return c.params.detuning; }));
    t.emplace_back("initial_momentum", number([](auto& c) -> auto& { return c.params.initial_momentum; }));
    t.emplace_back("packet_width", number([](auto& c) -> auto& { return c.params.packet_width; }));
    t.emplace_back("initial_position", number([](auto& c) -> auto& { return c.params.initial_position; }));
    t.emplace_back("grid_center", number([](auto& c) -> auto& { return c.params.grid.center; }));
    t.emplace_back("grid_half_span",
                   KeyHandler{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                c.params.grid.half_span = to_integer<int>(k, v);
                              },
                              [](const ExperimentConfig& c) { return std::to_string(c.params.grid.half_span); }});
    t.emplace_back("grid_subdivisions",
                   KeyHandler{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                c.params.grid.subdivisions = to_integer<int>(k, v);
                              },
                              [](const ExperimentConfig& c) { return std::to_string(c.params.grid.subdivisions); }});
    t.emplace_back("dt", number([](auto& c) -> auto& { return c.params.dt; }));
    t.emplace_back("tau_max", number([](auto& c) -> auto& { return c.params.tau_max; }));
    t.emplace_back("sample_interval", number([](auto& c) -> auto& { return c.sample_interval; }));
    t.emplace_back("detunings", list([](auto& c) -> auto& { return c.detunings; }));
    t.emplace_back("p_window_min", number([](auto& c) -> auto& { return c.p_window_min; }));
    t.emplace_back("p_window_max", number([](auto& c) -> auto& { return c.p_window_max; }));
    t.emplace_back("p_stride", count([](auto& c) -> auto& { return c.p_stride; }));
    t.emplace_back("x_stride", count([](auto& c) -> auto& { return c.x_stride; }));
    t.emplace_back("snapshot_times", list([](auto& c) -> auto& { return c.snapshot_times; }));
    t.emplace_back("wigner_component",
                   KeyHandler{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                c.wigner_component = to_component(k, v);
                              },
                              [](const ExperimentConfig& c) { return std::string(to_string(c.wigner_component)); }});
    t.emplace_back("wigner_row_stride", count([](auto& c) -> auto& { return c.wigner_row_stride; }));
    t.emplace_back("sc_dt", number([](auto& c) -> auto& { return c.sc_dt; }));
    t.emplace_back("sc_tau_max", number([](auto& c) -> auto& { return c.sc_tau_max; }));
    t.emplace_back("initial_u", number([](auto& c) -> auto& { return c.initial_u; }));
    t.emplace_back("initial_v", number([](auto& c) -> auto& { return c.initial_v; }));
    t.emplace_back("initial_z", number([](auto& c) -> auto& { return c.initial_z; }));
    t.emplace_back("detuning_grid", list([](auto& c) -> auto& { return c.detuning_grid; }));
    t.emplace_back("lyap_tau_total", number([](auto& c) -> auto& { return c.lyap_tau_total; }));
    t.emplace_back("lyap_renorm_interval", number([](auto& c) -> auto& { return c.lyap_renorm_interval; }));
    t.emplace_back("lyap_offset", number([](auto& c) -> auto& { return c.lyap_offset; }));
    t.emplace_back("lyap_transient_fraction",
                   number([](auto& c) -> auto& { return c.lyap_transient_fraction; }));
    t.emplace_back("lyap_dt", number([](auto& c) -> auto& { return c.lyap_dt; }));
    t.emplace_back("energy", number([](auto& c) -> auto& { return c.energy; }));
    t.emplace_back("poincare_tau_max", number([](auto& c) -> auto& { return c.poincare_tau_max; }));
    t.emplace_back("poincare_dt", number([](auto& c) -> auto& { return c.poincare_dt; }));
    t.emplace_back("ensemble_size", count([](auto& c) -> auto& { return c.ensemble_size; }));
    t.emplace_back("seed", KeyHandler{[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                        c.seed = to_integer<std::uint64_t>(k, v);
                                      },
                                      [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    t.emplace_back("doppler_grid", list([](auto& c) -> auto& { return c.doppler_grid; }));
    t.emplace_back("adiabatic_ratio", number([](auto& c) -> auto& { return c.thresholds.adiabatic_ratio; }));
    t.emplace_back("resonant_ratio", number([](auto& c) -> auto& { return c.thresholds.resonant_ratio; }));
    return t;
  }();
  return table;
}

const KeyHandler* find_key(const std::string& key) {
  for (const auto& [name, handler] : key_table()) {
    if (name == key) return &handler;
  }
  return nullptr;
}

void validate(const ExperimentConfig& c) {
  if (std::find(preset_names().begin(), preset_names().end(), c.preset) == preset_names().end()) {
    throw ConfigError("unknown preset '" + c.preset + "'");
  }
  try {
    c.params.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (!(c.sample_interval > 0.0)) throw ConfigError("sample_interval must be positive");
  if (c.x_stride == 0 || c.p_stride == 0 || c.wigner_row_stride == 0) throw ConfigError("strides must be positive");
  if (!(c.p_window_max > c.p_window_min)) throw ConfigError("p_window_max must exceed p_window_min");
  if (!(c.sc_dt > 0.0) || !(c.lyap_dt > 0.0) || !(c.poincare_dt > 0.0)) throw ConfigError("time steps must be positive");
  if (c.ensemble_size == 0) throw ConfigError("ensemble_size must be positive");
  for (const double t : c.snapshot_times) {
    if (t < 0.0) throw ConfigError("snapshot_times must be non-negative");
  }
  for (const double w : c.doppler_grid) {
    if (!(w > 0.0)) throw ConfigError("doppler_grid entries must be positive");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2",    "fig3",    "fig4",          "fig5", "fig6",
                                              "fig7", "fig8",    "lz-table", "quantum",      "semiclassical"};
  return names;
}

ExperimentConfig preset_defaults(const std::string& preset) {
  if (std::find(preset_names().begin(), preset_names().end(), preset) == preset_names().end()) {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  ExperimentConfig c;
  c.preset = preset;
  c.output_dir = "out/" + preset;
  if (preset == "fig1") {
    c.detunings = {0.0, 0.2, 1.0};
  } else if (preset == "fig5") {
    c.params.detuning = 1.0;
  } else if (preset == "fig6") {
    c.params.detuning = 0.2;
  } else if (preset == "fig8") {
    c.params.recoil_frequency = 1e-5;
    c.params.detuning = -0.05;
    c.ensemble_size = 24;
  } else if (preset == "lz-table") {
    c.detuning_grid = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  } else if (preset == "semiclassical") {
    c.params.detuning = 0.2;
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, handler] : key_table()) out.emplace_back(name, handler.get(*this));
  return out;
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : entries()) out += key + " = " + value + "\n";
  return out;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const KeyHandler* handler = find_key(key);
  if (handler == nullptr) throw ConfigError("unknown key '" + key + "'");
  handler->set(config, key, value);
}

namespace {

// Applies settings and reports whether grid_center was set explicitly.
bool apply_text(ExperimentConfig& config, const std::string& text, const std::string& source) {
  bool centre_set = false;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value', got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": missing key");
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
    centre_set = centre_set || key == "grid_center";
  }
  return centre_set;
}

}  // namespace

void apply_config_text(ExperimentConfig& config, const std::string& text, const std::string& source) {
  apply_text(config, text, source);
}

ExperimentConfig load_config(const std::string& preset, const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig config = preset_defaults(preset);
  bool centre_set = false;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    centre_set = apply_text(config, buf.str(), path.string());
  }
  for (const auto& [key, value] : overrides) {
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("--") + key + ": " + e.what());
    }
    centre_set = centre_set || key == "grid_center";
  }
  if (!centre_set) config.params.grid.center = config.params.initial_momentum;
  if (config.preset != preset) throw ConfigError("config names preset '" + config.preset + "' but '" + preset + "' was requested");
  validate(config);
  return config;
}

}  // namespace swatom
