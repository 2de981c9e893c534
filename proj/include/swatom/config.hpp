#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swatom/dressed.hpp"
#include "swatom/params.hpp"
#include "swatom/phase_space.hpp"

namespace swatom {

/// Names of the runnable experiments.
const std::vector<std::string>& preset_names();

/// Fully resolved description of one run. Every field has a value after `load_config`.
struct ExperimentConfig {
  std::string preset = "quantum";
  std::string output_dir;

  DimensionlessParams params{};
  double sample_interval = 1.0;

  // fig1..fig4: detunings compared side by side.
  std::vector<double> detunings{1.0, 0.2};
  // fig3/fig5/fig6 momentum window; fig3 momentum and fig4/fig5/fig6 x decimation of emitted fields.
  double p_window_min = -80.0;
  double p_window_max = 160.0;
  std::size_t p_stride = 4;
  std::size_t x_stride = 4;
  // fig5/fig6
  std::vector<double> snapshot_times{50.0, 200.0};
  Component wigner_component = Component::ground;
  std::size_t wigner_row_stride = 2;

  // Semiclassical runs.
  double sc_dt = 1e-3;
  double sc_tau_max = 1000.0;
  double initial_u = 0.0;
  double initial_v = 0.0;
  double initial_z = -1.0;

  // fig7
  std::vector<double> detuning_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
  double lyap_tau_total = 1e5;
  double lyap_renorm_interval = 1.0;
  double lyap_offset = 1e-8;
  double lyap_transient_fraction = 0.1;
  double lyap_dt = 5e-3;

  // fig8
  double energy = 36.45;
  double poincare_tau_max = 1e5;
  double poincare_dt = 5e-3;

  std::size_t ensemble_size = 5;
  std::uint64_t seed = 20100101;

  // lz-table
  std::vector<double> doppler_grid{0.0055, 0.055, 0.55};
  RegimeThresholds thresholds{};

  /// Ordered key = value pairs covering every field.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Text in the configuration file format; loading it reproduces this config.
  std::string serialize() const;
};

/// Defaults for a preset before any file or command-line override.
ExperimentConfig preset_defaults(const std::string& preset);

/// Applies one `key = value` setting. Throws ConfigError on unknown keys or type mismatches.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines with `#` comments, in order, into `config`.
void apply_config_text(ExperimentConfig& config, const std::string& text, const std::string& source = "<text>");

/// Starts from the preset defaults, applies the file at `path` (if non-empty), then the overrides
/// in order. Parameters are validated after resolution.
ExperimentConfig load_config(const std::string& preset, const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {});

}  // namespace swatom
