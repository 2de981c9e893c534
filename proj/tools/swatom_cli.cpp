#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "swatom/config.hpp"
#include "swatom/errors.hpp"
#include "swatom/presets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIntegrity = 3;

// Turns leftover `--key value` / `--key=value` arguments into ordered overrides.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) throw swatom::ConfigError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw swatom::ConfigError("option '" + arg + "' needs a value");
      value = extras[++i];
    }
    for (char& ch : key) {
      if (ch == '-') ch = '_';
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

const std::map<std::string, std::string> kSummaries{
    {"fig1", "Dressed potentials E+/E- over one period"},
    {"fig2", "Mean momentum versus time for each detuning"},
    {"fig3", "Momentum density P(p, tau) for each detuning"},
    {"fig4", "|C-(x, tau)|^2 in the co-moving frame with node lines"},
    {"fig5", "Wigner snapshots at detuning 1"},
    {"fig6", "Wigner snapshots at detuning 0.2"},
    {"fig7", "Maximal Lyapunov exponent versus detuning"},
    {"fig8", "Poincare sections at the nodes for an energy-shell ensemble"},
    {"lz-table", "Landau-Zener probability and regime over a (detuning, Doppler) grid"},
    {"quantum", "Single quantum run: observables and final momentum density"},
    {"semiclassical", "Single semiclassical trajectory with conserved quantities"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level atom in a standing laser wave: quantum and semiclassical experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(swatom::kEngineVersion));

  struct Run {
    std::string config_path;
    bool print_only = false;
  };
  std::vector<std::pair<CLI::App*, std::string>> presets;
  Run run;
  for (const auto& name : swatom::preset_names()) {
    CLI::App* sub = app.add_subcommand(name, kSummaries.count(name) ? kSummaries.at(name) : "Run '" + name + "'");
    sub->add_option("--config", run.config_path, "Configuration file with `key = value` lines");
    sub->add_flag("--print-config", run.print_only, "Print the resolved configuration and exit");
    sub->allow_extras();
    sub->footer("Any configuration key can be overridden with --key value.");
    presets.emplace_back(sub, name);
  }

  std::string manifest_path;
  CLI::App* verify = app.add_subcommand("verify", "Check the checksums recorded in a run manifest");
  verify->add_option("manifest", manifest_path, "Path to run_manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (verify->parsed()) {
      const auto bad = swatom::verify_manifest(manifest_path);
      for (const auto& path : bad) std::cerr << "checksum mismatch: " << path << "\n";
      if (bad.empty()) std::cout << "all files match\n";
      return bad.empty() ? kExitOk : kExitIntegrity;
    }
    for (const auto& [sub, name] : presets) {
      if (!sub->parsed()) continue;
      const auto overrides = parse_overrides(sub->remaining());
      const swatom::ExperimentConfig config = swatom::load_config(name, run.config_path, overrides);
      if (run.print_only) {
        std::cout << config.serialize();
        return kExitOk;
      }
      const unsigned workers = swatom::worker_count_from_env();
      const swatom::RunManifest m = swatom::run_preset(config, workers);
      std::cout << name << ": " << m.files.size() << " files in " << config.output_dir << " (" << m.wall_time_s
                << " s)\n";
      return kExitOk;
    }
  } catch (const swatom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const swatom::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
