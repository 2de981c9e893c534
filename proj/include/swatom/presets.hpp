#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swatom/config.hpp"

namespace swatom {

inline constexpr const char* kEngineVersion = "0.1.0";

struct EmittedFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Record of one preset run, written as run_manifest.json after every other file.
struct RunManifest {
  ExperimentConfig config;
  std::string engine_version = kEngineVersion;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::map<std::string, double> drift;  // invariant name -> worst drift seen
  std::vector<EmittedFile> files;
  bool ok = true;
  std::string error_kind;  // "integrity", "config", "io" or "error" when !ok
  std::string error;

  std::string to_json() const;
};

/// Worker count from SWATOM_WORKERS (default 1).
unsigned worker_count_from_env();

/// Runs the experiment named by config.preset, writing data files, a plot script and the manifest
/// into config.output_dir. On failure the manifest records the error and the exception propagates.
RunManifest run_preset(const ExperimentConfig& config, unsigned workers = 1);

/// Recomputes the checksums listed in a manifest; returns the paths that do not match.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace swatom
