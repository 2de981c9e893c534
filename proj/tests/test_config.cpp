#include <functional>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"

#include "swatom/config.hpp"
#include "swatom/errors.hpp"
#include "swatom/io.hpp"

using namespace swatom;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("swatom_cfg_" + std::to_string(::getpid()) + "_" + name);
  write_atomic(p, text);
  return p;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("an empty file resolves to the preset defaults") {
    const fs::path p = temp_file("empty.cfg", "");
    const ExperimentConfig c = load_config("fig2", p);
    const ExperimentConfig d = load_config("fig2", {});
    CHECK(c.serialize() == d.serialize());
    CHECK(c.params.detuning == 1.0);
    CHECK(c.params.packet_width == 2.0);
    CHECK(c.params.grid.center == 55.0);
    CHECK(c.output_dir == "out/fig2");
    fs::remove(p);
  }

  TEST_CASE("preset defaults differ where the experiments differ") {
    CHECK(load_config("fig6", {}).params.detuning == 0.2);
    const ExperimentConfig f8 = load_config("fig8", {});
    CHECK(f8.params.recoil_frequency == 1e-5);
    CHECK(f8.params.detuning == -0.05);
    CHECK(f8.ensemble_size >= 20);
    CHECK_THROWS_AS(preset_defaults("fig99"), ConfigError);
  }

  TEST_CASE("file settings, comments and command-line overrides apply in order") {
    const fs::path p = temp_file("set.cfg", "# comment\ndetuning = 0.2   # trailing\n\ninitial_momentum = 40\n");
    const ExperimentConfig c = load_config("quantum", p, {{"detuning", "0.3"}});
    CHECK(c.params.detuning == 0.3);
    CHECK(c.params.initial_momentum == 40.0);
    CHECK(c.params.grid.center == 40.0);  // follows p0 unless set
    const ExperimentConfig pinned = load_config("quantum", p, {{"grid_center", "50"}});
    CHECK(pinned.params.grid.center == 50.0);
    fs::remove(p);
  }

  TEST_CASE("malformed line is reported with file and line number") {
    const fs::path p = temp_file("bad.cfg", "detuning 0.2\n");
    const std::string msg = error_of([&] { load_config("quantum", p); });
    CHECK(msg.find(p.string() + ":1:") != std::string::npos);
    CHECK(msg.find("expected 'key = value'") != std::string::npos);
    fs::remove(p);
  }

  TEST_CASE("unknown keys and type mismatches are rejected") {
    ExperimentConfig c;
    CHECK_THROWS_AS(apply_setting(c, "detunning", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "detuning", "one"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "grid_half_span", "2.5"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "wigner_component", "both"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "snapshot_times", ""), ConfigError);
    const std::string msg = error_of([] { load_config("quantum", {}, {{"bogus", "1"}}); });
    CHECK(msg.find("--bogus") != std::string::npos);
  }

  TEST_CASE("resolved values are validated") {
    CHECK_THROWS_AS(load_config("quantum", {}, {{"packet_width", "0"}}), ConfigError);
    CHECK_THROWS_AS(load_config("quantum", {}, {{"p_window_max", "-100"}}), ConfigError);
    CHECK_THROWS_AS(load_config("quantum", {}, {{"ensemble_size", "0"}}), ConfigError);
    CHECK_THROWS_AS(load_config("quantum", {}, {{"preset", "fig2"}}), ConfigError);
  }

  TEST_CASE("serialize then load reproduces the config") {
    for (const auto& name : preset_names()) {
      const ExperimentConfig c = load_config(name, {}, {{"detuning", "0.123456789"}, {"seed", "77"}});
      const fs::path p = temp_file(name + ".cfg", c.serialize());
      const ExperimentConfig back = load_config(name, p);
      CHECK(back.serialize() == c.serialize());
      CHECK(back.params.detuning == 0.123456789);
      CHECK(back.seed == 77);
      fs::remove(p);
    }
  }
}
