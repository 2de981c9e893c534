#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "swatom/dressed.hpp"
#include "swatom/errors.hpp"
#include "swatom/phase_space.hpp"
#include "swatom/qdyn.hpp"

using namespace swatom;

namespace {

constexpr double kPi = std::numbers::pi;

DimensionlessParams small_params(double sigma = 2.0, double x0 = 0.0) {
  DimensionlessParams p;
  p.grid.center = 10.0;
  p.grid.half_span = 32;
  p.grid.subdivisions = 8;
  p.initial_momentum = 10.0;
  p.packet_width = sigma;
  p.initial_position = x0;
  return p;
}

QuantumState random_state(const MomentumGridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  QuantumState s = zero_state(grid);
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    s.a[i] = {g(rng), g(rng)};
    s.b[i] = {g(rng), g(rng)};
  }
  const double n = std::sqrt(s.norm());
  for (auto& v : s.a) v /= n;
  for (auto& v : s.b) v /= n;
  return s;
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments position_moments(const PositionState& pos) {
  const auto d = pos.density();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double x = pos.grid.at(j);
    m0 += d[j] * pos.grid.spacing;
    m1 += x * d[j] * pos.grid.spacing;
    m2 += x * x * d[j] * pos.grid.spacing;
  }
  const double mean = m1 / m0;
  return {mean, std::sqrt(m2 / m0 - mean * mean)};
}

}  // namespace

TEST_SUITE("phase_space") {
  TEST_CASE("position grid is dual to the momentum grid") {
    const MomentumGridSpec g = small_params().grid;
    const PositionGrid x = position_grid(g);
    CHECK(x.count == g.size());
    CHECK(x.period() == doctest::Approx(2.0 * kPi * g.subdivisions).epsilon(1e-14));
    CHECK(std::abs(x.at((x.count - 1) / 2)) < 1e-15);
  }

  TEST_CASE("a momentum Gaussian of width sigma has position width 1/(2 sigma)") {
    for (const double sigma : {1.0, 2.0, 3.0}) {
      const auto pos = to_position(initial_packet(small_params(sigma)));
      const Moments m = position_moments(pos);
      CHECK(std::abs(pos.norm() - 1.0) < 1e-10);
      CHECK(std::abs(m.mean) < 1e-10);
      CHECK(m.std == doctest::Approx(0.5 / sigma).epsilon(1e-6));
    }
  }

  TEST_CASE("a phase ramp in momentum shifts the position density") {
    const double x0 = 1.25;
    const Moments m = position_moments(to_position(initial_packet(small_params(2.0, x0))));
    CHECK(m.mean == doctest::Approx(x0).epsilon(1e-9));
    CHECK(m.std == doctest::Approx(0.25).epsilon(1e-6));
  }

  TEST_CASE("transform round trip and Parseval on random states") {
    const MomentumGridSpec g = small_params().grid;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const QuantumState s = random_state(g, seed);
      const PositionState pos = to_position(s);
      CHECK(std::abs(pos.norm() - s.norm()) < 1e-10);
      const QuantumState back = to_momentum(pos);
      double err = 0.0;
      for (std::size_t i = 0; i < s.a.size(); ++i) {
        err = std::max({err, std::abs(back.a[i] - s.a[i]), std::abs(back.b[i] - s.b[i])});
      }
      CHECK(err < 1e-10);
    }
  }

  TEST_CASE("dressed occupations add up to the bare density") {
    const MomentumGridSpec g = small_params().grid;
    const PositionState pos = to_position(random_state(g, 7));
    const auto bare = pos.density();
    for (const double detuning : {-0.7, -0.05, 0.0, 0.2, 1.0}) {
      const DressedOccupations occ = dressed_occupations(pos, detuning);
      double err = 0.0;
      for (std::size_t j = 0; j < bare.size(); ++j) {
        REQUIRE(occ.plus[j] >= 0.0);
        REQUIRE(occ.minus[j] >= 0.0);
        err = std::max(err, std::abs(occ.plus[j] + occ.minus[j] - bare[j]));
      }
      CHECK(err < 1e-12);
    }
  }

  TEST_CASE("far from resonance the ground state follows the potential of energy -Delta/2") {
    // Ground energy is +Delta/2 in the rotating frame: upper potential for Delta > 0, lower for Delta < 0.
    const PositionState pos = to_position(initial_packet(small_params()));
    for (const double detuning : {10.0, -10.0}) {
      const DressedOccupations occ = dressed_occupations(pos, detuning);
      double plus = 0.0, total = 0.0;
      for (std::size_t j = 0; j < occ.minus.size(); ++j) {
        plus += occ.plus[j];
        total += occ.minus[j] + occ.plus[j];
      }
      CHECK((detuning > 0 ? plus / total : 1.0 - plus / total) > 0.99);
    }
  }

  TEST_CASE("Wigner function of a Gaussian packet") {
    // Centre on a grid point so the peak is sampled.
    const double x0 = 5.0 * position_grid(small_params().grid).spacing;
    const QuantumState s = initial_packet(small_params(2.0, x0));
    const Field2D w = wigner(s, Component::ground);
    REQUIRE(w.shape_ok());
    CHECK(std::stod(w.metadata.at("imag_residue")) < 1e-10);
    double lo = 0.0, hi = 0.0;
    for (const double v : w.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // A pure Gaussian has a non-negative Wigner function bounded by 1/pi.
    CHECK(lo > -1e-10);
    CHECK(hi <= 1.0 / kPi + 1e-10);
    CHECK(hi == doctest::Approx(1.0 / kPi).epsilon(1e-6));

    const auto pm = wigner_momentum_marginal(w, s.grid);
    const auto pd = momentum_distribution(s);
    double perr = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) perr = std::max(perr, std::abs(pm[i] - pd.values[i]));
    CHECK(perr < 1e-6);

    const auto xm = wigner_position_marginal(w);
    const auto xd = to_position(s).density();
    double xerr = 0.0;
    for (std::size_t j = 0; j < xm.size(); ++j) xerr = std::max(xerr, std::abs(xm[j] - xd[j]));
    CHECK(xerr < 1e-6);
  }

  TEST_CASE("Wigner marginals hold for an arbitrary state") {
    const QuantumState s = random_state(small_params().grid, 11);
    for (const Component c : {Component::ground, Component::excited}) {
      const Field2D w = wigner(s, c);
      CHECK(std::stod(w.metadata.at("imag_residue")) < 1e-10);
      const auto pm = wigner_momentum_marginal(w, s.grid);
      const auto& amp = c == Component::ground ? s.b : s.a;
      double err = 0.0;
      for (std::size_t i = 0; i < pm.size(); ++i) err = std::max(err, std::abs(pm[i] - std::norm(amp[i])));
      CHECK(err < 1e-6);
    }
  }

  TEST_CASE("Wigner evaluation needs an even number of subdivisions") {
    DimensionlessParams p = small_params();
    p.grid.subdivisions = 7;
    const QuantumState s = initial_packet(p);
    CHECK_THROWS_AS(wigner(s, Component::ground), GridError);
  }

  TEST_CASE("Wigner window restricts rows and columns") {
    const QuantumState s = initial_packet(small_params());
    WignerWindow win;
    win.p_min = 5.0;
    win.p_max = 15.0;
    win.x_stride = 4;
    win.row_stride = 2;
    const Field2D w = wigner(s, Component::ground, win);
    CHECK(w.y.min >= 5.0 - 1e-12);
    CHECK(w.y.max <= 15.0 + 1e-12);
    CHECK(w.x.count == (s.grid.size() + 3) / 4);
  }

  TEST_CASE("co-moving frame: zero velocity is the identity") {
    Field2D f(Axis{"x", 0.0, 9.0, 10}, Axis{"tau", 0.0, 4.0, 5}, "v");
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = std::sin(0.37 * static_cast<double>(k));
    const ComovingField c = comoving_frame(f, 0.0);
    REQUIRE(c.field.shape_ok());
    for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(c.field.values[k] == doctest::Approx(f.values[k]));
  }

  TEST_CASE("co-moving frame: a constant field stays constant") {
    Field2D f(Axis{"x", 0.0, 9.0, 10}, Axis{"tau", 0.0, 4.0, 5}, "v");
    std::fill(f.values.begin(), f.values.end(), 0.75);
    const ComovingField c = comoving_frame(f, 0.37);
    for (const double v : c.field.values) CHECK(v == doctest::Approx(0.75).epsilon(1e-14));
  }

  TEST_CASE("co-moving frame: a feature moving with the frame becomes stationary") {
    // Period 32 on 32 points; f(x, tau) = cos(2 pi (x - v tau) / 32) with v = 1 (one sample per row).
    const std::size_t n = 32;
    const double v = 1.0;
    Field2D f(Axis{"x", 0.0, 31.0, n}, Axis{"tau", 0.0, 7.0, 8}, "v");
    for (std::size_t iy = 0; iy < 8; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) {
        f.at(ix, iy) = std::cos(2.0 * kPi * (static_cast<double>(ix) - v * static_cast<double>(iy)) / 32.0);
      }
    }
    const ComovingField c = comoving_frame(f, v);
    for (std::size_t iy = 0; iy < 8; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) CHECK(c.field.at(ix, iy) == doctest::Approx(f.at(ix, 0)).epsilon(1e-12));
    }
  }

  TEST_CASE("node lines move against the frame velocity") {
    Field2D f(Axis{"x", -kPi, kPi, 64}, Axis{"tau", 0.0, 3.0, 4}, "v");
    const double v = 0.1;
    const ComovingField c = comoving_frame(f, v);
    REQUIRE(c.nodes.tau.size() == 4);
    REQUIRE(!c.nodes.x.empty());
    const double period = f.x.step() * static_cast<double>(f.x.count);
    for (const auto& line : c.nodes.x) {
      for (std::size_t r = 1; r < line.size(); ++r) {
        double d = std::remainder(line[r] - line[r - 1] + v * (c.nodes.tau[r] - c.nodes.tau[r - 1]), period);
        CHECK(std::abs(d) < 1e-12);
      }
      for (const double x : line) {
        CHECK(x >= f.x.min - 1e-12);
        CHECK(x < f.x.min + period + 1e-12);
      }
      CHECK(std::abs(std::cos(line[0])) < 1e-12);
    }
  }

  TEST_CASE("node-line jump: zero for smooth-flat fields, the step height for a step at the node") {
    // Odd count keeps the nodes between samples.
    const std::size_t n = 63;
    Field2D flat(Axis{"x", -kPi, kPi - 2.0 * kPi / n, n}, Axis{"tau", 0.0, 1.0, 2}, "v");
    std::fill(flat.values.begin(), flat.values.end(), 0.3);
    CHECK(node_line_jump(comoving_frame(flat, 0.0)) == doctest::Approx(0.0));

    // Step of height 1 between sample pairs straddling x = +-pi/2.
    Field2D step = flat;
    for (std::size_t iy = 0; iy < 2; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) step.at(ix, iy) = std::cos(step.x.at(ix)) > 0.0 ? 1.0 : 0.0;
    }
    CHECK(node_line_jump(comoving_frame(step, 0.0)) == doctest::Approx(1.0));
  }
}
