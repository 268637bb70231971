#include <cmath>
#include <random>

#include "doctest.h"
#include "survgame/error.hpp"
#include "survgame/game_core.hpp"

using namespace survgame;

namespace {

const GameParams kBase{1.0, 2.0, 1.0, 7.0};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidParameters;
}

}  // namespace

TEST_CASE("parameters are validated and ratios stored exactly") {
  const GameParams p(1.5, 3.0, 0.5, 4.0);
  CHECK(p.rho_v() == 3.0 / 1.5);
  CHECK(p.rho_d() == 0.5 / 4.0);
  CHECK(kind_of([] { GameParams(0.0, 1.0, 1.0, 2.0); }) ==
        ErrorKind::InvalidParameters);
  CHECK(kind_of([] { GameParams(1.0, -1.0, 1.0, 2.0); }) ==
        ErrorKind::InvalidParameters);
  CHECK(kind_of([] { GameParams(1.0, 1.0, 0.0, 2.0); }) ==
        ErrorKind::InvalidParameters);
  CHECK(kind_of([] { GameParams(1.0, 1.0, 2.0, 2.0); }) ==
        ErrorKind::InvalidParameters);
  CHECK(kind_of([] { GameParams(1.0, NAN, 1.0, 2.0); }) ==
        ErrorKind::InvalidParameters);
  // Slower evaders are representable, only synthesis refuses them.
  const GameParams slow(1.0, 0.5, 1.0, 3.0);
  CHECK(kind_of([&] { slow.require_faster_evader(); }) ==
        ErrorKind::UnsupportedRegime);
  CHECK_NOTHROW(kBase.require_faster_evader());
}

TEST_CASE("realistic to reduced coordinates") {
  auto red = [](RealisticState rs) { return to_reduced(rs); };
  ReducedState s = red({0, 0, 0, 1, 0});
  CHECK(s.x == doctest::Approx(0.0));
  CHECK(s.y == doctest::Approx(1.0));
  s = red({0, 0, kPi / 2, 0, 1});
  CHECK(s.x == doctest::Approx(0.0));
  CHECK(s.y == doctest::Approx(1.0));
  s = red({1, 1, 0, 1, 4});
  CHECK(s.x == doctest::Approx(-3.0));
  CHECK(s.y == doctest::Approx(0.0));
}

TEST_CASE("reduced dynamics") {
  ReducedRate f = reduced_dynamics(kBase, {0, 1}, {1, 1}, {2, 0});
  CHECK(f.dx == doctest::Approx(0.0));
  CHECK(f.dy == doctest::Approx(1.0));
  f = reduced_dynamics(kBase, {0, 3}, {0, 0}, {0, 0});
  CHECK(f.dx == 0.0);
  CHECK(f.dy == 0.0);
  f = reduced_dynamics(kBase, {1, 0}, {1, -1}, {0, 0});
  CHECK(f.dx == doctest::Approx(0.0));
  CHECK(f.dy == doctest::Approx(1.0));

  f = retro_reduced_dynamics(kBase, {0, 1}, {1, 1}, {2, 0});
  CHECK(f.dx == doctest::Approx(0.0));
  CHECK(f.dy == doctest::Approx(-1.0));
  f = retro_reduced_dynamics(kBase, {0, 1}, {1, -1}, {0, 0});
  CHECK(f.dx == doctest::Approx(1.0));
  CHECK(f.dy == doctest::Approx(0.0));

  CHECK(kind_of([] { reduced_dynamics(kBase, {0, 1}, {1.5, 1}, {0, 0}); }) ==
        ErrorKind::ControlOutOfBounds);
  CHECK(kind_of([] { reduced_dynamics(kBase, {0, 1}, {1, 1}, {2.5, 0}); }) ==
        ErrorKind::ControlOutOfBounds);
  CHECK(kind_of([] { reduced_dynamics(kBase, {0, 1}, {1, 1}, {-0.1, 0}); }) ==
        ErrorKind::ControlOutOfBounds);
}

TEST_CASE("polar dynamics") {
  PolarRate f = polar_dynamics(kBase, {3, 0}, {1, 1}, {2, 0});
  CHECK(f.dr == doctest::Approx(1.0));
  CHECK(f.dphi == doctest::Approx(0.0));
  f = polar_dynamics(kBase, {3, 1}, {0, 0}, {0, 0});
  CHECK(f.dr == 0.0);
  CHECK(f.dphi == 0.0);
  f = polar_dynamics(kBase, {2, kPi / 2}, {1, 1}, {0, 0});
  CHECK(f.dr == doctest::Approx(0.0));
  CHECK(f.dphi == doctest::Approx(0.5));
  CHECK(kind_of([] { to_polar({0.0, 0.0}); }) == ErrorKind::PolarSingularity);
}

TEST_CASE("realistic dynamics") {
  RealisticRate f = realistic_dynamics(kBase, {0, 0, 0.3, 2, 2}, {1, 1}, {0, 0});
  CHECK(f.dtheta_r == 0.0);
  CHECK(std::hypot(f.dx_r, f.dy_r) == doctest::Approx(1.0));
  CHECK(std::atan2(f.dy_r, f.dx_r) == doctest::Approx(0.3));
  f = realistic_dynamics(kBase, {0, 0, 0.3, 2, 2}, {1, -1}, {0, 0});
  CHECK(f.dtheta_r == doctest::Approx(-1.0));
  CHECK(f.dx_r == doctest::Approx(0.0));
  CHECK(f.dy_r == doctest::Approx(0.0));
  f = realistic_dynamics(kBase, {0, 0, 0, 2, 2}, {0, 0}, {2, kPi / 2});
  CHECK(f.dx_a == doctest::Approx(0.0));
  CHECK(f.dy_a == doctest::Approx(2.0));
}

TEST_CASE("property: chart and frame maps are consistent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  std::uniform_real_distribution<double> wheel(-1.0, 1.0);
  std::uniform_real_distribution<double> speed(0.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const RealisticState rs{pos(rng), pos(rng), ang(rng), pos(rng), pos(rng)};
    const WheelControls u{wheel(rng), wheel(rng)};
    const WorldEvaderControl w{speed(rng), wrap_two_pi(ang(rng))};
    const ReducedState s = to_reduced(rs);
    if (s.radius() < 0.1) continue;

    // Polar round trip.
    const ReducedState back = from_polar(to_polar(s));
    CHECK(back.x == doctest::Approx(s.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(s.y).epsilon(1e-12));

    // World/reduced evader heading round trip.
    const EvaderControl v = to_reduced_control(w, rs.theta_r);
    const WorldEvaderControl w2 = to_world(v, rs.theta_r);
    CHECK(std::abs(angle_diff(w2.heading, w.heading)) < 1e-12);

    // d/dt of to_reduced along the realistic flow, by central differences,
    // equals the reduced field.
    const RealisticRate rr = realistic_dynamics(kBase, rs, u, w);
    const double h = 1e-6;
    auto shifted = [&](double k) {
      return to_reduced({rs.x_r + k * rr.dx_r, rs.y_r + k * rr.dy_r,
                         rs.theta_r + k * rr.dtheta_r, rs.x_a + k * rr.dx_a,
                         rs.y_a + k * rr.dy_a});
    };
    const ReducedState sp = shifted(h);
    const ReducedState sm = shifted(-h);
    const ReducedRate f = reduced_dynamics(kBase, s, u, v);
    CHECK((sp.x - sm.x) / (2 * h) == doctest::Approx(f.dx).epsilon(1e-6));
    CHECK((sp.y - sm.y) / (2 * h) == doctest::Approx(f.dy).epsilon(1e-6));

    // Polar field is the chain rule of the Cartesian one.
    const PolarState ps = to_polar(s);
    const PolarRate pr = polar_dynamics(kBase, ps, u, v);
    const double r = ps.r;
    CHECK(pr.dr == doctest::Approx((s.x * f.dx + s.y * f.dy) / r).epsilon(1e-9));
    CHECK(pr.dphi ==
          doctest::Approx((s.y * f.dx - s.x * f.dy) / (r * r)).epsilon(1e-9));

    // Retro field is the negation.
    const ReducedRate g = retro_reduced_dynamics(kBase, s, u, v);
    CHECK(g.dx == -f.dx);
    CHECK(g.dy == -f.dy);
  }
}

TEST_CASE("angle helpers") {
  CHECK(wrap_two_pi(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_two_pi(kTwoPi) == 0.0);
  CHECK(angle_diff(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
  CHECK(angle_diff(kPi, 0.0) == doctest::Approx(kPi));
}
