#include <cmath>
#include <random>

#include "doctest.h"
#include "survgame/error.hpp"
#include "survgame/integrate.hpp"
#include "survgame/surfaces.hpp"

using namespace survgame;

namespace {

const GameParams kBase{1.0, 2.0, 1.0, 7.0};

// Spin-in-place tributary integrated as an ODE in (x, y, lx, ly), with the
// evader heading recovered from the costate at every stage. Returns the
// lowest y reached before the body or the x axis stops it, and where.
struct TributaryProbe {
  double min_y = 0.0;
  double x_at_min = 0.0;
  bool crossed_axis = false;
};

TributaryProbe probe_tributary(const GameParams& p, ReducedState start,
                               double heading) {
  const double w = -p.v_r_max() / p.b();
  auto field = [&](double, const StateVec<4>& z) {
    const double a = std::atan2(-z[2], -z[3]);
    const double vx = p.v_a_max() * std::sin(a);
    const double vy = p.v_a_max() * std::cos(a);
    return StateVec<4>{-(w * z[1] + vx), -(-w * z[0] + vy), -w * z[3],
                       w * z[2]};
  };
  StateVec<4> z{start.x, start.y, -std::sin(heading), -std::cos(heading)};
  TributaryProbe out{start.y, start.x, false};
  const double dt = 1e-3;
  for (int k = 0; k < 40000; ++k) {
    z = rk4_step<4>(field, k * dt, z, dt);
    if (z[1] < out.min_y) {
      out.min_y = z[1];
      out.x_at_min = z[0];
    }
    if (z[1] < 0.0) {
      out.crossed_axis = true;
      break;
    }
    if (std::hypot(z[0], z[1]) < p.b()) break;
  }
  return out;
}

ReducedState switch_point(const GameParams& p, double s) {
  const double ts = p.b() / (p.v_r_max() * std::tan(s));
  return {(p.r_d() - ts * p.v_a_max()) * std::sin(s),
          p.r_d() * std::cos(s) + ts * (p.v_r_max() - p.v_a_max() * std::cos(s))};
}

}  // namespace

TEST_CASE("critical point") {
  const auto cp = critical_point(kBase);
  REQUIRE(cp);
  CHECK(std::abs(cp->y_c - 3.5) < 1e-9);
  CHECK(std::abs(cp->tau_c - 3.5) < 1e-9);
  CHECK(std::abs(cp->s_c - std::atan(2.0 / 7.0)) < 1e-9);
  CHECK(cp->s_c == doctest::Approx(0.27830).epsilon(1e-5));
  CHECK(cp->y_c * kBase.rho_v() == doctest::Approx(kBase.r_d()));

  CHECK_FALSE(critical_point(GameParams(1, 4, 1, 3)));
  try {
    critical_point(GameParams(1, 2, 1, 2));
    FAIL("expected a boundary error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Boundary);
  }
  CHECK_THROWS_AS(critical_point(GameParams(1, 0.5, 1, 3)), Error);
}

TEST_CASE("primary arcs and switch times") {
  ReducedState s = primary_arc(kBase, 0.0, 1.0);
  CHECK(s.x == doctest::Approx(0.0));
  CHECK(s.y == doctest::Approx(6.0));
  s = primary_arc(kBase, kPi / 4, 0.0);
  CHECK(s.x == doctest::Approx(7.0 / std::sqrt(2.0)));
  CHECK(s.y == doctest::Approx(7.0 / std::sqrt(2.0)));

  CHECK_FALSE(switch_time(0.0, kBase));
  CHECK(*switch_time(kPi / 2, kBase) == 0.0);
  CHECK(*switch_time(kPi / 4, kBase) == doctest::Approx(1.0));

  const auto cp = *critical_point(kBase);
  for (int i = 0; i < 20; ++i) {
    const double sv = cp.s_c * i / 20.0;
    const ReducedState at = primary_arc(kBase, sv, cp.tau_c);
    CHECK(std::abs(at.x) < 1e-12);
    CHECK(at.y == doctest::Approx(cp.y_c));
  }
  const ReducedState sw = primary_arc(kBase, cp.s_c, *switch_time(cp.s_c, kBase));
  CHECK(std::abs(sw.x) < 1e-9);
  CHECK(std::abs(sw.y - cp.y_c) < 1e-9);
}

TEST_CASE("TS tributaries") {
  for (double s : {0.3, 0.6, 1.0, 1.5}) {
    const StateCostate j = ts_tributary(kBase, s, 0.0);
    const ReducedState sw = primary_arc(kBase, s, *switch_time(s, kBase));
    CHECK(j.state.x == doctest::Approx(sw.x).epsilon(1e-12));
    CHECK(j.state.y == doctest::Approx(sw.y).epsilon(1e-12));
    const double g0 = j.costate.gamma();
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(ts_tributary(kBase, s, t).costate.gamma() ==
            doctest::Approx(g0).epsilon(1e-12));
      // Closed form against the ODE oracle.
      const WheelControls spin{1, -1};
      const double w = spin.rotation(1.0);
      auto field = [&](double, const StateVec<4>& z) {
        const double a = std::atan2(-z[2], -z[3]);
        return StateVec<4>{-(w * z[1] + 2 * std::sin(a)),
                           -(-w * z[0] + 2 * std::cos(a)), -w * z[3],
                           w * z[2]};
      };
      const auto path = integrate<4>(
          field, {sw.x, sw.y, -std::sin(s), -std::cos(s)}, t, 1e-3);
      const ReducedState cf = ts_tributary(kBase, s, t).state;
      CHECK(std::hypot(path.back().x[0] - cf.x, path.back().x[1] - cf.y) <
            1e-9);
    }
  }
  CHECK_THROWS_AS(ts_tributary(kBase, 0.0, 1.0), Error);
}

TEST_CASE("universal surface and its tributaries") {
  const ReducedState a = us_arc(kBase, 0.0);
  CHECK(a.x == 0.0);
  CHECK(a.y == doctest::Approx(3.5));
  CHECK(us_arc(kBase, 1.0).y == doctest::Approx(2.5));
  CHECK_THROWS_AS(us_arc(GameParams(1, 4, 1, 3), 0.0), Error);

  for (double y_u : {1.5, 2.0, 3.0, 3.5}) {
    const StateCostate t = us_tributary(kBase, y_u, 0.0);
    CHECK(t.state.x == doctest::Approx(0.0));
    CHECK(t.state.y == doctest::Approx(y_u));
    CHECK(t.costate.lambda_x / t.costate.lambda_y ==
          doctest::Approx(kBase.b() / y_u));
  }
  // The tributary leaving the critical point is the continuation of the
  // last primary arc through it.
  const double s_c = critical_point(kBase)->s_c;
  for (double t : {0.0, 0.3, 0.9}) {
    const ReducedState u = us_tributary(kBase, 3.5, t).state;
    const ReducedState v = ts_tributary(kBase, s_c, t).state;
    CHECK(std::hypot(u.x - v.x, u.y - v.y) < 1e-9);
  }
}

TEST_CASE("US/DS split against its closed form") {
  // The departure is tangent to the axis where y*sqrt(b^2+y^2) = rho_v*b^2.
  for (const GameParams& p :
       {kBase, GameParams(1, 1.5, 1, 10), GameParams(1, 1.5, 1, 3)}) {
    const auto split = find_us_ds_split(p);
    REQUIRE(split);
    const double b = p.b();
    const double rv = p.rho_v();
    const double y0 = b * std::sqrt((-1.0 + std::sqrt(1.0 + 4 * rv * rv)) / 2);
    CHECK(*split == doctest::Approx(y0).epsilon(1e-10));
  }
  CHECK(*find_us_ds_split(kBase) == doctest::Approx(1.2496210676876531));

  // Monotone: every tributary below the split heads back across the axis.
  const double y0 = *find_us_ds_split(kBase);
  for (int i = 1; i < 20; ++i) {
    const double y_u = kBase.b() + (y0 - kBase.b()) * i / 20.0;
    const StateCostate a = us_tributary(kBase, y_u, 0.0);
    const StateCostate b = us_tributary(kBase, y_u, 1e-4);
    CHECK(b.state.x < a.state.x);
  }
  for (int i = 1; i < 20; ++i) {
    const double y_u = y0 + (3.5 - y0) * i / 20.0;
    CHECK(us_tributary(kBase, y_u, 1e-4).state.x > 0.0);
  }
  CHECK_FALSE(find_us_ds_split(GameParams(1, 4, 1, 3)));
}

TEST_CASE("focal point from the TS at the reference parameters") {
  const auto fp = find_focal_point(kBase);
  REQUIRE(fp);
  CHECK(fp->source_family == ArcFamily::TsTributary);

  // Independent scan: bisect on whether the ODE tributary from the switch
  // point reaches y = 0 before the body.
  const double s_c = critical_point(kBase)->s_c;
  double lo = s_c + 1e-6;
  double hi = 1.2;
  REQUIRE_FALSE(probe_tributary(kBase, switch_point(kBase, lo), lo).crossed_axis);
  REQUIRE(probe_tributary(kBase, switch_point(kBase, hi), hi).crossed_axis);
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (probe_tributary(kBase, switch_point(kBase, mid), mid).crossed_axis ? hi
                                                                       : lo) =
        mid;
  }
  const TributaryProbe tp = probe_tributary(kBase, switch_point(kBase, lo), lo);
  CHECK(fp->source_param == doctest::Approx(lo).epsilon(1e-5));
  CHECK(fp->x_f == doctest::Approx(tp.x_at_min).epsilon(1e-4));
  // Frozen from the scan above.
  CHECK(fp->x_f == doctest::Approx(1.34267).epsilon(1e-5));
  CHECK(fp->source_param == doctest::Approx(0.447835).epsilon(1e-5));
  CHECK(fp->tau_f == doctest::Approx(3.94062).epsilon(1e-5));
}

TEST_CASE("focal point sources across parameters") {
  CHECK_FALSE(find_focal_point(GameParams(1, 1.5, 1, 3)));

  const GameParams p(1, 1.5, 1, 10);
  const auto fp = find_focal_point(p);
  REQUIRE(fp);
  CHECK(fp->source_family == ArcFamily::UsTributary);
  // Same independent scan over US tributaries, ordered by y_u.
  const double y0 = *find_us_ds_split(p);
  double lo = y0 + 1e-6;
  double hi = critical_point(p)->y_c;
  auto probe = [&](double y_u) {
    return probe_tributary(p, {0.0, y_u}, std::atan(p.b() / y_u));
  };
  REQUIRE_FALSE(probe(lo).crossed_axis);
  REQUIRE(probe(hi).crossed_axis);
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid).crossed_axis ? hi : lo) = mid;
  }
  CHECK(fp->source_param == doctest::Approx(lo).epsilon(1e-5));
  CHECK(fp->x_f == doctest::Approx(probe(lo).x_at_min).epsilon(1e-4));
}

TEST_CASE("focal surface keeps the evader on the axis") {
  const FocalPoint fp = *find_focal_point(kBase);
  const ReducedState start = fs_arc(kBase, fp, 0.0);
  CHECK(start.x == doctest::Approx(fp.x_f));
  CHECK(start.y == 0.0);
  const double dur = fs_duration(kBase, fp);
  CHECK(fs_arc(kBase, fp, dur).x == doctest::Approx(kBase.b()));
  const WheelControls spin{1, -1};
  const double w = spin.rotation(kBase.b());
  for (int i = 0; i <= 200; ++i) {
    const ReducedState s = fs_arc(kBase, fp, dur * i / 200.0);
    const double h = fs_heading(kBase, s.x);
    CHECK(std::cos(h) == doctest::Approx(w * s.x / kBase.v_a_max()));
    const ReducedRate f = reduced_dynamics(kBase, s, spin, {2.0, h});
    CHECK(std::abs(f.dy) < 1e-10);
  }
  CHECK_THROWS_AS(fs_arc(kBase, fp, dur * 1.01), Error);
  CHECK_THROWS_AS(fs_heading(kBase, 2.5), Error);
}

TEST_CASE("FS tributaries leave the axis tangentially") {
  const FocalPoint fp = *find_focal_point(kBase);
  for (double x_t : {1.0, 1.1, 1.25, fp.x_f}) {
    const StateCostate a = fs_tributary(kBase, fp, x_t, 0.0);
    CHECK(std::abs(a.state.y) < 1e-8);
    CHECK(a.state.x == doctest::Approx(x_t));
    const double h = 1e-5;
    const double dy = (fs_tributary(kBase, fp, x_t, h).state.y - a.state.y) / h;
    CHECK(std::abs(dy) < 1e-4);
    // Analytically the first derivative vanishes; check it through the
    // second-order behaviour: y(h) scales with h^2.
    const double y1 = fs_tributary(kBase, fp, x_t, 1e-3).state.y;
    const double y2 = fs_tributary(kBase, fp, x_t, 2e-3).state.y;
    CHECK(y2 / y1 == doctest::Approx(4.0).epsilon(1e-2));
  }
  CHECK_THROWS_AS(fs_tributary(kBase, fp, 0.9, 0.0), Error);
}

TEST_CASE("property: mirror maps are symmetries of the dynamics") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::uniform_real_distribution<double> wheel(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 200; ++i) {
    const ReducedState s{d(rng), d(rng)};
    const WheelControls u{wheel(rng), wheel(rng)};
    const EvaderControl v{2.0, ang(rng)};
    const Costate c{d(rng), d(rng)};
    const ReducedRate f = reduced_dynamics(kBase, s, u, v);
    const double h0 = hamiltonian(kBase, s, c, u, v);
    for (Quadrant q : kAllQuadrants) {
      const ReducedRate g =
          reduced_dynamics(kBase, mirror(s, q), mirror(u, q), mirror(v, q));
      CHECK(g.dx == doctest::Approx(mirrors_x(q) ? -f.dx : f.dx));
      CHECK(g.dy == doctest::Approx(mirrors_y(q) ? -f.dy : f.dy));
      CHECK(hamiltonian(kBase, mirror(s, q), mirror(c, q), mirror(u, q),
                        mirror(v, q)) == doctest::Approx(h0));
      const ReducedState back = mirror(mirror(s, q), q);
      CHECK(back.x == s.x);
      CHECK(back.y == s.y);
    }
  }
  CHECK(quadrant_of({1, 1}) == Quadrant::I);
  CHECK(quadrant_of({1, -1}) == Quadrant::II);
  CHECK(quadrant_of({-1, -1}) == Quadrant::III);
  CHECK(quadrant_of({-1, 1}) == Quadrant::IV);
}

TEST_CASE("surface model arcs") {
  const SurfaceModel m(kBase);
  for (ArcFamily f : kAllFamilies) CHECK(m.family_present(f));
  for (ArcFamily f : kAllFamilies) {
    const ParamRange r = m.param_range(f);
    const double param = has_family_param(f) ? 0.5 * (r.lo + r.hi) : 0.0;
    const TrajectoryArc arc = m.build_arc(f, param, 0.02);
    REQUIRE(arc.samples.size() >= 2);
    for (std::size_t i = 1; i < arc.samples.size(); ++i) {
      CHECK(arc.samples[i].tau > arc.samples[i - 1].tau);
    }
    CHECK(arc.samples.front().tau == doctest::Approx(m.tau_begin(f, param)));
    if (const auto j = m.parent(f, param)) {
      const ArcPoint pp = m.evaluate(j->parent, j->parent_param,
                                     j->parent_local_tau);
      const ReducedState s0 = arc.samples.front().state;
      CHECK(std::hypot(pp.state.x - s0.x, pp.state.y - s0.y) < 1e-8);
      CHECK(pp.tau == doctest::Approx(arc.samples.front().tau));
    }
  }
  CHECK_THROWS_AS(SurfaceModel(GameParams(1, 4, 1, 3))
                      .build_arc(ArcFamily::Universal, 0.0, 0.02),
                  Error);
}
