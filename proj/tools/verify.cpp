#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "survgame/oracle.hpp"
#include "survgame/simulate.hpp"

namespace survgame::cli {

namespace {

constexpr double kHamiltonianTol = 1e-6;
constexpr double kJunctionTol = 1e-8;
constexpr double kReintegrationTol = 1e-3;
constexpr double kReintegrationStep = 5e-4;
constexpr double kMirrorTol = 1e-9;
constexpr double kFanTol = 1e-6;
constexpr double kOracleTol = 0.03;

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

RealisticState placed(const ReducedState& s) {
  return {0.0, 0.0, 0.5 * kPi, s.x, s.y};
}

SuiteResult hamiltonian_suite(const GameParams& p, const Partition& part,
                              const VerifyOptions& opts) {
  const SurfaceModel& m = part.model();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SuiteResult r{"hamiltonian", "pass", json::object()};
  for (ArcFamily f : kAllFamilies) {
    if (!m.family_present(f)) continue;
    const ParamRange pr = m.param_range(f);
    const int params = has_family_param(f) ? 50 : 1;
    double worst = 0.0;
    int n = 0;
    for (int i = 0; i < params; ++i) {
      const double param =
          has_family_param(f) ? pr.lo + (pr.hi - pr.lo) * (i + 0.5) / params : 0.0;
      const double len = m.stop(f, param).local_tau;
      for (int j = 0; j < 1000 / params; ++j, ++n) {
        const ArcPoint a = m.evaluate(f, param, len * unit(rng));
        worst = std::max(worst, std::abs(hamiltonian(p, a.state, a.costate,
                                                     a.pursuer, a.evader)));
      }
    }
    if (worst > kHamiltonianTol) r.status = "fail";
    r.metrics[std::string(to_string(f))] = {{"samples", n},
                                            {"max_abs_h", jnum(worst)}};
  }
  return r;
}

SuiteResult continuity_suite(const GameParams& p, const Partition& part,
                             const VerifyOptions& opts) {
  const SurfaceModel& m = part.model();
  double gap = 0.0;
  int handoffs = 0;
  for (ArcFamily f : kAllFamilies) {
    if (!m.family_present(f)) continue;
    const ParamRange pr = m.param_range(f);
    const int count = has_family_param(f) ? 101 : 1;
    for (int i = 0; i < count; ++i) {
      const double param =
          count > 1 ? pr.lo + (pr.hi - pr.lo) * i / (count - 1) : 0.0;
      const auto j = m.parent(f, param);
      if (!j) continue;
      const ReducedState c = m.evaluate(f, param, 0.0).state;
      const ReducedState q =
          m.evaluate(j->parent, j->parent_param, j->parent_local_tau).state;
      gap = std::max(gap, std::hypot(c.x - q.x, c.y - q.y));
      ++handoffs;
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, part.arcs().size() - 1);
  double worst = 0.0;
  int done = 0;
  while (done < opts.reintegrations) {
    const TrajectoryArc& a = part.arcs()[pick(rng)];
    if (a.samples.size() < 3) continue;
    const ArcPoint& pt = a.samples[a.samples.size() / 2];
    const double rad = pt.state.radius();
    if (rad < 1.01 * p.b() || rad > 0.99 * p.r_d()) continue;
    const double dt = kReintegrationStep * p.b() / p.v_r_max();
    const SimulationRun run = simulate_game(placed(pt.state), part, dt);
    worst = std::max(worst, std::abs(run.escape_time - pt.tau) / pt.tau);
    ++done;
  }
  const bool ok = gap <= kJunctionTol && worst <= kReintegrationTol;
  return {"continuity", ok ? "pass" : "fail",
          {{"handoffs", handoffs},
           {"max_junction_gap", jnum(gap)},
           {"reintegrations", done},
           {"max_relative_tau_error", jnum(worst)}}};
}

SuiteResult symmetry_suite(const GameParams& p, const Partition& part,
                           const VerifyOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  const double lo = 1.02 * p.b();
  const double hi = 0.98 * p.r_d();
  std::uniform_real_distribution<double> r2(lo * lo, hi * hi);
  std::uniform_real_distribution<double> ang(0.0, 0.5 * kPi);
  double val = 0.0;
  double head = 0.0;
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const double r = std::sqrt(r2(rng));
    const double a = ang(rng);
    const ReducedState s{r * std::sin(a), r * std::cos(a)};
    const StrategyResult base = locate(s, part);
    for (Quadrant q : {Quadrant::II, Quadrant::III, Quadrant::IV}) {
      const StrategyResult m = locate(mirror(s, q), part);
      val = std::max(val, std::abs(m.time_to_escape - base.time_to_escape));
      if (base.multiple) continue;
      if (!(m.pursuer == mirror(base.pursuer, q))) ++bad;
      head = std::max(head,
                      std::abs(angle_diff(m.evader.v2, mirror(base.evader, q).v2)));
    }
  }
  const bool ok = val <= kMirrorTol && head <= kMirrorTol && bad == 0;
  return {"symmetry", ok ? "pass" : "fail",
          {{"states", 500},
           {"max_value_error", jnum(val)},
           {"max_heading_error", jnum(head)},
           {"pursuer_mismatches", bad}}};
}

SuiteResult fan_suite(const GameParams&, const Partition& part,
                      const VerifyOptions&) {
  const auto& cp = part.loci().critical_point;
  if (!cp) return {"fan", "skipped", {{"reason", "no critical point"}}};
  double lo = INFINITY;
  double hi = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const double heading = cp->s_c * i / 19.0;
    SimulationOptions so;
    so.evader_override = [heading](double, const ReducedState&,
                                   const EvaderControl& best) {
      return EvaderControl{best.v1, heading};
    };
    const double t =
        simulate_game(placed({0.0, cp->y_c}), part, 1e-3, so).escape_time;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return {"fan", hi - lo <= kFanTol ? "pass" : "fail",
          {{"headings", 20},
           {"tau_c", jnum(cp->tau_c)},
           {"min_escape", jnum(lo)},
           {"max_escape", jnum(hi)},
           {"spread", jnum(hi - lo)}}};
}

json report_stats(const CompareReport& rep) {
  return {{"used", rep.used},
          {"excluded", rep.excluded},
          {"max_relative_error", jnum(rep.max_rel_error)},
          {"mean_relative_error", jnum(rep.mean_rel_error)},
          {"max_absolute_error", jnum(rep.max_abs_error)}};
}

SuiteResult oracle_suite(const GameParams& p, const Partition& part,
                         const VerifyOptions& opts) {
  const ValueGrid g = dp_solve(p, opts.dp_n, opts.dp_k, opts.dp_dt);
  const auto count = static_cast<std::size_t>(opts.oracle_samples);
  const CompareReport prim = compare(
      part, g, clear_samples(part, g, count, opts.seed, 2.0, ArcFamily::Primary));
  const CompareReport all =
      compare(part, g, clear_samples(part, g, count, opts.seed));
  const bool ok = prim.used > 0 && prim.max_rel_error <= kOracleTol;
  return {"oracle", ok ? "pass" : "fail",
          {{"grid", {{"n", opts.dp_n}, {"k", opts.dp_k}, {"dt", jnum(opts.dp_dt)}}},
           {"iterations", g.iterations()},
           {"monotone", g.monotone()},
           {"full_speed_fraction", jnum(g.full_speed_fraction())},
           {"swap_gap", jnum(g.swap_gap())},
           {"primary", report_stats(prim)},
           {"all_regions", report_stats(all)}}};
}

}  // namespace

SuiteResult run_suite(const std::string& name, const GameParams& p,
                      const Partition& part, const VerifyOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  if (name == "hamiltonian") r = hamiltonian_suite(p, part, opts);
  else if (name == "continuity") r = continuity_suite(p, part, opts);
  else if (name == "symmetry") r = symmetry_suite(p, part, opts);
  else if (name == "fan") r = fan_suite(p, part, opts);
  else r = oracle_suite(p, part, opts);
  r.seconds = elapsed(t0);
  return r;
}

}  // namespace survgame::cli
