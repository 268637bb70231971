// Acceptance gate: one PASS/FAIL line per criterion. Tolerances are fixed
// below; a failing criterion makes the process exit non-zero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "survgame/error.hpp"
#include "survgame/oracle.hpp"
#include "survgame/simulate.hpp"

using namespace survgame;

namespace {

namespace tol {
constexpr double kClosedForm = 1e-9;
constexpr double kHamiltonian = 1e-6;
constexpr int kHamiltonianSamples = 1000;
constexpr double kHamiltonianSeconds = 1.0;
constexpr double kJunction = 1e-8;
constexpr int kReintegrationPoints = 100;
constexpr double kReintegrationRel = 1e-3;
// Sampled feedback converges at first order in the step.
constexpr double kReintegrationDt = 5e-4;
constexpr double kInventorySeconds = 30.0;
constexpr int kFanHeadings = 20;
constexpr double kFan = 1e-6;
constexpr double kFsRate = 1e-10;
constexpr double kFsDeparture = 1e-8;
constexpr int kDpN = 201;
constexpr int kDpK = 64;
constexpr double kDpDt = 0.01;
constexpr std::size_t kDpSamples = 500;
constexpr double kDpClearanceCells = 2.0;
constexpr double kDpRel = 0.03;
constexpr double kDpSeconds = 300.0;
constexpr double kScenarioRel = 0.05;
constexpr double kUsEscape = 5.5;
constexpr double kFsEscape = 4.17;
constexpr double kRadialDegrees = 2.0;
constexpr double kMirrorState = 1e-12;
constexpr double kMirrorValue = 1e-9;
constexpr double kMirrorHeading = 1e-9;
constexpr double kDpMirror = 1e-9;
}  // namespace tol

const GameParams kBase{1.0, 2.0, 1.0, 7.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Partition& base_partition() {
  static const Partition part = build_partition(kBase);
  return part;
}

RealisticState world_from_reduced(const ReducedState& s) {
  return {0.0, 0.0, 0.5 * kPi, s.x, s.y};
}

// Random (param, local_tau) pairs on a family, drawn over its full extent.
std::vector<ArcPoint> family_samples(const SurfaceModel& m, ArcFamily f,
                                     int count, std::mt19937_64& rng) {
  std::vector<ArcPoint> out;
  const ParamRange pr = m.param_range(f);
  const int params = has_family_param(f) ? 50 : 1;
  const int per = (count + params - 1) / params;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < params; ++i) {
    const double param =
        has_family_param(f) ? pr.lo + (pr.hi - pr.lo) * (i + 0.5) / params : 0.0;
    const double len = m.stop(f, param).local_tau;
    for (int j = 0; j < per; ++j) out.push_back(m.evaluate(f, param, len * unit(rng)));
  }
  return out;
}

Outcome criterion1() {
  const auto cp = critical_point(kBase);
  if (!cp) return {false, "no critical point"};
  const double e1 = std::abs(cp->y_c - 3.5);
  const double e2 = std::abs(cp->tau_c - 3.5);
  const double e3 = std::abs(cp->s_c - std::atan(2.0 / 7.0));
  const double worst = std::max({e1, e2, e3});
  return {worst <= tol::kClosedForm,
          fmt("y_c=%.12f tau_c=%.12f s_c=%.12f max err %.2e (tol %.0e)",
              cp->y_c, cp->tau_c, cp->s_c, worst, tol::kClosedForm)};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const SurfaceModel m(kBase);
  std::mt19937_64 rng(2);
  bool ok = true;
  std::ostringstream os;
  for (ArcFamily f : kAllFamilies) {
    if (!m.family_present(f)) {
      ok = false;
      os << to_string(f) << " missing; ";
      continue;
    }
    const std::vector<ArcPoint> pts =
        family_samples(m, f, tol::kHamiltonianSamples, rng);
    double worst = 0.0;
    for (const ArcPoint& a : pts) {
      worst = std::max(worst, std::abs(hamiltonian(kBase, a.state, a.costate,
                                                   a.pursuer, a.evader)));
    }
    ok = ok && worst <= tol::kHamiltonian &&
         pts.size() >= static_cast<std::size_t>(tol::kHamiltonianSamples);
    os << to_string(f) << " n=" << pts.size() << " max|H|=" << fmt("%.2e", worst)
       << "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < tol::kHamiltonianSeconds;
  os << fmt("%.3f s", secs);
  return {ok, os.str()};
}

Outcome criterion3() {
  const SurfaceModel m(kBase);
  double worst_gap = 0.0;
  int handoffs = 0;
  for (ArcFamily f : kAllFamilies) {
    if (!m.family_present(f)) continue;
    const ParamRange pr = m.param_range(f);
    const int count = has_family_param(f) ? 201 : 1;
    for (int i = 0; i < count; ++i) {
      const double param =
          has_family_param(f) ? pr.lo + (pr.hi - pr.lo) * i / (count - 1) : 0.0;
      const auto j = m.parent(f, param);
      if (!j) continue;
      const ArcPoint child = m.evaluate(f, param, 0.0);
      const ArcPoint par = m.evaluate(j->parent, j->parent_param, j->parent_local_tau);
      worst_gap = std::max(worst_gap, std::hypot(child.state.x - par.state.x,
                                                 child.state.y - par.state.y));
      ++handoffs;
    }
  }

  // Closed-loop forward flight from stored arc points.
  const Partition& part = base_partition();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, part.arcs().size() - 1);
  double worst_rel = 0.0;
  std::string worst_where;
  int done = 0;
  while (done < tol::kReintegrationPoints) {
    const TrajectoryArc& a = part.arcs()[pick(rng)];
    if (a.samples.size() < 3) continue;
    std::uniform_int_distribution<std::size_t> si(1, a.samples.size() - 2);
    const ArcPoint& pt = a.samples[si(rng)];
    const double r = pt.state.radius();
    if (r < kBase.b() * 1.01 || r > kBase.r_d() * 0.99) continue;
    const SimulationRun run =
        simulate_game(world_from_reduced(pt.state), part, tol::kReintegrationDt);
    const double rel = std::abs(run.escape_time - pt.tau) / pt.tau;
    if (rel > worst_rel) {
      worst_rel = rel;
      worst_where = fmt("%s (%.4f, %.4f) tau %.5f sim %.5f",
                        std::string(to_string(a.family)).c_str(), pt.state.x,
                        pt.state.y, pt.tau, run.escape_time);
    }
    ++done;
  }
  const bool ok = worst_gap <= tol::kJunction && worst_rel <= tol::kReintegrationRel;
  return {ok, fmt("%d handoffs max gap %.2e m; %d re-integrations max rel %.2e "
                  "at %s",
                  handoffs, worst_gap, done, worst_rel, worst_where.c_str())};
}

struct Expected {
  const char* name;
  double va, rd;
  bool cp, us, fs;
  // nullopt where the reference description says nothing about the feature.
  std::optional<bool> vds;
  bool hds;
  FsSource src;
};

Outcome criterion4() {
  // Features as described for each reference case.
  const Expected cases[] = {
      {"va2-rd7", 2.0, 7.0, true, true, true, true, true, FsSource::Ts},
      {"va1.5-rd3", 1.5, 3.0, true, true, false, true, true, FsSource::None},
      {"va4-rd3", 4.0, 3.0, false, false, false, false, true, FsSource::None},
      {"va40-rd3", 40.0, 3.0, false, false, false, false, true, FsSource::None},
      {"va2-rd1.7", 2.0, 1.7, false, false, false, false, true, FsSource::None},
      {"va1.5-rd6", 1.5, 6.0, true, false, false, true, true, FsSource::None},
      {"va1.5-rd10", 1.5, 10.0, true, true, true, std::nullopt, true, FsSource::Us},
  };
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (const Expected& e : cases) {
    const Regime r = classify_regime(GameParams(1.0, e.va, 1.0, e.rd));
    std::vector<std::string> bad;
    if (r.has_critical_point != e.cp) bad.push_back("critical point");
    if (r.has_us != e.us) bad.push_back("US");
    if (r.has_fs != e.fs) bad.push_back("FS");
    if (r.fs_source != e.src) bad.push_back("FS source");
    if (e.vds && r.has_vertical_ds != *e.vds) bad.push_back("vertical DS");
    if (r.has_horizontal_ds != e.hds) bad.push_back("horizontal DS");
    os << e.name << "[" << to_string(r.label) << " cp" << r.has_critical_point
       << " us" << r.has_us << " fs" << r.has_fs << "/" << to_string(r.fs_source)
       << " vds" << r.has_vertical_ds << " hds" << r.has_horizontal_ds << "]";
    if (!bad.empty()) {
      ok = false;
      os << " MISMATCH:";
      for (const std::string& b : bad) os << ' ' << b;
    }
    os << "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < tol::kInventorySeconds;
  os << fmt("%.2f s", secs);
  return {ok, os.str()};
}

Outcome criterion5() {
  const Partition& part = base_partition();
  const CriticalPoint cp = *part.loci().critical_point;
  std::vector<double> times;
  for (int i = 0; i < tol::kFanHeadings; ++i) {
    const double heading = cp.s_c * i / (tol::kFanHeadings - 1);
    SimulationOptions opts;
    opts.evader_override = [heading](double, const ReducedState&,
                                     const EvaderControl& best) {
      return EvaderControl{best.v1, heading};
    };
    const SimulationRun run =
        simulate_game(world_from_reduced({0.0, cp.y_c}), part, 1e-3, opts);
    times.push_back(run.escape_time);
  }
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  const double spread = *hi - *lo;
  return {spread <= tol::kFan,
          fmt("%d headings in [0, %.6f]: escape %.9f..%.9f spread %.2e s "
              "(tau_c %.9f)",
              tol::kFanHeadings, cp.s_c, *lo, *hi, spread, cp.tau_c)};
}

Outcome criterion6() {
  const SurfaceModel m(kBase);
  if (!m.family_present(ArcFamily::Focal)) return {false, "no focal surface"};
  double worst_rate = 0.0;
  const double len = m.stop(ArcFamily::Focal, 0.0).local_tau;
  for (int i = 0; i <= 1000; ++i) {
    const ArcPoint a = m.evaluate(ArcFamily::Focal, 0.0, len * i / 1000.0);
    const ReducedRate f = reduced_dynamics(kBase, a.state, a.pursuer, a.evader);
    worst_rate = std::max(worst_rate, std::abs(f.dy));
  }
  double worst_dep = 0.0;
  const ParamRange pr = m.param_range(ArcFamily::FsTributary);
  for (int i = 0; i <= 200; ++i) {
    const double xt = pr.lo + (pr.hi - pr.lo) * i / 200.0;
    worst_dep = std::max(
        worst_dep, std::abs(m.retro_rate(ArcFamily::FsTributary, xt, 0.0).dy));
  }
  return {worst_rate <= tol::kFsRate && worst_dep <= tol::kFsDeparture,
          fmt("max |dy/dt| on FS %.2e (tol %.0e); max |dy/dtau| at tributary "
              "departure %.2e (tol %.0e)",
              worst_rate, tol::kFsRate, worst_dep, tol::kFsDeparture)};
}

Outcome criterion7() {
  const Partition& part = base_partition();
  const auto t0 = Clock::now();
  const ValueGrid g = dp_solve(kBase, tol::kDpN, tol::kDpK, tol::kDpDt);
  const double secs = seconds_since(t0);
  const auto samples = clear_samples(part, g, tol::kDpSamples, 42,
                                     tol::kDpClearanceCells, ArcFamily::Primary);
  const CompareReport rep = compare(part, g, samples, tol::kDpClearanceCells);
  const auto all = clear_samples(part, g, tol::kDpSamples, 42,
                                 tol::kDpClearanceCells);
  const CompareReport wide = compare(part, g, all, tol::kDpClearanceCells);
  const bool ok = rep.used == tol::kDpSamples && rep.max_rel_error <= tol::kDpRel &&
                  secs <= tol::kDpSeconds;
  return {ok, fmt("primary-region samples %zu: max rel %.4f mean %.4f; "
                  "solve %.1f s, %d sweeps, full speed %.4f; "
                  "[all regions: max rel %.4f mean %.4f]",
                  rep.used, rep.max_rel_error, rep.mean_rel_error, secs,
                  g.iterations(), g.full_speed_fraction(), wide.max_rel_error,
                  wide.mean_rel_error)};
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const std::string& s : v) out += (out.empty() ? "" : ">") + s;
  return out;
}

Outcome criterion8() {
  const Partition& part = base_partition();
  struct Run {
    Scenario sc;
    double want;
    std::vector<std::string> phases;
  };
  const Run runs[] = {
      {Scenario::UsEscape, tol::kUsEscape, {"US_TRIBUTARY", "US", "FAN", "PRIMARY"}},
      {Scenario::FsEscape, tol::kFsEscape,
       {"FS_TRIBUTARY", "FS", "TS_TRIBUTARY", "PRIMARY"}},
  };
  bool ok = true;
  std::ostringstream os;
  for (const Run& r : runs) {
    const SimulationRun run = simulate_game(scenario_initial_state(r.sc, kBase),
                                            part, kBase.default_dt());
    const double rel = std::abs(run.escape_time - r.want) / r.want;
    const std::vector<std::string> got = phase_sequence(run);
    const bool good = rel <= tol::kScenarioRel && got == r.phases;
    ok = ok && good;
    os << to_string(r.sc) << fmt(": %.3f s vs %.2f (%.1f%%) ", run.escape_time,
                                 r.want, 100.0 * rel)
       << join(got) << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion9() {
  const GameParams p(1.0, 40.0, 1.0, 3.0);
  const Partition part = build_partition(p);
  double worst = 0.0;
  ReducedState at;
  for (std::size_t i = 0; i < part.canonical_count(); ++i) {
    const TrajectoryArc& a = part.arcs()[i];
    if (a.family != ArcFamily::Primary) continue;
    for (const ArcPoint& pt : a.samples) {
      if (pt.state.radius() <= p.b()) continue;
      const double radial = std::atan2(pt.state.x, pt.state.y);
      const double dev = std::abs(angle_diff(pt.evader.v2, radial)) * 180.0 / kPi;
      if (dev > worst) {
        worst = dev;
        at = pt.state;
      }
    }
  }
  return {worst < tol::kRadialDegrees,
          fmt("max deviation from radial %.3f deg (tol %.1f) at (%.4f, %.4f)",
              worst, tol::kRadialDegrees, at.x, at.y)};
}

Outcome criterion10() {
  const Partition& part = base_partition();
  const std::size_t n = part.canonical_count();
  double arc_err = 0.0;
  for (std::size_t q = 1; q < 4; ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      const TrajectoryArc& c = part.arcs()[i];
      const TrajectoryArc& m = part.arcs()[q * n + i];
      if (m.quadrant != kAllQuadrants[q] || m.samples.size() != c.samples.size()) {
        arc_err = 1.0;
        continue;
      }
      for (std::size_t k = 0; k < c.samples.size(); ++k) {
        const ReducedState want = mirror(c.samples[k].state, kAllQuadrants[q]);
        arc_err = std::max(arc_err, std::hypot(m.samples[k].state.x - want.x,
                                               m.samples[k].state.y - want.y));
        arc_err = std::max(arc_err, std::abs(m.samples[k].tau - c.samples[k].tau));
      }
    }
  }

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> r2(1.02 * 1.02, 6.98 * 6.98);
  std::uniform_real_distribution<double> ang(0.0, 0.5 * kPi);
  double val_err = 0.0;
  double head_err = 0.0;
  int ctrl_bad = 0;
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    const double r = std::sqrt(r2(rng));
    const double a = ang(rng);
    const ReducedState s{r * std::sin(a), r * std::cos(a)};
    const StrategyResult base = locate(s, part);
    for (Quadrant q : {Quadrant::II, Quadrant::III, Quadrant::IV}) {
      const StrategyResult m = locate(mirror(s, q), part);
      val_err = std::max(val_err, std::abs(m.time_to_escape - base.time_to_escape));
      if (base.multiple) continue;
      ++tested;
      if (!(m.pursuer == mirror(base.pursuer, q))) ++ctrl_bad;
      head_err = std::max(
          head_err, std::abs(angle_diff(m.evader.v2, mirror(base.evader, q).v2)));
    }
  }

  // The DP grid is symmetric about both axes, so node values and interpolated
  // values must agree under the mirrors.
  const ValueGrid g = dp_solve(kBase, 101, 32, 0.02);
  double dp_err = 0.0;
  for (int j = 0; j < g.n(); ++j) {
    for (int i = 0; i < g.n(); ++i) {
      const double v = g.values()[g.index(i, j)];
      dp_err = std::max(dp_err, std::abs(v - g.values()[g.index(g.n() - 1 - i, j)]));
      dp_err = std::max(dp_err, std::abs(v - g.values()[g.index(i, g.n() - 1 - j)]));
    }
  }
  for (int i = 0; i < 500; ++i) {
    const double r = std::sqrt(r2(rng));
    const double a = ang(rng);
    const ReducedState s{r * std::sin(a), r * std::cos(a)};
    const double v = g.value_at(s);
    for (Quadrant q : {Quadrant::II, Quadrant::III, Quadrant::IV}) {
      dp_err = std::max(dp_err, std::abs(v - g.value_at(mirror(s, q))));
    }
  }

  const bool ok = arc_err <= tol::kMirrorState && val_err <= tol::kMirrorValue &&
                  head_err <= tol::kMirrorHeading && ctrl_bad == 0 &&
                  dp_err <= tol::kDpMirror;
  return {ok, fmt("arcs %.2e; values %.2e; headings %.2e; pursuer mismatches "
                  "%d/%d; DP %.2e",
                  arc_err, val_err, head_err, ctrl_bad, tested, dp_err)};
}

const std::function<Outcome()> kCriteria[] = {
    criterion1, criterion2, criterion3, criterion4, criterion5,
    criterion6, criterion7, criterion8, criterion9, criterion10,
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survgame acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-10)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (int i = 1; i <= 10; ++i) {
    if (only != 0 && i != only) continue;
    Outcome o;
    try {
      o = kCriteria[i - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", i, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
