#include "survgame/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "survgame/error.hpp"
#include "survgame/integrate.hpp"

namespace survgame {

namespace {

double segment_distance(const ReducedState& p, const ReducedState& a,
                        const ReducedState& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::string phase_label(const RegionId& r) {
  if (r.surface == SurfaceTag::Critical) return "FAN";
  return std::string(to_string(r.family));
}

RealisticState lerp(const RealisticState& a, const RealisticState& b,
                    double w) {
  auto mix = [w](double p, double q) { return p + w * (q - p); };
  const double dth = angle_diff(b.theta_r, a.theta_r);
  return RealisticState{mix(a.x_r, b.x_r), mix(a.y_r, b.y_r),
                        a.theta_r + w * dth, mix(a.x_a, b.x_a),
                        mix(a.y_a, b.y_a)}
      .normalized();
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ControlSwitch: return "CONTROL_SWITCH";
    case EventKind::SurfaceEnter: return "SURFACE_ENTER";
    case EventKind::SurfaceLeave: return "SURFACE_LEAVE";
    case EventKind::Escape: return "ESCAPE";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  if (name == "us-escape") return Scenario::UsEscape;
  if (name == "fs-escape") return Scenario::FsEscape;
  return std::nullopt;
}

std::string_view to_string(Scenario s) {
  return s == Scenario::UsEscape ? "us-escape" : "fs-escape";
}

RealisticState scenario_initial_state(Scenario s, const GameParams& p,
                                      double offset) {
  RealisticState rs;
  rs.theta_r = 0.5 * kPi;
  if (s == Scenario::UsEscape) {
    rs.x_a = offset;
    rs.y_a = p.b();
  } else {
    rs.x_a = p.b();
    rs.y_a = offset;
  }
  return rs;
}

SurfaceTag surface_membership(const ReducedState& s, const Partition& part,
                              double tol) {
  const SurfaceModel& m = part.model();
  const ReducedState c{std::abs(s.x), std::abs(s.y)};
  const auto& cp = m.critical();
  if (cp && std::hypot(c.x, c.y - cp->y_c) <= tol) return SurfaceTag::Critical;
  if (m.has_us() && c.x <= tol && c.y >= m.us_y_end() && c.y <= cp->y_c) {
    return SurfaceTag::Universal;
  }
  const auto& fp = m.focal();
  if (fp && c.y <= tol && c.x >= part.params().b() && c.x <= fp->x_f) {
    return SurfaceTag::Focal;
  }
  for (const DsSegment& d : part.loci().ds_segments) {
    if (d.branch_a != Quadrant::I) continue;
    const double off = d.axis == Axis::Horizontal ? c.y : c.x;
    const double along = d.axis == Axis::Horizontal ? c.x : c.y;
    if (off <= tol && along >= d.lo && along <= d.hi) {
      return SurfaceTag::Dispersal;
    }
  }
  const auto& ts = part.loci().ts_curve;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (segment_distance(c, ts[i - 1], ts[i]) <= tol) {
      return SurfaceTag::Transition;
    }
  }
  return SurfaceTag::None;
}

SimulationRun simulate_game(const RealisticState& init, const Partition& part,
                            double dt, const SimulationOptions& opts) {
  const GameParams& p = part.params();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidParameters, "simulate_game: dt must be > 0");
  }
  SimulationRun run{p, init.normalized(), dt, {}, {}, 0.0};
  const ReducedState s0 = to_reduced(run.initial);
  const double r0 = s0.radius();
  const double eps = 1e-12 * p.r_d();
  if (r0 > p.r_d() + eps) {
    throw Error(ErrorKind::AlreadyEscaped,
                "simulate_game: initial state is beyond r_d");
  }
  if (r0 < p.b() - eps) {
    throw Error(ErrorKind::InsideBody,
                "simulate_game: initial state is inside the DDR body");
  }
  const double snap =
      opts.control_snap > 0.0 ? opts.control_snap : 2.0 * p.v_a_max() * dt;
  const double ev_tol =
      opts.event_tolerance > 0.0 ? opts.event_tolerance : 1e-3 * p.r_d();

  if (r0 >= p.r_d() - eps) {
    const StrategyResult res = part.locate(s0, snap);
    run.trace.push_back(
        {0.0, run.initial, s0, res.pursuer, res.evader, res.region});
    run.events.push_back({0.0, EventKind::Escape, "r=r_d"});
    return run;
  }
  const double t_max = opts.max_time > 0.0
                           ? opts.max_time
                           : 20.0 * part.locate(s0).time_to_escape + 10.0;

  RealisticState rs = run.initial;
  SurfaceTag surface = SurfaceTag::None;
  int prev_u1 = 0;
  int prev_u2 = 0;
  double t = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (t > t_max) {
      std::ostringstream os;
      os << "simulate_game: no escape within " << t_max << " s";
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    const ReducedState s = to_reduced(rs);
    // Hysteresis: once riding a US or FS, a wider band keeps the feedback
    // from chattering at the snap boundary.
    const SurfaceTag held =
        run.trace.empty() ? SurfaceTag::None : run.trace.back().region.surface;
    const bool riding =
        held == SurfaceTag::Universal || held == SurfaceTag::Focal;
    const StrategyResult res = part.locate(s, riding ? 3.0 * snap : snap);
    EvaderControl v = res.evader;
    if (opts.evader_override) v = opts.evader_override(t, s, res.evader);
    check_controls(p, res.pursuer);
    check_controls(p, v);
    run.trace.push_back({t, rs, s, res.pursuer, v, res.region});

    const int u1 = sign_of(res.pursuer.u1);
    const int u2 = sign_of(res.pursuer.u2);
    if (k > 0 && (u1 != prev_u1 || u2 != prev_u2)) {
      std::ostringstream os;
      os << "u=(" << res.pursuer.u1 << "," << res.pursuer.u2 << ")";
      run.events.push_back({t, EventKind::ControlSwitch, os.str()});
    }
    prev_u1 = u1;
    prev_u2 = u2;
    const SurfaceTag now = surface_membership(s, part, ev_tol);
    if (now != surface) {
      if (surface != SurfaceTag::None) {
        run.events.push_back(
            {t, EventKind::SurfaceLeave, std::string(to_string(surface))});
      }
      if (now != SurfaceTag::None) {
        run.events.push_back(
            {t, EventKind::SurfaceEnter, std::string(to_string(now))});
      }
      surface = now;
    }

    const WorldEvaderControl w = to_world(v, rs.theta_r);
    const auto path = integrate_realistic(p, rs, res.pursuer, w, dt, dt);
    const RealisticState next = as_realistic(path.back().x).normalized();
    const double r_now = s.radius();
    const double r_next = to_reduced(next).radius();
    if (r_next >= p.r_d()) {
      const double frac =
          r_next > r_now ? std::clamp((p.r_d() - r_now) / (r_next - r_now),
                                      0.0, 1.0)
                         : 1.0;
      const double te = t + frac * dt;
      const RealisticState at = lerp(rs, next, frac);
      run.trace.push_back(
          {te, at, to_reduced(at), res.pursuer, v, res.region});
      if (surface != SurfaceTag::None) {
        run.events.push_back(
            {te, EventKind::SurfaceLeave, std::string(to_string(surface))});
      }
      run.events.push_back({te, EventKind::Escape, "r=r_d"});
      run.escape_time = te;
      return run;
    }
    rs = next;
    t += dt;
  }
}

std::vector<std::string> phase_sequence(const SimulationRun& run,
                                        std::size_t min_rows) {
  std::vector<std::pair<std::string, std::size_t>> runs;
  for (const TraceRow& row : run.trace) {
    std::string label = phase_label(row.region);
    if (runs.empty() || runs.back().first != label) {
      runs.emplace_back(std::move(label), 0);
    }
    ++runs.back().second;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const bool edge = i == 0 || i + 1 == runs.size();
    // The critical point is a single instant, never a transient.
    if (!edge && runs[i].second < min_rows && runs[i].first != "FAN") continue;
    if (out.empty() || out.back() != runs[i].first) out.push_back(runs[i].first);
  }
  return out;
}

std::vector<Snapshot> export_snapshots(const SimulationRun& run,
                                       std::span<const double> times) {
  std::vector<Snapshot> out;
  if (times.empty()) return out;
  if (run.trace.empty()) {
    throw Error(ErrorKind::OutOfRange, "export_snapshots: empty run");
  }
  const double t_end = run.trace.back().t;
  for (double t : times) {
    if (!(t >= 0.0 && t <= t_end + 1e-12)) {
      std::ostringstream os;
      os << "export_snapshots: time " << t << " outside [0, " << t_end << "]";
      throw Error(ErrorKind::OutOfRange, os.str());
    }
    auto it = std::lower_bound(
        run.trace.begin(), run.trace.end(), t,
        [](const TraceRow& r, double v) { return r.t < v; });
    RealisticState pose;
    if (it == run.trace.begin()) {
      pose = it->realistic;
    } else if (it == run.trace.end()) {
      pose = run.trace.back().realistic;
    } else {
      const TraceRow& a = *(it - 1);
      const TraceRow& b = *it;
      const double w = b.t > a.t ? (t - a.t) / (b.t - a.t) : 0.0;
      pose = lerp(a.realistic, b.realistic, w);
    }
    out.push_back({t, pose, run.params.r_d(), run.params.b()});
  }
  return out;
}

}  // namespace survgame
