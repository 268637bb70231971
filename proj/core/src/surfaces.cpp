#include "survgame/surfaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "survgame/error.hpp"

namespace survgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tributaries of the switch, universal and focal surfaces all have the DDR
// spinning in place; in retro-time the evader heading turns at Vr/b while
// the relative position rotates about the DDR.
struct RotationArc {
  double x0 = 0.0;
  double y0 = 0.0;
  double alpha0 = 0.0;
  double gamma = 1.0;
  double omega = 0.0;
  double va = 0.0;

  double heading(double t) const { return alpha0 - omega * t; }

  ReducedState state(double t) const {
    const double wt = omega * t;
    const double sw = std::sin(wt);
    const double cw = std::cos(wt);
    const double a = heading(t);
    return {x0 * cw - y0 * sw - t * va * std::sin(a),
            x0 * sw + y0 * cw - t * va * std::cos(a)};
  }

  ReducedRate rate(const ReducedState& s, double t) const {
    const double a = heading(t);
    return {-omega * s.y - va * std::sin(a), omega * s.x - va * std::cos(a)};
  }

  Costate costate(double t) const {
    const double a = heading(t);
    return {-gamma * std::sin(a), -gamma * std::cos(a)};
  }
};

double spin_rate(const GameParams& p) { return -p.v_r_max() / p.b(); }

WheelControls spin_controls(const GameParams& p) {
  return {p.v_r_max(), -p.v_r_max()};
}

WheelControls straight_controls(const GameParams& p) {
  return {p.v_r_max(), p.v_r_max()};
}

double primary_gamma(const GameParams& p, double s) {
  return 1.0 / (p.v_a_max() - p.v_r_max() * std::cos(s));
}

RotationArc ts_rotation(const GameParams& p, double s) {
  const double ts = p.b() / (std::tan(s) * p.v_r_max());
  const ReducedState start = primary_arc(p, s, ts);
  return {start.x, start.y, s, primary_gamma(p, s), spin_rate(p), p.v_a_max()};
}

double us_heading(const GameParams& p, double y_u) {
  return std::atan(p.b() / y_u);
}

RotationArc us_rotation(const GameParams& p, double y_u) {
  const double a0 = us_heading(p, y_u);
  return {0.0,
          y_u,
          a0,
          1.0 / (p.v_a_max() - p.v_r_max() * std::cos(a0)),
          spin_rate(p),
          p.v_a_max()};
}

double fs_gamma(const GameParams& p, double heading) {
  const double sh = std::sin(heading);
  return 1.0 / (p.v_a_max() * sh * sh);
}

RotationArc fs_rotation(const GameParams& p, double x_t) {
  const double a0 = fs_heading(p, x_t);
  return {x_t, 0.0, a0, fs_gamma(p, a0), spin_rate(p), p.v_a_max()};
}

// Retro-time spent on the FS travelling from x_f down to x.
double fs_time_to(const GameParams& p, const FocalPoint& f, double x) {
  const double k = p.rho_v() * p.b();
  return p.b() / p.v_r_max() * (std::asin(f.x_f / k) - std::asin(x / k));
}

// Smallest non-negative root of |P0 + t A| = b, or +inf.
double straight_body_hit(const GameParams& p, const ReducedState& p0,
                         double ax, double ay) {
  const double qa = ax * ax + ay * ay;
  const double qb = 2.0 * (p0.x * ax + p0.y * ay);
  const double qc = p0.x * p0.x + p0.y * p0.y - p.b() * p.b();
  if (qa <= 0.0) return kInf;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (qb + std::copysign(sq, qb));
  double r1 = q / qa;
  double r2 = (q != 0.0) ? qc / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 >= 0.0) return r1;
  if (r2 >= 0.0) return r2;
  return kInf;
}

template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct EventScan {
  double t = kInf;
  ArcStop kind = ArcStop::Exit;
  bool found = false;
};

// Marches along a closed-form arc and returns the first crossing of the body
// circle, either axis, or the detection circle. Local minima between samples
// are inspected so that brief dips are not stepped over.
template <class StateFn, class RateFn>
EventScan first_event(const GameParams& p, StateFn&& state, RateFn&& rate,
                      double t_max, double h, bool watch_axes) {
  const double b2 = p.b() * p.b();
  const double rd2 = p.r_d() * p.r_d();
  struct Ev {
    ArcStop kind;
    int priority;
  };
  constexpr std::array<Ev, 4> kEvents = {{{ArcStop::Body, 0},
                                          {ArcStop::VerticalAxis, 1},
                                          {ArcStop::HorizontalAxis, 1},
                                          {ArcStop::Exit, 2}}};
  auto g = [&](int i, const ReducedState& s) {
    switch (i) {
      case 0: return s.x * s.x + s.y * s.y - b2;
      case 1: return s.x;
      case 2: return s.y;
      default: return rd2 - (s.x * s.x + s.y * s.y);
    }
  };
  auto dg = [&](int i, const ReducedState& s, const ReducedRate& r) {
    switch (i) {
      case 0: return 2.0 * (s.x * r.dx + s.y * r.dy);
      case 1: return r.dx;
      case 2: return r.dy;
      default: return -2.0 * (s.x * r.dx + s.y * r.dy);
    }
  };
  auto g_at = [&](int i, double t) { return g(i, state(t)); };
  auto dg_at = [&](int i, double t) {
    const ReducedState s = state(t);
    return dg(i, s, rate(s, t));
  };

  EventScan best;
  int best_priority = 99;
  double t0 = 0.0;
  ReducedState s0 = state(0.0);
  ReducedRate r0 = rate(s0, 0.0);
  const int n_steps = static_cast<int>(std::ceil(t_max / h));
  for (int k = 1; k <= n_steps && !best.found; ++k) {
    const double t1 = std::min(t_max, k * h);
    const ReducedState s1 = state(t1);
    const ReducedRate r1 = rate(s1, t1);
    for (int i = 0; i < 4; ++i) {
      if (!watch_axes && (i == 1 || i == 2)) continue;
      const double g0 = g(i, s0);
      const double g1 = g(i, s1);
      double root = kInf;
      if (g1 < 0.0) {
        root = g0 < 0.0 ? t0 : bisect([&](double t) { return g_at(i, t); },
                                      t0, t1, g0);
      } else {
        const double d0 = dg(i, s0, r0);
        const double d1 = dg(i, s1, r1);
        if (d0 < 0.0 && d1 > 0.0) {
          const double tm =
              bisect([&](double t) { return dg_at(i, t); }, t0, t1, d0);
          const double gm = g_at(i, tm);
          // Ignore grazes that are pure round-off (tangent departures).
          const double graze = i == 1 || i == 2 ? 1e-12 * p.r_d()
                                                : 1e-12 * rd2;
          if (gm < -graze) {
            root = g0 < 0.0 ? t0
                            : bisect([&](double t) { return g_at(i, t); }, t0,
                                     tm, g0);
          }
        }
      }
      if (root == kInf) continue;
      const bool earlier = root < best.t - 1e-12;
      const bool tie_wins = std::abs(root - best.t) <= 1e-12 &&
                            kEvents[i].priority < best_priority;
      if (!best.found || earlier || tie_wins) {
        best.t = root;
        best.kind = kEvents[i].kind;
        best.found = true;
        best_priority = kEvents[i].priority;
      }
    }
    t0 = t1;
    s0 = s1;
    r0 = r1;
  }
  return best;
}

}  // namespace

std::string_view to_string(ArcFamily f) {
  switch (f) {
    case ArcFamily::Primary: return "PRIMARY";
    case ArcFamily::TsTributary: return "TS_TRIBUTARY";
    case ArcFamily::Universal: return "US";
    case ArcFamily::UsTributary: return "US_TRIBUTARY";
    case ArcFamily::Focal: return "FS";
    case ArcFamily::FsTributary: return "FS_TRIBUTARY";
  }
  return "?";
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::I: return "I";
    case Quadrant::II: return "II";
    case Quadrant::III: return "III";
    case Quadrant::IV: return "IV";
  }
  return "?";
}

std::string_view to_string(ArcStop s) {
  switch (s) {
    case ArcStop::Switch: return "switch";
    case ArcStop::CriticalPoint: return "critical_point";
    case ArcStop::Body: return "body";
    case ArcStop::VerticalAxis: return "vertical_axis";
    case ArcStop::HorizontalAxis: return "horizontal_axis";
    case ArcStop::Tangency: return "tangency";
    case ArcStop::SegmentEnd: return "segment_end";
    case ArcStop::Exit: return "exit";
  }
  return "?";
}

bool has_family_param(ArcFamily f) {
  return f != ArcFamily::Universal && f != ArcFamily::Focal;
}

bool mirrors_x(Quadrant q) { return q == Quadrant::III || q == Quadrant::IV; }
bool mirrors_y(Quadrant q) { return q == Quadrant::II || q == Quadrant::III; }

Quadrant quadrant_of(const ReducedState& s) {
  const bool mx = s.x < 0.0;
  const bool my = s.y < 0.0;
  if (!mx) return my ? Quadrant::II : Quadrant::I;
  return my ? Quadrant::III : Quadrant::IV;
}

ReducedState mirror(const ReducedState& s, Quadrant q) {
  return {mirrors_x(q) ? -s.x : s.x, mirrors_y(q) ? -s.y : s.y};
}

Costate mirror(const Costate& c, Quadrant q) {
  return {mirrors_x(q) ? -c.lambda_x : c.lambda_x,
          mirrors_y(q) ? -c.lambda_y : c.lambda_y};
}

WheelControls mirror(const WheelControls& u, Quadrant q) {
  WheelControls out = u;
  if (mirrors_x(q)) std::swap(out.u1, out.u2);
  if (mirrors_y(q)) out = {-out.u1, -out.u2};
  return out;
}

EvaderControl mirror(const EvaderControl& v, Quadrant q) {
  double a = v.v2;
  if (mirrors_x(q)) a = -a;
  if (mirrors_y(q)) a = kPi - a;
  return {v.v1, wrap_two_pi(a)};
}

ArcPoint mirror(const ArcPoint& a, Quadrant q) {
  return {a.tau, mirror(a.state, q), mirror(a.costate, q),
          mirror(a.pursuer, q), mirror(a.evader, q)};
}

TrajectoryArc mirror(const TrajectoryArc& arc, Quadrant q) {
  TrajectoryArc out = arc;
  out.quadrant = q;
  for (ArcPoint& a : out.samples) a = mirror(a, q);
  return out;
}

std::optional<CriticalPoint> critical_point(const GameParams& p) {
  p.require_faster_evader();
  const double k = p.rho_v() * p.rho_d();
  if (k == 1.0) {
    throw Error(ErrorKind::Boundary,
                "rho_v*rho_d == 1: critical point sits on the body");
  }
  if (k > 1.0) return std::nullopt;
  return CriticalPoint{p.r_d() / p.rho_v(), p.r_d() / p.v_a_max(),
                       std::atan(k)};
}

std::optional<double> switch_time(double s, const GameParams& p) {
  if (!(s >= 0.0 && s <= 0.5 * kPi)) {
    std::ostringstream os;
    os << "switch_time: s=" << s << " outside [0, pi/2]";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  if (s == 0.0) return std::nullopt;
  if (s == 0.5 * kPi) return 0.0;
  return p.b() / (std::tan(s) * p.v_r_max());
}

ReducedState primary_arc(const GameParams& p, double s, double tau) {
  const double ss = std::sin(s);
  const double cs = std::cos(s);
  // Straight DDR motion; reverse drive when the evader is behind.
  const double v = cs >= 0.0 ? p.v_r_max() : -p.v_r_max();
  return {(p.r_d() - tau * p.v_a_max()) * ss,
          p.r_d() * cs + tau * (v - p.v_a_max() * cs)};
}

StateCostate ts_tributary(const GameParams& p, double s, double tau1) {
  if (!(s > 0.0 && s <= 0.5 * kPi) || !(tau1 >= 0.0)) {
    std::ostringstream os;
    os << "ts_tributary: need s in (0, pi/2] and tau1 >= 0 (s=" << s
       << ", tau1=" << tau1 << ")";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const RotationArc arc = ts_rotation(p, s);
  return {arc.state(tau1), arc.costate(tau1)};
}

ReducedState us_arc(const GameParams& p, double tau2) {
  const auto cp = critical_point(p);
  if (!cp) {
    throw Error(ErrorKind::UnsupportedRegime, "us_arc: no critical point");
  }
  if (!(tau2 >= 0.0)) {
    throw Error(ErrorKind::OutOfRange, "us_arc: tau2 must be >= 0");
  }
  return {0.0, cp->y_c - (p.v_a_max() - p.v_r_max()) * tau2};
}

StateCostate us_tributary(const GameParams& p, double y_u, double tau3) {
  const auto cp = critical_point(p);
  if (!cp) {
    throw Error(ErrorKind::UnsupportedRegime,
                "us_tributary: no critical point");
  }
  if (!(y_u > p.b() && y_u <= cp->y_c) || !(tau3 >= 0.0)) {
    std::ostringstream os;
    os << "us_tributary: y_u=" << y_u << " outside (b, y_c] or tau3 < 0";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const RotationArc arc = us_rotation(p, y_u);
  return {arc.state(tau3), arc.costate(tau3)};
}

double fs_heading(const GameParams& p, double x) {
  // dy/dt = -omega*x + Va*cos(v2) = 0 with omega = -Vr/b.
  const double c = -x / (p.rho_v() * p.b());
  if (!(c >= -1.0 && c <= 1.0)) {
    std::ostringstream os;
    os << "fs_heading: |x|=" << std::abs(x)
       << " exceeds rho_v*b; the evader cannot hold y fixed";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  return std::acos(c);
}

double fs_duration(const GameParams& p, const FocalPoint& f) {
  return fs_time_to(p, f, p.b());
}

ReducedState fs_arc(const GameParams& p, const FocalPoint& f, double tau4) {
  if (!(tau4 >= 0.0) || tau4 > fs_duration(p, f) * (1.0 + 1e-12) + 1e-15) {
    std::ostringstream os;
    os << "fs_arc: tau4=" << tau4 << " outside [0, " << fs_duration(p, f)
       << "]";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const double k = p.rho_v() * p.b();
  const double th = std::asin(f.x_f / k) - p.v_r_max() * tau4 / p.b();
  return {k * std::sin(th), 0.0};
}

StateCostate fs_tributary(const GameParams& p, const FocalPoint& f,
                          double x_t, double tau5) {
  if (!(x_t >= p.b() && x_t <= f.x_f) || !(tau5 >= 0.0)) {
    std::ostringstream os;
    os << "fs_tributary: x_t=" << x_t << " outside [b, x_f=" << f.x_f
       << "] or tau5 < 0";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const RotationArc arc = fs_rotation(p, x_t);
  return {arc.state(tau5), arc.costate(tau5)};
}

std::optional<double> find_us_ds_split(const GameParams& p) {
  const auto cp = critical_point(p);
  if (!cp) return std::nullopt;
  // A tributary whose retro departure points back across the axis crosses it
  // at once; the split is where the departure direction turns over.
  auto departs_out = [&](double y_u) {
    const RotationArc arc = us_rotation(p, y_u);
    const ReducedState s = arc.state(0.0);
    return arc.rate(s, 0.0).dx;
  };
  const double lo = p.b();
  const double hi = cp->y_c;
  const double f_lo = departs_out(lo);
  if (f_lo > 0.0) return std::nullopt;
  if (departs_out(hi) <= 0.0) return hi;
  return bisect(departs_out, lo, hi, f_lo);
}

std::optional<FocalPoint> find_focal_point(const GameParams& p) {
  const SurfaceModel model(p);
  return model.focal();
}

SurfaceModel::SurfaceModel(const GameParams& p) : p_(p) {
  p_.require_faster_evader();
  critical_ = critical_point(p_);
  if (critical_) {
    us_split_ = find_us_ds_split(p_);
    us_y_end_ = us_split_ ? *us_split_ : p_.b();
    has_us_ = us_y_end_ < critical_->y_c;
    ts_s_lo_ = critical_->s_c;
  } else {
    // Lowest s whose switch point is still outside the body.
    auto f = [&](double s) {
      return primary_arc(p_, s, *switch_time(s, p_)).radius() - p_.b();
    };
    double hi = 0.5 * kPi;
    double lo = hi;
    const int n = 2000;
    for (int i = 1; i <= n; ++i) {
      const double s = 0.5 * kPi * (1.0 - static_cast<double>(i) / n);
      if (s <= 0.0 || f(s) < 0.0) {
        lo = s;
        break;
      }
      hi = s;
    }
    ts_s_lo_ = lo <= 0.0 ? hi : bisect(f, lo, hi, f(lo));
  }
  focal_ = locate_focal_point();
}

bool SurfaceModel::family_present(ArcFamily f) const {
  switch (f) {
    case ArcFamily::Primary:
    case ArcFamily::TsTributary: return true;
    case ArcFamily::Universal:
    case ArcFamily::UsTributary: return has_us_;
    case ArcFamily::Focal:
    case ArcFamily::FsTributary: return focal_.has_value();
  }
  return false;
}

ParamRange SurfaceModel::param_range(ArcFamily f) const {
  switch (f) {
    case ArcFamily::Primary: return {0.0, 0.5 * kPi};
    case ArcFamily::TsTributary: return {ts_s_lo_, 0.5 * kPi};
    case ArcFamily::UsTributary:
      return has_us_ ? ParamRange{us_y_end_, critical_->y_c} : ParamRange{};
    case ArcFamily::FsTributary:
      return focal_ ? ParamRange{p_.b(), focal_->x_f} : ParamRange{};
    default: return {};
  }
}

double SurfaceModel::tau_begin(ArcFamily f, double param) const {
  switch (f) {
    case ArcFamily::Primary: return 0.0;
    case ArcFamily::TsTributary: return *switch_time(param, p_);
    case ArcFamily::Universal: return critical_->tau_c;
    case ArcFamily::UsTributary:
      return critical_->tau_c +
             (critical_->y_c - param) / (p_.v_a_max() - p_.v_r_max());
    case ArcFamily::Focal: return focal_->tau_f;
    case ArcFamily::FsTributary:
      return focal_->tau_f + fs_time_to(p_, *focal_, param);
  }
  return 0.0;
}

ArcPoint SurfaceModel::evaluate(ArcFamily f, double param,
                                double local_tau) const {
  ArcPoint out;
  out.tau = tau_begin(f, param) + local_tau;
  switch (f) {
    case ArcFamily::Primary: {
      const double g = primary_gamma(p_, param);
      out.state = primary_arc(p_, param, local_tau);
      out.costate = {-g * std::sin(param), -g * std::cos(param)};
      out.pursuer = straight_controls(p_);
      out.evader = {p_.v_a_max(), wrap_two_pi(param)};
      return out;
    }
    case ArcFamily::Universal: {
      out.state = {0.0, critical_->y_c -
                            (p_.v_a_max() - p_.v_r_max()) * local_tau};
      out.costate = {0.0, -1.0 / (p_.v_a_max() - p_.v_r_max())};
      out.pursuer = straight_controls(p_);
      out.evader = {p_.v_a_max(), 0.0};
      return out;
    }
    case ArcFamily::Focal: {
      out.state = fs_arc(p_, *focal_, local_tau);
      const double h = fs_heading(p_, out.state.x);
      const double g = fs_gamma(p_, h);
      out.costate = {-g * std::sin(h), -g * std::cos(h)};
      out.pursuer = spin_controls(p_);
      out.evader = {p_.v_a_max(), h};
      return out;
    }
    default: break;
  }
  const RotationArc arc = f == ArcFamily::TsTributary ? ts_rotation(p_, param)
                          : f == ArcFamily::UsTributary
                              ? us_rotation(p_, param)
                              : fs_rotation(p_, param);
  out.state = arc.state(local_tau);
  out.costate = arc.costate(local_tau);
  out.pursuer = spin_controls(p_);
  out.evader = {p_.v_a_max(), wrap_two_pi(arc.heading(local_tau))};
  return out;
}

ReducedRate SurfaceModel::retro_rate(ArcFamily f, double param,
                                     double local_tau) const {
  const ArcPoint a = evaluate(f, param, local_tau);
  const ReducedRate r = reduced_dynamics(p_, a.state, a.pursuer, a.evader);
  return {-r.dx, -r.dy};
}

ArcStopInfo SurfaceModel::stop(ArcFamily f, double param) const {
  return scan_stop(f, param, true);
}

ArcStopInfo SurfaceModel::scan_stop(ArcFamily f, double param,
                                    bool allow_tangency) const {
  switch (f) {
    case ArcFamily::Primary: {
      const double s = param;
      const ReducedState p0 = primary_arc(p_, s, 0.0);
      const double t_body =
          straight_body_hit(p_, p0, -p_.v_a_max() * std::sin(s),
                            p_.v_r_max() - p_.v_a_max() * std::cos(s));
      if (critical_ && s < critical_->s_c) {
        return {critical_->tau_c, ArcStop::CriticalPoint};
      }
      const auto ts = switch_time(s, p_);
      if (ts && *ts < t_body) return {*ts, ArcStop::Switch};
      if (critical_ && s == critical_->s_c) {
        return {critical_->tau_c, ArcStop::CriticalPoint};
      }
      return {t_body, ArcStop::Body};
    }
    case ArcFamily::Universal:
      return {(critical_->y_c - us_y_end_) / (p_.v_a_max() - p_.v_r_max()),
              ArcStop::SegmentEnd};
    case ArcFamily::Focal:
      return {fs_duration(p_, *focal_), ArcStop::SegmentEnd};
    default: break;
  }
  if (allow_tangency && focal_ && focal_->source_family == f &&
      focal_->source_param == param) {
    return {focal_->source_local_tau, ArcStop::Tangency};
  }
  const RotationArc arc = f == ArcFamily::TsTributary ? ts_rotation(p_, param)
                          : f == ArcFamily::UsTributary
                              ? us_rotation(p_, param)
                              : fs_rotation(p_, param);
  const double omega = std::abs(arc.omega);
  const double h =
      p_.b() / (100.0 * (p_.v_a_max() + omega * p_.r_d()));
  const double t_max =
      4.0 * (kTwoPi / omega + p_.r_d() / (p_.v_a_max() - p_.v_r_max()));
  const EventScan ev = first_event(
      p_, [&](double t) { return arc.state(t); },
      [&](const ReducedState& s, double t) { return arc.rate(s, t); }, t_max,
      h, true);
  if (!ev.found) {
    std::ostringstream os;
    os << to_string(f) << " arc with parameter " << param
       << " never reaches a stopping set";
    throw Error(ErrorKind::NonConvergence, os.str());
  }
  return {ev.t, ev.kind};
}

std::optional<Junction> SurfaceModel::parent(ArcFamily f, double param) const {
  switch (f) {
    case ArcFamily::Primary: return std::nullopt;
    case ArcFamily::TsTributary:
      return Junction{ArcFamily::Primary, param, *switch_time(param, p_)};
    case ArcFamily::Universal:
      return Junction{ArcFamily::Primary, 0.0, critical_->tau_c};
    case ArcFamily::UsTributary:
      return Junction{ArcFamily::Universal, 0.0,
                      (critical_->y_c - param) /
                          (p_.v_a_max() - p_.v_r_max())};
    case ArcFamily::Focal:
      return Junction{focal_->source_family, focal_->source_param,
                      focal_->source_local_tau};
    case ArcFamily::FsTributary:
      return Junction{ArcFamily::Focal, 0.0, fs_time_to(p_, *focal_, param)};
  }
  return std::nullopt;
}

TrajectoryArc SurfaceModel::build_arc(ArcFamily f, double param,
                                      double spacing) const {
  if (!family_present(f)) {
    throw Error(ErrorKind::UnsupportedRegime,
                std::string("family ") + std::string(to_string(f)) +
                    " is absent at these parameters");
  }
  const ArcStopInfo st = stop(f, param);
  TrajectoryArc arc;
  arc.family = f;
  if (has_family_param(f)) arc.family_param = param;
  arc.quadrant = Quadrant::I;
  arc.stop = st.kind;
  arc.tau_begin = tau_begin(f, param);
  arc.tau_end = arc.tau_begin + st.local_tau;
  const bool spins = f == ArcFamily::TsTributary ||
                     f == ArcFamily::UsTributary ||
                     f == ArcFamily::FsTributary;
  const double speed = p_.v_a_max() + p_.v_r_max() * (spins
                                                          ? p_.r_d() / p_.b()
                                                          : 1.0);
  const double dt = spacing / speed;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(st.local_tau / dt)));
  arc.samples.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t =
        i == n ? st.local_tau : st.local_tau * static_cast<double>(i) / n;
    arc.samples.push_back(evaluate(f, param, t));
  }
  return arc;
}

std::vector<ReducedState> SurfaceModel::ts_curve(std::size_t n) const {
  std::vector<ReducedState> out;
  if (n < 2) n = 2;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = ts_s_lo_ + (0.5 * kPi - ts_s_lo_) *
                                    static_cast<double>(i) / (n - 1);
    out.push_back(primary_arc(p_, s, *switch_time(s, p_)));
  }
  return out;
}

std::optional<FocalPoint> SurfaceModel::locate_focal_point() const {
  // Candidate sources in order: US tributaries by rising y_u, then TS
  // tributaries by rising s. Both families join continuously at y_c.
  struct Member {
    ArcFamily family;
    double param;
  };
  const bool with_us = has_us_;
  auto member = [&](double q) -> Member {
    if (with_us && q < 1.0) {
      return {ArcFamily::UsTributary,
              us_y_end_ + (critical_->y_c - us_y_end_) * q};
    }
    const double u = with_us ? q - 1.0 : q;
    return {ArcFamily::TsTributary, ts_s_lo_ + (0.5 * kPi - ts_s_lo_) * u};
  };
  const double q_hi = with_us ? 2.0 : 1.0;
  auto kind = [&](double q) {
    const Member m = member(q);
    return scan_stop(m.family, m.param, false).kind;
  };

  const int n = 400;
  double q_body = -1.0;
  double q_cross = -1.0;
  ArcStop prev = kind(0.0);
  double q_prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    // Keep clear of the exact family endpoints, which are degenerate.
    const double q = q_hi * static_cast<double>(i) / n;
    const ArcStop k = kind(q);
    if (prev == ArcStop::Body && k == ArcStop::HorizontalAxis) {
      q_body = q_prev;
      q_cross = q;
      break;
    }
    prev = k;
    q_prev = q;
  }
  if (q_body < 0.0) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (q_body + q_cross);
    if (mid <= q_body || mid >= q_cross) break;
    if (kind(mid) == ArcStop::HorizontalAxis) {
      q_cross = mid;
    } else {
      q_body = mid;
    }
  }
  // Keep the member whose own family is unambiguous at the transition.
  const Member m = member(q_body);
  const ArcStopInfo body_stop = scan_stop(m.family, m.param, false);
  const RotationArc arc = m.family == ArcFamily::TsTributary
                              ? ts_rotation(p_, m.param)
                              : us_rotation(p_, m.param);
  auto ydot = [&](double t) { return arc.rate(arc.state(t), t).dy; };
  // Look for the last interior minimum of y before the body is reached.
  const int steps = 4000;
  const double h = body_stop.local_tau / steps;
  double t_min = -1.0;
  for (int i = 0; i < steps; ++i) {
    const double a = i * h;
    const double b = (i + 1) * h;
    const double da = ydot(a);
    const double db = ydot(b);
    if (da < 0.0 && db >= 0.0) t_min = bisect(ydot, a, b, da);
  }
  if (t_min < 0.0) return std::nullopt;
  const ReducedState at = arc.state(t_min);
  const double tol = 1e-6 * p_.r_d();
  if (std::abs(at.y) > tol || at.radius() <= p_.b() * (1.0 + 1e-6)) {
    return std::nullopt;
  }
  FocalPoint fp;
  fp.x_f = at.x;
  fp.source_family = m.family;
  fp.source_param = m.param;
  fp.source_local_tau = t_min;
  fp.tau_f = tau_begin(m.family, m.param) + t_min;
  if (fp.x_f <= p_.b() || fp.x_f >= p_.rho_v() * p_.b()) return std::nullopt;
  return fp;
}

std::optional<DsSegment> find_ds(const std::vector<TrajectoryArc>& arcs_a,
                                 const std::vector<TrajectoryArc>& arcs_b,
                                 Axis axis) {
  const ArcStop want =
      axis == Axis::Vertical ? ArcStop::VerticalAxis : ArcStop::HorizontalAxis;
  struct Crossing {
    double coord;
    double tau;
  };
  auto collect = [&](const std::vector<TrajectoryArc>& arcs) {
    std::vector<Crossing> out;
    for (const TrajectoryArc& a : arcs) {
      if (a.stop != want || a.samples.empty()) continue;
      const ReducedState& s = a.samples.back().state;
      out.push_back({axis == Axis::Vertical ? s.y : s.x, a.tau_end});
    }
    std::sort(out.begin(), out.end(),
              [](const Crossing& l, const Crossing& r) {
                return l.coord < r.coord;
              });
    return out;
  };
  const std::vector<Crossing> ca = collect(arcs_a);
  const std::vector<Crossing> cb = collect(arcs_b);
  if (ca.empty() || cb.empty()) return std::nullopt;
  DsSegment seg;
  seg.axis = axis;
  seg.lo = ca.front().coord;
  seg.hi = ca.back().coord;
  seg.branch_a = arcs_a.front().quadrant;
  seg.branch_b = arcs_b.front().quadrant;
  for (const Crossing& c : ca) {
    auto it = std::lower_bound(
        cb.begin(), cb.end(), c.coord,
        [](const Crossing& l, double v) { return l.coord < v; });
    const Crossing* best = nullptr;
    double best_d = kInf;
    for (auto cand : {it, it == cb.begin() ? it : it - 1}) {
      if (cand == cb.end()) continue;
      const double d = std::abs(cand->coord - c.coord);
      if (d < best_d) {
        best_d = d;
        best = &*cand;
      }
    }
    if (best == nullptr) continue;
    seg.cost_gap = std::max(seg.cost_gap, std::abs(best->tau - c.tau));
    ++seg.pairs;
  }
  return seg;
}

}  // namespace survgame
