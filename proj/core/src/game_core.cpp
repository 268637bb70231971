#include "survgame/game_core.hpp"

#include <cmath>
#include <sstream>

#include "survgame/error.hpp"

namespace survgame {

namespace {

// Relative slack on control bounds so that saturated values computed in
// floating point are still admissible.
constexpr double kBoundSlack = 1e-12;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double angle_diff(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

GameParams::GameParams(double v_r_max, double v_a_max, double b, double r_d)
    : v_r_max_(v_r_max), v_a_max_(v_a_max), b_(b), r_d_(r_d) {
  if (!finite_positive(v_r_max) || !finite_positive(v_a_max) ||
      !finite_positive(b) || !std::isfinite(r_d) || !(r_d > b)) {
    std::ostringstream os;
    os << "invalid game parameters: v_r_max=" << v_r_max
       << " v_a_max=" << v_a_max << " b=" << b << " r_d=" << r_d
       << " (need positive speeds, b > 0 and r_d > b)";
    throw Error(ErrorKind::InvalidParameters, os.str());
  }
  rho_v_ = v_a_max_ / v_r_max_;
  rho_d_ = b_ / r_d_;
}

void GameParams::require_faster_evader() const {
  if (!(rho_v_ > 1.0)) {
    std::ostringstream os;
    os << "strategy synthesis needs a faster evader (rho_v=" << rho_v_ << ")";
    throw Error(ErrorKind::UnsupportedRegime, os.str());
  }
}

RealisticState RealisticState::normalized() const {
  RealisticState out = *this;
  out.theta_r = wrap_two_pi(theta_r);
  return out;
}

double ReducedState::radius() const { return std::hypot(x, y); }

ReducedState to_reduced(const RealisticState& rs) {
  const double dx = rs.x_a - rs.x_r;
  const double dy = rs.y_a - rs.y_r;
  const double s = std::sin(rs.theta_r);
  const double c = std::cos(rs.theta_r);
  return {dx * s - dy * c, dx * c + dy * s};
}

PolarState to_polar(const ReducedState& s) {
  const double r = std::hypot(s.x, s.y);
  if (r < kPolarCutoff) {
    throw Error(ErrorKind::PolarSingularity, "polar chart undefined at r ~ 0");
  }
  return {r, wrap_two_pi(std::atan2(s.x, s.y))};
}

ReducedState from_polar(const PolarState& p) {
  return {p.r * std::sin(p.phi), p.r * std::cos(p.phi)};
}

WorldEvaderControl to_world(const EvaderControl& v, double theta_r) {
  return {v.v1, wrap_two_pi(theta_r - v.v2)};
}

EvaderControl to_reduced_control(const WorldEvaderControl& w, double theta_r) {
  return {w.speed, wrap_two_pi(theta_r - w.heading)};
}

void check_controls(const GameParams& p, const WheelControls& u) {
  const double lim = p.v_r_max() * (1.0 + kBoundSlack);
  if (!std::isfinite(u.u1) || !std::isfinite(u.u2) || std::abs(u.u1) > lim ||
      std::abs(u.u2) > lim) {
    std::ostringstream os;
    os << "wheel controls (" << u.u1 << ", " << u.u2 << ") exceed +/-"
       << p.v_r_max();
    throw Error(ErrorKind::ControlOutOfBounds, os.str());
  }
}

void check_controls(const GameParams& p, const EvaderControl& v) {
  const double lim = p.v_a_max() * (1.0 + kBoundSlack);
  if (!std::isfinite(v.v1) || !std::isfinite(v.v2) || v.v1 < 0.0 ||
      v.v1 > lim) {
    std::ostringstream os;
    os << "evader speed " << v.v1 << " outside [0, " << p.v_a_max() << "]";
    throw Error(ErrorKind::ControlOutOfBounds, os.str());
  }
}

ReducedRate reduced_dynamics(const GameParams& p, const ReducedState& s,
                             const WheelControls& u, const EvaderControl& v) {
  check_controls(p, u);
  check_controls(p, v);
  const double w = u.rotation(p.b());
  const double V = u.translation();
  return {w * s.y + v.v1 * std::sin(v.v2),
          -w * s.x - V + v.v1 * std::cos(v.v2)};
}

ReducedRate retro_reduced_dynamics(const GameParams& p, const ReducedState& s,
                                   const WheelControls& u,
                                   const EvaderControl& v) {
  const ReducedRate f = reduced_dynamics(p, s, u, v);
  return {-f.dx, -f.dy};
}

PolarRate polar_dynamics(const GameParams& p, const PolarState& ps,
                         const WheelControls& u, const EvaderControl& v) {
  if (!(ps.r >= kPolarCutoff)) {
    throw Error(ErrorKind::PolarSingularity, "polar dynamics undefined at r ~ 0");
  }
  check_controls(p, u);
  check_controls(p, v);
  const double w = u.rotation(p.b());
  const double V = u.translation();
  const double rel = v.v2 - ps.phi;
  return {v.v1 * std::cos(rel) - V * std::cos(ps.phi),
          w + (v.v1 * std::sin(rel) + V * std::sin(ps.phi)) / ps.r};
}

RealisticRate realistic_dynamics(const GameParams& p, const RealisticState& rs,
                                 const WheelControls& u,
                                 const WorldEvaderControl& v) {
  check_controls(p, u);
  check_controls(p, EvaderControl{v.speed, 0.0});
  const double V = u.translation();
  return {V * std::cos(rs.theta_r), V * std::sin(rs.theta_r),
          u.rotation(p.b()), v.speed * std::cos(v.heading),
          v.speed * std::sin(v.heading)};
}

}  // namespace survgame
