#include "survgame/pmp.hpp"

#include <cmath>
#include <sstream>

#include "survgame/error.hpp"

namespace survgame {

double Costate::gamma() const { return std::hypot(lambda_x, lambda_y); }

double hamiltonian(const GameParams& p, const ReducedState& s,
                   const Costate& c, const WheelControls& u,
                   const EvaderControl& v) {
  const double w = u.rotation(p.b());
  const double V = u.translation();
  return c.lambda_x * (w * s.y + v.v1 * std::sin(v.v2)) +
         c.lambda_y * (-w * s.x - V + v.v1 * std::cos(v.v2)) + 1.0;
}

SwitchArguments switch_arguments(const GameParams& p, const ReducedState& s,
                                 const Costate& c) {
  const double cross = (s.y * c.lambda_x - s.x * c.lambda_y) / p.b();
  return {-cross - c.lambda_y, cross - c.lambda_y};
}

WheelControls optimal_pursuer_controls(const GameParams& p,
                                       const ReducedState& s,
                                       const Costate& c) {
  const SwitchArguments a = switch_arguments(p, s, c);
  if (std::abs(a.a1) < kSwitchTolerance) throw SingularControlError(1, a.a1);
  if (std::abs(a.a2) < kSwitchTolerance) throw SingularControlError(2, a.a2);
  const double vr = p.v_r_max();
  return {a.a1 > 0.0 ? vr : -vr, a.a2 > 0.0 ? vr : -vr};
}

EvaderControl optimal_evader_control(const GameParams& p, const Costate& c) {
  if (!(c.gamma() > 1e-14)) {
    throw Error(ErrorKind::DegenerateCostate,
                "costate norm vanishes; evader heading undefined");
  }
  return {p.v_a_max(), wrap_two_pi(std::atan2(-c.lambda_x, -c.lambda_y))};
}

Costate costate_retro_flow(const GameParams& p, const Costate& c,
                           const WheelControls& u, double tau) {
  const double w = u.rotation(p.b());
  if (w == 0.0) return c;
  const double a = w * tau;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  return {c.lambda_x * ca - c.lambda_y * sa, c.lambda_x * sa + c.lambda_y * ca};
}

TerminalCondition terminal_state(const GameParams& p, double s) {
  const double ss = std::sin(s);
  const double cs = std::cos(s);
  return {{p.r_d() * ss, p.r_d() * cs}, {-ss, -cs}};
}

double terminal_costate_scale(const GameParams& p, double s) {
  const double denom = p.v_a_max() - p.v_r_max() * std::abs(std::cos(s));
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "terminal point s=" << s << " is not on the usable part";
    throw Error(ErrorKind::DegenerateCostate, os.str());
  }
  return 1.0 / denom;
}

UsablePartReport usable_part_check(double s, const GameParams& p) {
  const double cs = std::cos(s);
  UsablePartReport rep;
  rep.margin = -p.v_a_max() + p.v_r_max() * std::abs(cs);
  rep.usable = rep.margin < 0.0;
  const double vr = p.v_r_max();
  if (cs > 0.0) {
    rep.terminal_controls = {vr, vr};
  } else if (cs < 0.0) {
    rep.terminal_controls = {-vr, -vr};
  }
  return rep;
}

}  // namespace survgame
