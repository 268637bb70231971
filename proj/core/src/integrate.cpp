#include "survgame/integrate.hpp"

namespace survgame {

SampledPath<2> integrate_reduced(const GameParams& p, const ReducedState& s0,
                                 const WheelControls& u,
                                 const EvaderControl& v, double duration,
                                 double dt, bool retro) {
  check_controls(p, u);
  check_controls(p, v);
  const double sign = retro ? -1.0 : 1.0;
  auto field = [&](double, const StateVec<2>& x) {
    const ReducedRate f = reduced_dynamics(p, as_reduced(x), u, v);
    return StateVec<2>{sign * f.dx, sign * f.dy};
  };
  return integrate<2>(field, as_vec(s0), duration, dt);
}

SampledPath<5> integrate_realistic(const GameParams& p,
                                   const RealisticState& s0,
                                   const WheelControls& u,
                                   const WorldEvaderControl& v,
                                   double duration, double dt) {
  auto field = [&](double, const StateVec<5>& x) {
    const RealisticRate f = realistic_dynamics(p, as_realistic(x), u, v);
    return StateVec<5>{f.dx_r, f.dy_r, f.dtheta_r, f.dx_a, f.dy_a};
  };
  return integrate<5>(field, as_vec(s0), duration, dt);
}

}  // namespace survgame
