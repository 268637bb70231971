#pragma once

#include "survgame/game_core.hpp"

namespace survgame {

// Sign arguments closer to zero than this are treated as singular.
inline constexpr double kSwitchTolerance = 1e-12;

struct Costate {
  double lambda_x = 0.0;
  double lambda_y = 0.0;

  double gamma() const;
};

struct SwitchArguments {
  double a1 = 0.0;
  double a2 = 0.0;
};

struct TerminalCondition {
  ReducedState state;
  Costate costate;
};

struct UsablePartReport {
  bool usable = false;
  // max over admissible wheel speeds of the radial closing rate at r = r_d.
  double margin = 0.0;
  WheelControls terminal_controls;
};

double hamiltonian(const GameParams& p, const ReducedState& s,
                   const Costate& c, const WheelControls& u,
                   const EvaderControl& v);

SwitchArguments switch_arguments(const GameParams& p, const ReducedState& s,
                                 const Costate& c);

// Bang-bang wheel speeds maximizing H; throws SingularControlError when a
// switching argument is within kSwitchTolerance of zero.
WheelControls optimal_pursuer_controls(const GameParams& p,
                                       const ReducedState& s,
                                       const Costate& c);

EvaderControl optimal_evader_control(const GameParams& p, const Costate& c);

// Exact solution of the retro-time costate equations under constant controls.
Costate costate_retro_flow(const GameParams& p, const Costate& c,
                           const WheelControls& u, double tau);

// Point on the detection circle with the unit transversality costate.
TerminalCondition terminal_state(const GameParams& p, double s);

// Multiplier that makes H vanish at the terminal point for angle s.
double terminal_costate_scale(const GameParams& p, double s);

UsablePartReport usable_part_check(double s, const GameParams& p);

}  // namespace survgame
