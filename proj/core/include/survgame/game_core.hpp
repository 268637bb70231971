#pragma once

#include <numbers>

namespace survgame {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Below this radius the polar chart is undefined.
inline constexpr double kPolarCutoff = 1e-9;

double wrap_two_pi(double angle);
// Signed difference a - b folded into (-pi, pi].
double angle_diff(double a, double b);

class GameParams {
 public:
  // Validates v_r_max, v_a_max, b > 0 and r_d > b.
  GameParams(double v_r_max, double v_a_max, double b, double r_d);

  double v_r_max() const { return v_r_max_; }
  double v_a_max() const { return v_a_max_; }
  double b() const { return b_; }
  double r_d() const { return r_d_; }
  double rho_v() const { return rho_v_; }
  double rho_d() const { return rho_d_; }

  // Default integration step, 1e-3 body lengths of pursuer travel.
  double default_dt() const { return 1e-3 * b_ / v_r_max_; }

  // Throws UnsupportedRegime unless the evader is strictly faster.
  void require_faster_evader() const;

  friend bool operator==(const GameParams&, const GameParams&) = default;

 private:
  double v_r_max_;
  double v_a_max_;
  double b_;
  double r_d_;
  double rho_v_;
  double rho_d_;
};

struct RealisticState {
  double x_r = 0.0;
  double y_r = 0.0;
  double theta_r = 0.0;
  double x_a = 0.0;
  double y_a = 0.0;

  // Returns a copy with theta_r folded into [0, 2pi).
  RealisticState normalized() const;
};

struct ReducedState {
  double x = 0.0;
  double y = 0.0;

  double radius() const;
};

struct PolarState {
  double r = 0.0;
  double phi = 0.0;
};

struct WheelControls {
  double u1 = 0.0;
  double u2 = 0.0;

  double translation() const { return 0.5 * (u1 + u2); }
  double rotation(double b) const { return (u2 - u1) / (2.0 * b); }
  friend bool operator==(const WheelControls&, const WheelControls&) = default;
};

struct EvaderControl {
  double v1 = 0.0;
  double v2 = 0.0;
};

// Evader velocity in the world frame: speed and counter-clockwise heading psi_a.
struct WorldEvaderControl {
  double speed = 0.0;
  double heading = 0.0;
};

struct ReducedRate {
  double dx = 0.0;
  double dy = 0.0;
};

struct PolarRate {
  double dr = 0.0;
  double dphi = 0.0;
};

struct RealisticRate {
  double dx_r = 0.0;
  double dy_r = 0.0;
  double dtheta_r = 0.0;
  double dx_a = 0.0;
  double dy_a = 0.0;
};

ReducedState to_reduced(const RealisticState& rs);
PolarState to_polar(const ReducedState& s);
ReducedState from_polar(const PolarState& p);

// Reduced-frame evader direction to world heading, and back.
WorldEvaderControl to_world(const EvaderControl& v, double theta_r);
EvaderControl to_reduced_control(const WorldEvaderControl& w, double theta_r);

void check_controls(const GameParams& p, const WheelControls& u);
void check_controls(const GameParams& p, const EvaderControl& v);

ReducedRate reduced_dynamics(const GameParams& p, const ReducedState& s,
                             const WheelControls& u, const EvaderControl& v);
ReducedRate retro_reduced_dynamics(const GameParams& p, const ReducedState& s,
                                   const WheelControls& u,
                                   const EvaderControl& v);
PolarRate polar_dynamics(const GameParams& p, const PolarState& ps,
                         const WheelControls& u, const EvaderControl& v);
RealisticRate realistic_dynamics(const GameParams& p, const RealisticState& rs,
                                 const WheelControls& u,
                                 const WorldEvaderControl& v);

}  // namespace survgame
