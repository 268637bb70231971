#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "survgame/error.hpp"
#include "survgame/game_core.hpp"

namespace survgame {

template <std::size_t N>
using StateVec = std::array<double, N>;

template <std::size_t N>
struct PathSample {
  double t = 0.0;
  StateVec<N> x{};
};

template <std::size_t N>
using SampledPath = std::vector<PathSample<N>>;

namespace detail {

template <std::size_t N>
StateVec<N> axpy(const StateVec<N>& x, double a, const StateVec<N>& k) {
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + a * k[i];
  return out;
}

template <std::size_t N>
void require_finite(const StateVec<N>& x, double t) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite,
                  "integration produced a non-finite state at t=" +
                      std::to_string(t));
    }
  }
}

}  // namespace detail

// One classical fourth-order step of dx/dt = field(t, x).
template <std::size_t N, class Field>
StateVec<N> rk4_step(const Field& field, double t, const StateVec<N>& x,
                     double dt) {
  const StateVec<N> k1 = field(t, x);
  const StateVec<N> k2 = field(t + 0.5 * dt, detail::axpy(x, 0.5 * dt, k1));
  const StateVec<N> k3 = field(t + 0.5 * dt, detail::axpy(x, 0.5 * dt, k2));
  const StateVec<N> k4 = field(t + dt, detail::axpy(x, dt, k3));
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Fixed-step integration over [0, duration]. The last step is shortened so the
// path ends exactly at `duration`.
template <std::size_t N, class Field>
SampledPath<N> integrate(const Field& field, const StateVec<N>& x0,
                         double duration, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidParameters, "integration step must be > 0");
  }
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorKind::InvalidParameters,
                "integration duration must be >= 0");
  }
  detail::require_finite(x0, 0.0);
  SampledPath<N> path;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  path.reserve(steps + 1);
  path.push_back({0.0, x0});
  StateVec<N> x = x0;
  double t = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double h = std::min(dt, duration - t);
    x = rk4_step<N>(field, t, x, h);
    t = (i + 1 == steps) ? duration : t + h;
    detail::require_finite(x, t);
    path.push_back({t, x});
  }
  return path;
}

// Reduced-space integration under constant controls; `retro` flips time.
SampledPath<2> integrate_reduced(const GameParams& p, const ReducedState& s0,
                                 const WheelControls& u,
                                 const EvaderControl& v, double duration,
                                 double dt, bool retro = false);

// Realistic-space integration under constant wheel and world-frame controls.
SampledPath<5> integrate_realistic(const GameParams& p,
                                   const RealisticState& s0,
                                   const WheelControls& u,
                                   const WorldEvaderControl& v,
                                   double duration, double dt);

inline ReducedState as_reduced(const StateVec<2>& x) { return {x[0], x[1]}; }
inline StateVec<2> as_vec(const ReducedState& s) { return {s.x, s.y}; }
inline RealisticState as_realistic(const StateVec<5>& x) {
  return {x[0], x[1], x[2], x[3], x[4]};
}
inline StateVec<5> as_vec(const RealisticState& s) {
  return {s.x_r, s.y_r, s.theta_r, s.x_a, s.y_a};
}

}  // namespace survgame
