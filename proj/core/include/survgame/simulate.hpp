#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "survgame/game_core.hpp"
#include "survgame/partition.hpp"

namespace survgame {

enum class EventKind { ControlSwitch, SurfaceEnter, SurfaceLeave, Escape };

std::string_view to_string(EventKind k);

struct TraceRow {
  double t = 0.0;
  RealisticState realistic;
  ReducedState reduced;
  WheelControls pursuer;
  EvaderControl evader;
  RegionId region;
};

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::Escape;
  std::string detail;
};

struct SimulationRun {
  GameParams params;
  RealisticState initial;
  double dt = 0.0;
  std::vector<TraceRow> trace;
  std::vector<SimEvent> events;
  double escape_time = 0.0;
};

// Replaces the evader's optimal reduced-frame control; used to probe the
// saddle property with sub-optimal evaders.
using EvaderOverride = std::function<EvaderControl(
    double t, const ReducedState& s, const EvaderControl& optimal)>;

struct SimulationOptions {
  // 0 selects 20x the analytic value of the initial state plus 10 s.
  double max_time = 0.0;
  // Distance at which the feedback law snaps onto US/FS/critical-point
  // controls; 0 selects 2*v_a_max*dt.
  double control_snap = 0.0;
  // Surface-membership distance for event tagging; 0 selects 1e-3*r_d.
  double event_tolerance = 0.0;
  EvaderOverride evader_override;
};

SimulationRun simulate_game(const RealisticState& init, const Partition& part,
                            double dt, const SimulationOptions& opts = {});

// Which singular structure a state lies on, to within `tol`.
SurfaceTag surface_membership(const ReducedState& s, const Partition& part,
                              double tol);

// Phase labels of a run with consecutive duplicates removed: family names,
// with "FAN" for the critical point. Interior runs shorter than `min_rows`
// trace rows are crossing transients and are skipped.
std::vector<std::string> phase_sequence(const SimulationRun& run,
                                        std::size_t min_rows = 3);

struct Snapshot {
  double t = 0.0;
  RealisticState pose;
  double detection_radius = 0.0;
  double body_radius = 0.0;
};

std::vector<Snapshot> export_snapshots(const SimulationRun& run,
                                       std::span<const double> times);

enum class Scenario { UsEscape, FsEscape };

std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view to_string(Scenario s);

// Initial state for the two reference runs: the DDR sits at the origin facing
// +y (so reduced and world coordinates coincide) and the evader starts just
// outside the body, displaced by `offset` off the axis.
RealisticState scenario_initial_state(Scenario s, const GameParams& p,
                                      double offset = 0.01);

}  // namespace survgame
