#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "survgame/game_core.hpp"
#include "survgame/pmp.hpp"

namespace survgame {

enum class ArcFamily {
  Primary,
  TsTributary,
  Universal,
  UsTributary,
  Focal,
  FsTributary,
};

inline constexpr ArcFamily kAllFamilies[] = {
    ArcFamily::Primary,     ArcFamily::TsTributary, ArcFamily::Universal,
    ArcFamily::UsTributary, ArcFamily::Focal,       ArcFamily::FsTributary};

// Quadrants in clockwise order from the DDR heading: I (x>=0, y>=0),
// II (x>=0, y<0), III (x<0, y<0), IV (x<0, y>=0).
enum class Quadrant { I, II, III, IV };

inline constexpr Quadrant kAllQuadrants[] = {Quadrant::I, Quadrant::II,
                                             Quadrant::III, Quadrant::IV};

// Why a canonical arc stops in retro-time.
enum class ArcStop {
  Switch,          // wheel switch, continues as a TS tributary
  CriticalPoint,   // primary arc absorbed at (0, y_c)
  Body,            // reached r = b
  VerticalAxis,    // crossed x = 0
  HorizontalAxis,  // crossed y = 0
  Tangency,        // touched y = 0 tangentially; continues along the FS
  SegmentEnd,      // US or FS exhausted
  Exit,            // left the detection disc (should not happen)
};

std::string_view to_string(ArcFamily f);
std::string_view to_string(Quadrant q);
std::string_view to_string(ArcStop s);

bool has_family_param(ArcFamily f);
bool mirrors_x(Quadrant q);
bool mirrors_y(Quadrant q);
Quadrant quadrant_of(const ReducedState& s);

ReducedState mirror(const ReducedState& s, Quadrant q);
Costate mirror(const Costate& c, Quadrant q);
WheelControls mirror(const WheelControls& u, Quadrant q);
EvaderControl mirror(const EvaderControl& v, Quadrant q);

struct ArcPoint {
  double tau = 0.0;
  ReducedState state;
  Costate costate;
  WheelControls pursuer;
  EvaderControl evader;
};

ArcPoint mirror(const ArcPoint& a, Quadrant q);

struct TrajectoryArc {
  ArcFamily family = ArcFamily::Primary;
  std::optional<double> family_param;
  double tau_begin = 0.0;
  double tau_end = 0.0;
  Quadrant quadrant = Quadrant::I;
  ArcStop stop = ArcStop::Body;
  std::vector<ArcPoint> samples;
};

TrajectoryArc mirror(const TrajectoryArc& arc, Quadrant q);

struct CriticalPoint {
  double y_c = 0.0;
  double tau_c = 0.0;
  double s_c = 0.0;
};

struct FocalPoint {
  double x_f = 0.0;
  double tau_f = 0.0;
  ArcFamily source_family = ArcFamily::TsTributary;
  double source_param = 0.0;
  // Local retro-time along the source arc at the tangency.
  double source_local_tau = 0.0;
};

struct StateCostate {
  ReducedState state;
  Costate costate;
};

struct AxisInterval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Axis { Vertical, Horizontal };

struct DsSegment {
  Axis axis = Axis::Horizontal;
  double lo = 0.0;
  double hi = 0.0;
  Quadrant branch_a = Quadrant::I;
  Quadrant branch_b = Quadrant::II;
  // Largest |tau_a - tau_b| over paired crossings.
  double cost_gap = 0.0;
  std::size_t pairs = 0;
};

struct SingularLoci {
  std::vector<ReducedState> ts_curve;  // quadrant I, ordered by s
  std::optional<AxisInterval> us_segment;
  std::vector<AxisInterval> fs_segments;  // signed x ranges on y = 0
  std::vector<DsSegment> ds_segments;
  std::optional<CriticalPoint> critical_point;
  std::optional<FocalPoint> focal_point;
  std::optional<double> us_ds_split;
};

// Closed forms on the canonical quadrant. Regime-dependent pieces that need
// a parameter or a located point take it explicitly.

// Throws Boundary when rho_v*rho_d == 1; NONE when y_c <= b.
std::optional<CriticalPoint> critical_point(const GameParams& p);
// NONE for s == 0 (the straight arc never switches).
std::optional<double> switch_time(double s, const GameParams& p);
ReducedState primary_arc(const GameParams& p, double s, double tau);
StateCostate ts_tributary(const GameParams& p, double s, double tau1);
ReducedState us_arc(const GameParams& p, double tau2);
StateCostate us_tributary(const GameParams& p, double y_u, double tau3);
// Evader heading that keeps dy/dt = 0 on y = 0 while the DDR spins in place.
double fs_heading(const GameParams& p, double x);
double fs_duration(const GameParams& p, const FocalPoint& f);
ReducedState fs_arc(const GameParams& p, const FocalPoint& f, double tau4);
StateCostate fs_tributary(const GameParams& p, const FocalPoint& f,
                          double x_t, double tau5);

// Lowest ordinate on the axis still fed by the US; NONE when no tributary
// re-crosses x = 0.
std::optional<double> find_us_ds_split(const GameParams& p);
std::optional<FocalPoint> find_focal_point(const GameParams& p);

struct ArcStopInfo {
  double local_tau = 0.0;
  ArcStop kind = ArcStop::Body;
};

struct Junction {
  ArcFamily parent = ArcFamily::Primary;
  double parent_param = 0.0;
  double parent_local_tau = 0.0;
};

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Canonical-quadrant construction for one parameter set: holds the located
// singular points and evaluates every arc family from its closed form.
class SurfaceModel {
 public:
  explicit SurfaceModel(const GameParams& p);

  const GameParams& params() const { return p_; }
  const std::optional<CriticalPoint>& critical() const { return critical_; }
  const std::optional<FocalPoint>& focal() const { return focal_; }
  const std::optional<double>& us_split() const { return us_split_; }
  bool has_us() const { return has_us_; }
  // Lower end of the US on the axis (max of b and the split).
  double us_y_end() const { return us_y_end_; }
  // Smallest s whose switch point lies outside the body.
  double ts_s_lo() const { return ts_s_lo_; }

  bool family_present(ArcFamily f) const;
  ParamRange param_range(ArcFamily f) const;
  double tau_begin(ArcFamily f, double param) const;
  ArcPoint evaluate(ArcFamily f, double param, double local_tau) const;
  // Retro-time derivative of the state at the given point.
  ReducedRate retro_rate(ArcFamily f, double param, double local_tau) const;
  ArcStopInfo stop(ArcFamily f, double param) const;
  std::optional<Junction> parent(ArcFamily f, double param) const;

  TrajectoryArc build_arc(ArcFamily f, double param, double spacing) const;

  std::vector<ReducedState> ts_curve(std::size_t n) const;

 private:
  friend std::optional<FocalPoint> find_focal_point(const GameParams& p);
  ArcStopInfo scan_stop(ArcFamily f, double param, bool allow_tangency) const;
  std::optional<FocalPoint> locate_focal_point() const;

  GameParams p_;
  std::optional<CriticalPoint> critical_;
  std::optional<double> us_split_;
  bool has_us_ = false;
  double us_y_end_ = 0.0;
  double ts_s_lo_ = 0.0;
  std::optional<FocalPoint> focal_;
};

// Pairs axis crossings of two mirrored arc sets and reports the common
// interval. NONE when no arc of either set stops on the axis.
std::optional<DsSegment> find_ds(const std::vector<TrajectoryArc>& arcs_a,
                                 const std::vector<TrajectoryArc>& arcs_b,
                                 Axis axis);

}  // namespace survgame
