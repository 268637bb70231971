#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survgame/game_core.hpp"
#include "survgame/surfaces.hpp"

namespace survgame {

enum class RegimeLabel { SlowerEvader, NoCriticalPoint, CriticalPoint };
enum class FsSource { None, Ts, Us };

std::string_view to_string(RegimeLabel l);
std::string_view to_string(FsSource s);

struct Regime {
  RegimeLabel label = RegimeLabel::SlowerEvader;
  bool has_critical_point = false;
  bool has_us = false;
  bool has_fs = false;
  bool has_vertical_ds = false;
  bool has_horizontal_ds = false;
  FsSource fs_source = FsSource::None;
};

// Throws Boundary when rho_v == 1 or rho_v*rho_d == 1.
Regime classify_regime(const GameParams& p);

struct PartitionResolution {
  int primary_arcs = 400;
  int ts_arcs = 400;
  int us_arcs = 200;
  int fs_arcs = 100;
  // Spatial spacing of samples along arcs; 0 selects r_d/400.
  double sample_spacing = 0.0;
  int coverage_grid = 400;
  // Lookup bucket edge; 0 selects r_d/200.
  double bucket_size = 0.0;
  bool require_coverage = true;
};

struct CoverageReport {
  double fraction = 0.0;
  std::size_t probes = 0;
  std::size_t covered = 0;
  std::vector<ReducedState> uncovered;
};

// Singular structure a state sits on, if any.
enum class SurfaceTag { None, Transition, Universal, Focal, Dispersal, Critical };

std::string_view to_string(SurfaceTag t);

struct RegionId {
  ArcFamily family = ArcFamily::Primary;
  Quadrant quadrant = Quadrant::I;
  SurfaceTag surface = SurfaceTag::None;

  std::string label() const;
  friend bool operator==(const RegionId&, const RegionId&) = default;
};

// Where on the canonical construction a lookup landed.
struct ArcRef {
  ArcFamily family = ArcFamily::Primary;
  double param = 0.0;
  double local_tau = 0.0;
  // Nearest stored arc in Partition::arcs().
  std::size_t arc_index = 0;
};

struct Branch {
  RegionId region;
  WheelControls pursuer;
  EvaderControl evader;
  double time_to_escape = 0.0;
};

struct StrategyResult {
  RegionId region;
  ArcRef arc;
  WheelControls pursuer;
  EvaderControl evader;
  double time_to_escape = 0.0;
  // True when the state sits where several controls are equally optimal
  // (dispersal surfaces, critical point).
  bool multiple = false;
  std::vector<Branch> branches;
  // Equally optimal evader headings at the critical point.
  std::optional<AxisInterval> fan;
  // False when the arc inversion failed and the nearest sample was used.
  bool exact = true;
};

class Partition {
 public:
  const GameParams& params() const { return model_.params(); }
  const SurfaceModel& model() const { return model_; }
  const Regime& regime() const { return regime_; }
  const SingularLoci& loci() const { return loci_; }
  const std::vector<TrajectoryArc>& arcs() const { return arcs_; }
  // Arcs [0, canonical_count()) are the quadrant-I construction.
  std::size_t canonical_count() const { return canonical_; }
  const CoverageReport& coverage() const { return coverage_; }
  const PartitionResolution& resolution() const { return resolution_; }
  // Default distance within which a state counts as on a singular locus.
  double surface_tolerance() const { return 1e-6 * params().r_d(); }

  StrategyResult locate(const ReducedState& s) const;
  StrategyResult locate(const ReducedState& s, double surface_tol) const;

 private:
  friend Partition build_partition(const GameParams&,
                                   const PartitionResolution&);
  explicit Partition(const GameParams& p);

  struct Inversion {
    ArcFamily family;
    double param;
    double local_tau;
    std::size_t arc_index;
    bool exact;
  };
  struct StopEntry {
    double param;
    double local_tau;
    ArcStop kind;
  };
  struct Hit {
    std::size_t arc;
    std::size_t sample;
    double d2;
  };

  void build_index();
  std::vector<Hit> nearby(const ReducedState& c, std::size_t want) const;
  std::optional<Inversion> invert(const ReducedState& c) const;
  StrategyResult resolve(const ReducedState& s, double tol) const;

  SurfaceModel model_;
  Regime regime_;
  SingularLoci loci_;
  std::vector<TrajectoryArc> arcs_;
  std::size_t canonical_ = 0;
  CoverageReport coverage_;
  PartitionResolution resolution_;

  // Stored stopping times per parametrized family, sorted by parameter.
  std::array<std::vector<StopEntry>, 5> stops_;
  double bucket_ = 0.0;
  int buckets_per_side_ = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> index_;
};

Partition build_partition(const GameParams& p,
                          const PartitionResolution& res = {});

StrategyResult locate(const ReducedState& s, const Partition& part);
double value(const ReducedState& s, const Partition& part);

}  // namespace survgame
