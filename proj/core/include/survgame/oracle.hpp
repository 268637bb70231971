#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "survgame/game_core.hpp"
#include "survgame/partition.hpp"

namespace survgame {

// Pursuer actions searched by the DP: the four wheel-extreme combinations
// followed by coast.
inline constexpr int kDpPursuerActions = 5;
WheelControls dp_pursuer_action(const GameParams& p, int index);

struct DpOptions {
  double tolerance = 1e-4;
  // 0 selects a cap derived from the largest possible value and dt.
  int max_iterations = 0;
  // Every n-th active cell is re-evaluated with max-min order.
  int swap_stride = 7;
};

// Time-to-escape on a square grid over [-r_d, r_d]^2. Grid nodes outside the
// detection disc hold 0; internally the backup extends the value linearly past
// r_d with the escape-rate gradient so that interpolation straddling the
// circle stays consistent.
class ValueGrid {
 public:
  const GameParams& params() const { return params_; }
  int n() const { return n_; }
  int k() const { return k_; }
  double dt() const { return dt_; }
  double spacing() const { return h_; }
  double lower() const { return -params_.r_d(); }
  // Exactly antisymmetric about the centre so that mirrored nodes agree.
  double node_x(int i) const { return (2 * i - (n_ - 1)) * (0.5 * h_); }
  double node_y(int j) const { return (2 * j - (n_ - 1)) * (0.5 * h_); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * n_ + i;
  }
  bool active(int i, int j) const;

  const std::vector<double>& values() const { return values_; }
  // Evader policy per node: heading index in [0, k) or -1 for standing still.
  const std::vector<std::int16_t>& evader_policy() const { return evader_; }
  const std::vector<std::int8_t>& pursuer_policy() const { return pursuer_; }

  int iterations() const { return iterations_; }
  double final_change() const { return final_change_; }
  // True when no sweep raised any node.
  bool monotone() const { return monotone_; }
  double full_speed_fraction() const { return full_speed_fraction_; }
  // Largest |min-max - max-min| over the re-evaluated subsample.
  double swap_gap() const { return swap_gap_; }
  std::size_t swap_samples() const { return swap_samples_; }

  double evader_heading(int index) const;
  // Bilinear interpolation; the linear extension beyond r_d is clipped to 0.
  double value_at(const ReducedState& s) const;
  // Evader heading of the nearest active node, or nullopt if it stands still.
  std::optional<double> evader_heading_at(const ReducedState& s) const;

 private:
  friend ValueGrid dp_solve(const GameParams&, int, int, double,
                            const DpOptions&);
  ValueGrid(const GameParams& p, int n, int k, double dt);

  double extension(double x, double y) const;
  double sample(const std::vector<double>& v, double x, double y) const;

  GameParams params_;
  int n_;
  int k_;
  double dt_;
  double h_;
  std::vector<double> values_;
  std::vector<std::int16_t> evader_;
  std::vector<std::int8_t> pursuer_;
  int iterations_ = 0;
  double final_change_ = 0.0;
  bool monotone_ = true;
  double full_speed_fraction_ = 0.0;
  double swap_gap_ = 0.0;
  std::size_t swap_samples_ = 0;
};

// Throws UnsupportedRegime for rho_v <= 1, InvalidParameters for N < 101,
// K < 32 or dt <= 0, and NonConvergence when the cap is hit.
ValueGrid dp_solve(const GameParams& p, int n, int k, double dt,
                   const DpOptions& opts = {});

struct CompareSample {
  ReducedState state;
  double analytic = 0.0;
  double dp = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  // Distance to the nearest singular locus or boundary circle, in cells.
  double clearance_cells = 0.0;
  bool excluded = false;
};

struct CompareReport {
  std::vector<CompareSample> samples;
  std::size_t used = 0;
  std::size_t excluded = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  double max_abs_error = 0.0;
};

// Distance from s to the nearest singular locus of the partition, or to the
// body or detection circle, mirrored over all four quadrants.
double locus_clearance(const ReducedState& s, const Partition& part);

CompareReport compare(const Partition& part, const ValueGrid& grid,
                      std::span<const ReducedState> samples,
                      double min_clearance_cells = 2.0);

// Uniform states in the annulus b < r < r_d that keep `min_clearance_cells`
// grid cells away from every locus, optionally restricted to the region of
// one arc family; deterministic for a given seed.
std::vector<ReducedState> clear_samples(
    const Partition& part, const ValueGrid& grid, std::size_t count,
    std::uint64_t seed, double min_clearance_cells = 2.0,
    std::optional<ArcFamily> family = std::nullopt);

}  // namespace survgame
