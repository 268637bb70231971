#include "survgame/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "survgame/error.hpp"

namespace survgame {

namespace {

constexpr double kBig = 1e9;

double segment_distance(double px, double py, double ax, double ay, double bx,
                        double by) {
  const double vx = bx - ax;
  const double vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

struct Node {
  std::size_t idx;
  double x;
  double y;
};

}  // namespace

WheelControls dp_pursuer_action(const GameParams& p, int index) {
  const double v = p.v_r_max();
  switch (index) {
    case 0: return {v, v};
    case 1: return {-v, -v};
    case 2: return {v, -v};
    case 3: return {-v, v};
    case 4: return {0.0, 0.0};
  }
  throw Error(ErrorKind::OutOfRange, "dp_pursuer_action: index out of range");
}

ValueGrid::ValueGrid(const GameParams& p, int n, int k, double dt)
    : params_(p),
      n_(n),
      k_(k),
      dt_(dt),
      h_(2.0 * p.r_d() / (n - 1)),
      values_(static_cast<std::size_t>(n) * n, 0.0),
      evader_(values_.size(), -1),
      pursuer_(values_.size(), -1) {}

// Integer test: nodes lying exactly on r = r_d are outside.
bool ValueGrid::active(int i, int j) const {
  const long long a = 2LL * i - (n_ - 1);
  const long long b = 2LL * j - (n_ - 1);
  const long long m = n_ - 1;
  return a * a + b * b < m * m;
}

double ValueGrid::evader_heading(int index) const {
  return kTwoPi * index / k_;
}

// Past r_d the value is continued with slope 1/(Va - Vr|cos|), the best
// radial escape rate at that bearing.
double ValueGrid::extension(double x, double y) const {
  const double r = std::hypot(x, y);
  const double c = r > 0.0 ? std::abs(y) / r : 1.0;
  return (params_.r_d() - r) / (params_.v_a_max() - params_.v_r_max() * c);
}

double ValueGrid::sample(const std::vector<double>& v, double x,
                         double y) const {
  const double r = std::hypot(x, y);
  if (r >= params_.r_d()) return extension(x, y);
  // The body is impenetrable: a step ending inside it slides to r = b.
  if (r < params_.b() && r > 0.0) {
    x *= params_.b() / r;
    y *= params_.b() / r;
  }
  const double fx = (x - lower()) / h_;
  const double fy = (y - lower()) / h_;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
  const double wx = fx - i;
  const double wy = fy - j;
  const std::size_t a = index(i, j);
  const std::size_t b = a + static_cast<std::size_t>(n_);
  return (1.0 - wy) * ((1.0 - wx) * v[a] + wx * v[a + 1]) +
         wy * ((1.0 - wx) * v[b] + wx * v[b + 1]);
}

double ValueGrid::value_at(const ReducedState& s) const {
  if (std::hypot(s.x, s.y) >= params_.r_d()) return 0.0;
  // Rebuild the ghost layer locally: values_ stores 0 outside the disc.
  const double fx = (s.x - lower()) / h_;
  const double fy = (s.y - lower()) / h_;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
  auto node = [&](int ii, int jj) {
    return active(ii, jj) ? values_[index(ii, jj)]
                          : extension(node_x(ii), node_y(jj));
  };
  const double wx = fx - i;
  const double wy = fy - j;
  const double v = (1.0 - wy) * ((1.0 - wx) * node(i, j) + wx * node(i + 1, j)) +
                   wy * ((1.0 - wx) * node(i, j + 1) + wx * node(i + 1, j + 1));
  return std::max(0.0, v);
}

std::optional<double> ValueGrid::evader_heading_at(
    const ReducedState& s) const {
  const int i = std::clamp(
      static_cast<int>(std::lround((s.x - lower()) / h_)), 0, n_ - 1);
  const int j = std::clamp(
      static_cast<int>(std::lround((s.y - lower()) / h_)), 0, n_ - 1);
  const int e = evader_[index(i, j)];
  if (!active(i, j) || e < 0) return std::nullopt;
  return evader_heading(e);
}

ValueGrid dp_solve(const GameParams& p, int n, int k, double dt,
                   const DpOptions& opts) {
  p.require_faster_evader();
  if (n < 101 || k < 32 || !(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidParameters,
                "dp_solve: need N >= 101, K >= 32 and dt > 0");
  }
  ValueGrid g(p, n, k, dt);

  std::vector<Node> nodes;
  std::vector<std::size_t> row_start{0};
  std::vector<double> cur(g.values_.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.active(i, j)) {
        nodes.push_back({idx, g.node_x(i), g.node_y(j)});
        cur[idx] = kBig;
      } else {
        cur[idx] = g.extension(g.node_x(i), g.node_y(j));
      }
    }
    row_start.push_back(nodes.size());
  }
  std::vector<double> next = cur;
  const std::size_t rows = row_start.size() - 1;

  std::array<double, kDpPursuerActions> omega{};
  std::array<double, kDpPursuerActions> trans{};
  for (int a = 0; a < kDpPursuerActions; ++a) {
    const WheelControls u = dp_pursuer_action(p, a);
    omega[a] = u.rotation(p.b());
    trans[a] = u.translation();
  }
  std::array<double, kDpPursuerActions> rot_c{};
  std::array<double, kDpPursuerActions> rot_s{};
  for (int a = 0; a < kDpPursuerActions; ++a) {
    rot_c[a] = std::cos(omega[a] * dt);
    rot_s[a] = std::sin(omega[a] * dt);
  }
  // Evader velocity per option; index k is standing still.
  std::vector<double> ex(k + 1, 0.0);
  std::vector<double> ey(k + 1, 0.0);
  for (int e = 0; e < k; ++e) {
    ex[e] = p.v_a_max() * std::sin(g.evader_heading(e));
    ey[e] = p.v_a_max() * std::cos(g.evader_heading(e));
  }

  // Foot of the characteristic under constant controls, integrated exactly:
  // a clockwise rotation about the instantaneous centre, or a translation
  // when the DDR does not turn. An Euler step would spiral outwards.
  auto foot = [&](const Node& nd, int a, int e, double* fx, double* fy) {
    const double cx = ex[e];
    const double cy = ey[e] - trans[a];
    if (omega[a] == 0.0) {
      *fx = nd.x + dt * cx;
      *fy = nd.y + dt * cy;
      return;
    }
    const double xs = cy / omega[a];
    const double ys = -cx / omega[a];
    const double dx = nd.x - xs;
    const double dy = nd.y - ys;
    *fx = xs + dx * rot_c[a] + dy * rot_s[a];
    *fy = ys - dx * rot_s[a] + dy * rot_c[a];
  };

  // max over pursuer actions at evader option e, abandoning the search once
  // it cannot beat `bound`.
  auto worst_case = [&](const std::vector<double>& v, const Node& nd, int e,
                        int first, double bound, int* arg) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < kDpPursuerActions; ++t) {
      const int a = (first + t) % kDpPursuerActions;
      double fx;
      double fy;
      foot(nd, a, e, &fx, &fy);
      const double val = g.sample(v, fx, fy);
      if (val > worst) {
        worst = val;
        if (arg) *arg = a;
        if (worst >= bound) break;
      }
    }
    return worst;
  };

  const double vmax_guess =
      p.r_d() / (p.v_a_max() - p.v_r_max()) + kTwoPi * p.b() / p.v_r_max();
  const int cap = opts.max_iterations > 0
                      ? opts.max_iterations
                      : static_cast<int>(std::ceil(10.0 * vmax_guess / dt)) +
                            1000;

  std::vector<double> row_change(rows);
  std::vector<char> row_unreached(rows);
  std::vector<char> row_raised(rows);
  int it = 0;
  double change = 0.0;
  for (;;) {
    if (it >= cap) {
      std::ostringstream os;
      os << "dp_solve: no convergence after " << cap
         << " sweeps (last change " << change << " s)";
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    detail::parallel_for(rows, [&](std::size_t r) {
      double ch = 0.0;
      bool unreached = false;
      bool raised = false;
      for (std::size_t q = row_start[r]; q < row_start[r + 1]; ++q) {
        const Node& nd = nodes[q];
        const int prev_e = g.evader_[nd.idx] < 0 ? k : g.evader_[nd.idx];
        const int prev_a = std::max<int>(0, g.pursuer_[nd.idx]);
        double best = std::numeric_limits<double>::infinity();
        int best_e = prev_e;
        int best_a = prev_a;
        // Previous best option first, then fanning out around it; standing
        // still comes last unless it was the previous best.
        for (int t = 0; t <= k; ++t) {
          int e;
          if (prev_e == k) {
            e = t == 0 ? k : t - 1;
          } else if (t == k) {
            e = k;
          } else {
            const int off = (t + 1) / 2;
            e = (t % 2 ? prev_e + off : prev_e - off + k) % k;
          }
          int arg = prev_a;
          const double w = worst_case(cur, nd, e, prev_a, best, &arg);
          if (w < best) {
            best = w;
            best_e = e;
            best_a = arg;
          }
        }
        const double nv = std::min(kBig, dt + best);
        const double old = cur[nd.idx];
        next[nd.idx] = nv;
        g.evader_[nd.idx] = static_cast<std::int16_t>(best_e == k ? -1 : best_e);
        g.pursuer_[nd.idx] = static_cast<std::int8_t>(best_a);
        if (nv >= kBig) unreached = true;
        if (nv > old) raised = true;
        if (old < kBig) ch = std::max(ch, std::abs(nv - old));
        else if (nv < kBig) ch = std::numeric_limits<double>::infinity();
      }
      row_change[r] = ch;
      row_unreached[r] = unreached;
      row_raised[r] = raised;
    });
    ++it;
    change = 0.0;
    bool unreached = false;
    for (std::size_t r = 0; r < rows; ++r) {
      change = std::max(change, row_change[r]);
      unreached = unreached || row_unreached[r];
      if (row_raised[r]) g.monotone_ = false;
    }
    cur.swap(next);
    if (!unreached && change < opts.tolerance) break;
  }
  g.iterations_ = it;
  g.final_change_ = change;

  std::size_t moving = 0;
  for (const Node& nd : nodes) {
    g.values_[nd.idx] = cur[nd.idx];
    if (g.evader_[nd.idx] >= 0) ++moving;
  }
  g.full_speed_fraction_ =
      nodes.empty() ? 1.0 : static_cast<double>(moving) / nodes.size();

  // Swapped order on a subsample: max over pursuer of min over evader.
  const std::size_t stride = std::max(1, opts.swap_stride);
  double gap = 0.0;
  std::size_t count = 0;
  for (std::size_t q = 0; q < nodes.size(); q += stride) {
    const Node& nd = nodes[q];
    double maxmin = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kDpPursuerActions; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      for (int e = 0; e <= k; ++e) {
        double fx;
        double fy;
        foot(nd, a, e, &fx, &fy);
        lo = std::min(lo, g.sample(cur, fx, fy));
      }
      maxmin = std::max(maxmin, lo);
    }
    double minmax = std::numeric_limits<double>::infinity();
    for (int e = 0; e <= k; ++e) {
      minmax = std::min(minmax, worst_case(cur, nd, e, 0,
                                           std::numeric_limits<double>::infinity(),
                                           nullptr));
    }
    gap = std::max(gap, std::abs(minmax - maxmin));
    ++count;
  }
  g.swap_gap_ = gap;
  g.swap_samples_ = count;
  return g;
}

double locus_clearance(const ReducedState& s, const Partition& part) {
  const GameParams& p = part.params();
  const SingularLoci& loci = part.loci();
  const double x = std::abs(s.x);
  const double y = std::abs(s.y);
  const double r = std::hypot(x, y);
  double d = std::min(std::abs(r - p.b()), std::abs(p.r_d() - r));
  const auto& ts = loci.ts_curve;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    d = std::min(d, segment_distance(x, y, ts[i - 1].x, ts[i - 1].y, ts[i].x,
                                     ts[i].y));
  }
  if (loci.us_segment) {
    d = std::min(d, segment_distance(x, y, 0.0, loci.us_segment->lo, 0.0,
                                     loci.us_segment->hi));
  }
  for (const AxisInterval& f : loci.fs_segments) {
    const double lo = std::min(std::abs(f.lo), std::abs(f.hi));
    const double hi = std::max(std::abs(f.lo), std::abs(f.hi));
    d = std::min(d, segment_distance(x, y, lo, 0.0, hi, 0.0));
  }
  for (const DsSegment& ds : loci.ds_segments) {
    const double lo = std::min(std::abs(ds.lo), std::abs(ds.hi));
    const double hi = std::max(std::abs(ds.lo), std::abs(ds.hi));
    d = ds.axis == Axis::Horizontal
            ? std::min(d, segment_distance(x, y, lo, 0.0, hi, 0.0))
            : std::min(d, segment_distance(x, y, 0.0, lo, 0.0, hi));
  }
  if (loci.critical_point) {
    d = std::min(d, std::hypot(x, y - loci.critical_point->y_c));
  }
  return d;
}

CompareReport compare(const Partition& part, const ValueGrid& grid,
                      std::span<const ReducedState> samples,
                      double min_clearance_cells) {
  if (!(part.params() == grid.params())) {
    throw Error(ErrorKind::InvalidParameters,
                "compare: partition and grid use different parameters");
  }
  CompareReport rep;
  double sum = 0.0;
  for (const ReducedState& s : samples) {
    CompareSample c;
    c.state = s;
    c.clearance_cells = locus_clearance(s, part) / grid.spacing();
    c.dp = grid.value_at(s);
    try {
      c.analytic = value(s, part);
    } catch (const Error&) {
      c.excluded = true;
    }
    c.abs_error = std::abs(c.analytic - c.dp);
    c.rel_error = c.analytic > 0.0 ? c.abs_error / c.analytic
                                   : (c.abs_error > 0.0 ? 1.0 : 0.0);
    if (c.clearance_cells < min_clearance_cells) c.excluded = true;
    if (c.excluded) {
      ++rep.excluded;
    } else {
      ++rep.used;
      sum += c.rel_error;
      rep.max_rel_error = std::max(rep.max_rel_error, c.rel_error);
      rep.max_abs_error = std::max(rep.max_abs_error, c.abs_error);
    }
    rep.samples.push_back(c);
  }
  rep.mean_rel_error = rep.used ? sum / rep.used : 0.0;
  return rep;
}

std::vector<ReducedState> clear_samples(const Partition& part,
                                        const ValueGrid& grid,
                                        std::size_t count, std::uint64_t seed,
                                        double min_clearance_cells,
                                        std::optional<ArcFamily> family) {
  const GameParams& p = part.params();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r2(p.b() * p.b(), p.r_d() * p.r_d());
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  const double need = min_clearance_cells * grid.spacing();
  std::vector<ReducedState> out;
  out.reserve(count);
  std::size_t tries = 0;
  while (out.size() < count) {
    if (++tries > 1000 * count + 1000) {
      throw Error(ErrorKind::OutOfRange,
                  "clear_samples: too few states clear of the loci");
    }
    const double r = std::sqrt(r2(rng));
    const double a = ang(rng);
    const ReducedState s{r * std::sin(a), r * std::cos(a)};
    if (locus_clearance(s, part) < need) continue;
    if (family && part.locate(s).region.family != *family) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace survgame
