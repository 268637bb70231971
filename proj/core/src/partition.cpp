#include "survgame/partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "survgame/error.hpp"

namespace survgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> param_grid(const ParamRange& r, int n,
                               std::optional<double> pinned) {
  std::vector<double> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(pinned ? *pinned : 0.5 * (r.lo + r.hi));
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out.push_back(r.lo + (r.hi - r.lo) * static_cast<double>(i) / (n - 1));
  }
  if (pinned) {
    auto it = std::min_element(out.begin(), out.end(), [&](double a, double b) {
      return std::abs(a - *pinned) < std::abs(b - *pinned);
    });
    *it = *pinned;
  }
  return out;
}

std::size_t family_slot(ArcFamily f) {
  switch (f) {
    case ArcFamily::Primary: return 0;
    case ArcFamily::TsTributary: return 1;
    case ArcFamily::UsTributary: return 2;
    case ArcFamily::FsTributary: return 3;
    default: return 4;
  }
}

Quadrant flip_y(Quadrant q) {
  switch (q) {
    case Quadrant::I: return Quadrant::II;
    case Quadrant::II: return Quadrant::I;
    case Quadrant::III: return Quadrant::IV;
    case Quadrant::IV: return Quadrant::III;
  }
  return q;
}

Quadrant flip_x(Quadrant q) {
  switch (q) {
    case Quadrant::I: return Quadrant::IV;
    case Quadrant::IV: return Quadrant::I;
    case Quadrant::II: return Quadrant::III;
    case Quadrant::III: return Quadrant::II;
  }
  return q;
}

double dist2(const ReducedState& a, const ReducedState& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

std::string_view to_string(RegimeLabel l) {
  switch (l) {
    case RegimeLabel::SlowerEvader: return "A";
    case RegimeLabel::NoCriticalPoint: return "B";
    case RegimeLabel::CriticalPoint: return "C";
  }
  return "?";
}

std::string_view to_string(FsSource s) {
  switch (s) {
    case FsSource::None: return "NONE";
    case FsSource::Ts: return "TS";
    case FsSource::Us: return "US";
  }
  return "?";
}

std::string_view to_string(SurfaceTag t) {
  switch (t) {
    case SurfaceTag::None: return "";
    case SurfaceTag::Transition: return "TS";
    case SurfaceTag::Universal: return "US";
    case SurfaceTag::Focal: return "FS";
    case SurfaceTag::Dispersal: return "DS";
    case SurfaceTag::Critical: return "CP";
  }
  return "?";
}

std::string RegionId::label() const {
  std::string out(to_string(family));
  out += '/';
  out += to_string(quadrant);
  if (surface != SurfaceTag::None) {
    out += '@';
    out += to_string(surface);
  }
  return out;
}

Regime classify_regime(const GameParams& p) {
  Regime reg;
  if (p.rho_v() == 1.0) {
    throw Error(ErrorKind::Boundary, "rho_v == 1: equal speeds are degenerate");
  }
  if (p.rho_v() < 1.0) {
    reg.label = RegimeLabel::SlowerEvader;
    return reg;
  }
  if (p.rho_v() * p.rho_d() == 1.0) {
    throw Error(ErrorKind::Boundary,
                "rho_v*rho_d == 1: critical point on the body is degenerate");
  }
  const SurfaceModel m(p);
  reg.label = m.critical() ? RegimeLabel::CriticalPoint
                           : RegimeLabel::NoCriticalPoint;
  reg.has_critical_point = m.critical().has_value();
  reg.has_us = m.has_us();
  if (m.focal()) {
    reg.has_fs = true;
    reg.fs_source = m.focal()->source_family == ArcFamily::UsTributary
                        ? FsSource::Us
                        : FsSource::Ts;
  }
  // A crossing only counts when the tributary has non-trivial length.
  const double min_len = 1e-9 * p.r_d() / p.v_a_max();
  for (ArcFamily f : {ArcFamily::TsTributary, ArcFamily::UsTributary}) {
    if (!m.family_present(f)) continue;
    const std::vector<double> grid = param_grid(m.param_range(f), 201, {});
    for (double q : grid) {
      const ArcStopInfo st = m.stop(f, q);
      if (st.local_tau <= min_len) continue;
      if (st.kind == ArcStop::VerticalAxis) reg.has_vertical_ds = true;
      if (st.kind == ArcStop::HorizontalAxis) reg.has_horizontal_ds = true;
    }
  }
  return reg;
}

Partition::Partition(const GameParams& p) : model_(p) {}

Partition build_partition(const GameParams& p, const PartitionResolution& res) {
  if (p.rho_v() <= 1.0) {
    throw Error(ErrorKind::UnsupportedRegime,
                "build_partition: regime A (slower evader) is not synthesized");
  }
  Partition part(p);
  part.resolution_ = res;
  if (part.resolution_.sample_spacing <= 0.0) {
    part.resolution_.sample_spacing = p.r_d() / 400.0;
  }
  if (part.resolution_.bucket_size <= 0.0) {
    part.resolution_.bucket_size = p.r_d() / 200.0;
  }
  part.regime_ = classify_regime(p);
  const SurfaceModel& m = part.model_;
  const double spacing = part.resolution_.sample_spacing;

  struct Job {
    ArcFamily family;
    double param;
  };
  std::vector<Job> jobs;
  auto pinned = [&](ArcFamily f) -> std::optional<double> {
    if (m.focal() && m.focal()->source_family == f) {
      return m.focal()->source_param;
    }
    if (f == ArcFamily::Primary && m.critical()) return m.critical()->s_c;
    return std::nullopt;
  };
  auto add_family = [&](ArcFamily f, int n) {
    if (!m.family_present(f)) return;
    for (double q : param_grid(m.param_range(f), n, pinned(f))) {
      jobs.push_back({f, q});
    }
  };
  add_family(ArcFamily::Primary, res.primary_arcs);
  add_family(ArcFamily::TsTributary, res.ts_arcs);
  if (m.has_us()) jobs.push_back({ArcFamily::Universal, 0.0});
  add_family(ArcFamily::UsTributary, res.us_arcs);
  if (m.focal()) jobs.push_back({ArcFamily::Focal, 0.0});
  add_family(ArcFamily::FsTributary, res.fs_arcs);

  std::vector<TrajectoryArc> canonical(jobs.size());
  detail::parallel_for(jobs.size(), [&](std::size_t i) {
    canonical[i] = m.build_arc(jobs[i].family, jobs[i].param, spacing);
  });
  // The singular segments are single arcs; sample them densely enough for
  // per-family residual checks.
  for (TrajectoryArc& a : canonical) {
    if (a.family == ArcFamily::Universal || a.family == ArcFamily::Focal) {
      const double len = a.tau_end - a.tau_begin;
      a = m.build_arc(a.family, 0.0,
                      std::min(spacing, len * p.v_a_max() / 1200.0));
    }
  }
  part.canonical_ = canonical.size();
  part.arcs_ = canonical;
  for (Quadrant q : {Quadrant::II, Quadrant::III, Quadrant::IV}) {
    for (const TrajectoryArc& a : canonical) part.arcs_.push_back(mirror(a, q));
  }

  for (const TrajectoryArc& a : canonical) {
    if (!a.family_param) continue;
    const std::size_t slot = family_slot(a.family);
    part.stops_[slot].push_back(
        {*a.family_param, a.tau_end - a.tau_begin, a.stop});
  }
  for (auto& table : part.stops_) {
    std::sort(table.begin(), table.end(),
              [](const auto& l, const auto& r) { return l.param < r.param; });
  }

  SingularLoci& loci = part.loci_;
  loci.ts_curve = m.ts_curve(static_cast<std::size_t>(std::max(2, res.ts_arcs)));
  loci.critical_point = m.critical();
  loci.focal_point = m.focal();
  loci.us_ds_split = m.us_split();
  if (m.has_us()) loci.us_segment = AxisInterval{m.us_y_end(), m.critical()->y_c};
  if (m.focal()) {
    loci.fs_segments.push_back({p.b(), m.focal()->x_f});
    loci.fs_segments.push_back({-m.focal()->x_f, -p.b()});
  }
  auto quadrant_arcs = [&](Quadrant q) {
    std::vector<TrajectoryArc> out;
    for (const TrajectoryArc& a : part.arcs_) {
      if (a.quadrant == q) out.push_back(a);
    }
    return out;
  };
  const auto arcs_i = quadrant_arcs(Quadrant::I);
  const auto arcs_ii = quadrant_arcs(Quadrant::II);
  const auto arcs_iii = quadrant_arcs(Quadrant::III);
  const auto arcs_iv = quadrant_arcs(Quadrant::IV);
  for (auto ds : {find_ds(arcs_i, arcs_ii, Axis::Horizontal),
                  find_ds(arcs_iv, arcs_iii, Axis::Horizontal),
                  find_ds(arcs_i, arcs_iv, Axis::Vertical),
                  find_ds(arcs_ii, arcs_iii, Axis::Vertical)}) {
    if (!ds) continue;
    // Crossings next to the tangent tributary move like sqrt(ds) along the
    // axis, so the sampled end stops short; the DS meets the FS at x_f.
    if (ds->axis == Axis::Horizontal && loci.focal_point) {
      const double xf = loci.focal_point->x_f;
      if (ds->lo > 0.0) ds->lo = std::min(ds->lo, xf);
      if (ds->hi < 0.0) ds->hi = std::max(ds->hi, -xf);
    }
    loci.ds_segments.push_back(*ds);
  }

  part.build_index();

  // Coverage: probe-grid cell centres inside the annulus. The construction is
  // mirror symmetric, so only the quadrant-I probes are resolved.
  const int n = std::max(2, res.coverage_grid);
  const double cell = 2.0 * p.r_d() / n;
  std::vector<ReducedState> probes;
  for (int i = n / 2; i < n; ++i) {
    for (int j = n / 2; j < n; ++j) {
      const ReducedState s{-p.r_d() + (i + 0.5) * cell,
                           -p.r_d() + (j + 0.5) * cell};
      const double r = s.radius();
      if (r > p.b() && r < p.r_d()) probes.push_back(s);
    }
  }
  std::vector<char> hit(probes.size(), 0);
  detail::parallel_for(probes.size(), [&](std::size_t i) {
    const auto inv = part.invert(probes[i]);
    hit[i] = inv && inv->exact ? 1 : 0;
  });
  CoverageReport& cov = part.coverage_;
  cov.probes = probes.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (hit[i]) {
      ++cov.covered;
    } else if (cov.uncovered.size() < 1000) {
      cov.uncovered.push_back(probes[i]);
    }
  }
  cov.fraction = cov.probes == 0 ? 1.0
                                 : static_cast<double>(cov.covered) /
                                       static_cast<double>(cov.probes);
  if (res.require_coverage && cov.fraction < 0.99) {
    std::ostringstream os;
    os << "partition covers only " << cov.fraction * 100.0
       << "% of the annulus; uncovered cells:";
    for (std::size_t i = 0; i < std::min<std::size_t>(cov.uncovered.size(), 20);
         ++i) {
      os << " (" << cov.uncovered[i].x << ", " << cov.uncovered[i].y << ")";
    }
    if (cov.uncovered.size() > 20) os << " ...";
    throw Error(ErrorKind::Coverage, os.str());
  }
  return part;
}

void Partition::build_index() {
  bucket_ = resolution_.bucket_size;
  buckets_per_side_ =
      static_cast<int>(std::ceil(params().r_d() / bucket_)) + 1;
  index_.assign(static_cast<std::size_t>(buckets_per_side_) *
                    static_cast<std::size_t>(buckets_per_side_),
                {});
  for (std::size_t a = 0; a < canonical_; ++a) {
    const TrajectoryArc& arc = arcs_[a];
    if (!arc.family_param) continue;
    for (std::size_t k = 0; k < arc.samples.size(); ++k) {
      const ReducedState& s = arc.samples[k].state;
      const int i = std::clamp(static_cast<int>(s.x / bucket_), 0,
                               buckets_per_side_ - 1);
      const int j = std::clamp(static_cast<int>(s.y / bucket_), 0,
                               buckets_per_side_ - 1);
      index_[static_cast<std::size_t>(i) * buckets_per_side_ + j].push_back(
          {a, k});
    }
  }
}

std::vector<Partition::Hit> Partition::nearby(const ReducedState& c,
                                              std::size_t want) const {
  std::vector<Hit> hits;
  const int ci =
      std::clamp(static_cast<int>(c.x / bucket_), 0, buckets_per_side_ - 1);
  const int cj =
      std::clamp(static_cast<int>(c.y / bucket_), 0, buckets_per_side_ - 1);
  double kth = kInf;
  for (int ring = 0; ring < buckets_per_side_; ++ring) {
    if (hits.size() >= want) {
      const double reach = (ring - 1) * bucket_;
      if (reach * reach > kth) break;
    }
    for (int i = ci - ring; i <= ci + ring; ++i) {
      if (i < 0 || i >= buckets_per_side_) continue;
      for (int j = cj - ring; j <= cj + ring; ++j) {
        if (j < 0 || j >= buckets_per_side_) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        for (const auto& [a, k] :
             index_[static_cast<std::size_t>(i) * buckets_per_side_ + j]) {
          hits.push_back({a, k, dist2(arcs_[a].samples[k].state, c)});
        }
      }
    }
    if (hits.size() >= want) {
      std::nth_element(hits.begin(), hits.begin() + (want - 1), hits.end(),
                       [](const Hit& l, const Hit& r) { return l.d2 < r.d2; });
      kth = hits[want - 1].d2;
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const Hit& l, const Hit& r) { return l.d2 < r.d2; });
  return hits;
}

std::optional<Partition::Inversion> Partition::invert(
    const ReducedState& c) const {
  const std::vector<Hit> hits = nearby(c, 32);
  if (hits.empty()) return std::nullopt;

  // Up to two distinct nearby arcs per family seed the Newton solves.
  std::array<int, 5> per_family{};
  std::vector<const Hit*> seeds;
  std::vector<std::size_t> seen;
  for (const Hit& h : hits) {
    if (std::find(seen.begin(), seen.end(), h.arc) != seen.end()) continue;
    seen.push_back(h.arc);
    const std::size_t slot = family_slot(arcs_[h.arc].family);
    if (per_family[slot] >= 2) continue;
    ++per_family[slot];
    seeds.push_back(&h);
  }

  const double r_d = params().r_d();
  const double tol = 1e-10 * r_d;
  std::optional<Inversion> best;
  double best_tau = kInf;
  for (const Hit* seed : seeds) {
    const TrajectoryArc& arc = arcs_[seed->arc];
    const ArcFamily f = arc.family;
    const ParamRange range = model_.param_range(f);
    const double width = range.hi - range.lo;
    if (!(width > 0.0)) continue;
    double q = *arc.family_param;
    double t = arc.samples[seed->sample].tau - arc.tau_begin;
    const double t_cap = 2.0 * (arc.tau_end - arc.tau_begin) + bucket_;
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
      const ArcPoint a = model_.evaluate(f, q, t);
      const double fx = a.state.x - c.x;
      const double fy = a.state.y - c.y;
      if (std::hypot(fx, fy) < tol) {
        converged = true;
        break;
      }
      const ReducedRate rt = model_.retro_rate(f, q, t);
      const double dq = 1e-7 * width;
      const double q_lo = std::max(range.lo, q - dq);
      const double q_hi = std::min(range.hi, q + dq);
      const ReducedState sp = model_.evaluate(f, q_hi, t).state;
      const ReducedState sm = model_.evaluate(f, q_lo, t).state;
      const double jqx = (sp.x - sm.x) / (q_hi - q_lo);
      const double jqy = (sp.y - sm.y) / (q_hi - q_lo);
      const double det = jqx * rt.dy - jqy * rt.dx;
      if (!(std::abs(det) > 1e-300)) break;
      double step_q = -(fx * rt.dy - fy * rt.dx) / det;
      double step_t = -(jqx * fy - jqy * fx) / det;
      // Damp large moves so the iterate stays near the seed arc.
      const double lim_q = 0.05 * width;
      const double scale = std::max(1.0, std::abs(step_q) / lim_q);
      step_q /= scale;
      step_t /= scale;
      q = std::clamp(q + step_q, range.lo, range.hi);
      t = std::clamp(t + step_t, 0.0, t_cap);
    }
    if (!converged) continue;
    // Domain check against the family's stopping time at q.
    const auto& table = stops_[family_slot(f)];
    bool inside = false;
    auto hi_it = std::lower_bound(
        table.begin(), table.end(), q,
        [](const StopEntry& e, double v) { return e.param < v; });
    const StopEntry* above = hi_it == table.end() ? nullptr : &*hi_it;
    const StopEntry* below = hi_it == table.begin() ? nullptr : &*(hi_it - 1);
    bool decided = false;
    if (above && below && above->kind == below->kind &&
        above->param > below->param) {
      const double w = (q - below->param) / (above->param - below->param);
      const double est = below->local_tau + w * (above->local_tau - below->local_tau);
      const double margin =
          0.02 * std::max(above->local_tau, below->local_tau) + 1e-9;
      if (t < est - margin) {
        inside = true;
        decided = true;
      } else if (t > est + margin) {
        decided = true;
      }
    }
    if (!decided) {
      inside = t <= model_.stop(f, q).local_tau + 1e-9;
    }
    if (!inside) continue;
    const double tau = model_.tau_begin(f, q) + t;
    if (tau < best_tau) {
      best_tau = tau;
      best = Inversion{f, q, t, seed->arc, true};
    }
  }
  if (best) return best;
  const Hit& h = hits.front();
  const TrajectoryArc& arc = arcs_[h.arc];
  return Inversion{arc.family, *arc.family_param,
                   arc.samples[h.sample].tau - arc.tau_begin, h.arc, false};
}

StrategyResult Partition::locate(const ReducedState& s) const {
  return resolve(s, surface_tolerance());
}

StrategyResult Partition::locate(const ReducedState& s,
                                 double surface_tol) const {
  return resolve(s, surface_tol);
}

StrategyResult Partition::resolve(const ReducedState& s, double tol) const {
  const GameParams& p = params();
  if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
    throw Error(ErrorKind::NonFinite, "locate: non-finite state");
  }
  const double r = s.radius();
  const double eps = 1e-12 * p.r_d();
  if (r > p.r_d() + eps) {
    throw Error(ErrorKind::AlreadyEscaped, "locate: state beyond r_d");
  }
  if (r < p.b() - eps) {
    throw Error(ErrorKind::InsideBody, "locate: state inside the DDR body");
  }
  const Quadrant q = quadrant_of(s);
  const ReducedState c{std::abs(s.x), std::abs(s.y)};
  const double vr = p.v_r_max();
  const double va = p.v_a_max();

  StrategyResult out;
  out.region.quadrant = q;
  auto finish = [&](ArcFamily f, double param, double local_tau,
                    std::size_t arc_index) {
    const ArcPoint a = model_.evaluate(f, param, local_tau);
    out.region.family = f;
    out.arc = {f, param, local_tau, arc_index};
    out.pursuer = mirror(a.pursuer, q);
    out.evader = mirror(a.evader, q);
    out.time_to_escape = std::max(0.0, a.tau);
  };
  auto nearest_arc = [&](ArcFamily f) {
    for (std::size_t i = 0; i < canonical_; ++i) {
      if (arcs_[i].family == f) return i;
    }
    return std::size_t{0};
  };

  // Terminal circle.
  if (r >= p.r_d() - eps) {
    const double phi = std::atan2(c.x, c.y);
    finish(ArcFamily::Primary, std::clamp(phi, 0.0, 0.5 * kPi), 0.0,
           nearest_arc(ArcFamily::Primary));
    out.time_to_escape = 0.0;
    return out;
  }

  const auto& cp = model_.critical();
  if (cp && std::hypot(c.x, c.y - cp->y_c) <= tol) {
    finish(ArcFamily::Primary, 0.0, cp->tau_c, nearest_arc(ArcFamily::Primary));
    out.region.surface = SurfaceTag::Critical;
    out.multiple = true;
    out.fan = mirrors_y(q) ? AxisInterval{kPi - cp->s_c, kPi}
                           : AxisInterval{0.0, cp->s_c};
    out.time_to_escape = cp->tau_c;
    return out;
  }

  if (model_.has_us() && c.x <= tol && c.y >= model_.us_y_end() &&
      c.y <= cp->y_c) {
    const double t2 = (cp->y_c - c.y) / (va - vr);
    finish(ArcFamily::Universal, 0.0, t2, nearest_arc(ArcFamily::Universal));
    out.region.surface = SurfaceTag::Universal;
    return out;
  }

  const auto& fp = model_.focal();
  if (fp && c.y <= tol && c.x >= p.b() && c.x <= fp->x_f) {
    const double k = p.rho_v() * p.b();
    const double t4 =
        p.b() / vr * (std::asin(fp->x_f / k) - std::asin(c.x / k));
    finish(ArcFamily::Focal, 0.0, t4, nearest_arc(ArcFamily::Focal));
    out.region.surface = SurfaceTag::Focal;
    return out;
  }

  const auto inv = invert(c);
  if (!inv) {
    throw Error(ErrorKind::NonConvergence, "locate: no arc near the state");
  }
  finish(inv->family, inv->param, inv->local_tau, inv->arc_index);
  out.exact = inv->exact;

  // Dispersal surfaces: a state on an axis served by a crossing arc.
  auto on_ds = [&](Axis axis, double along) {
    for (const DsSegment& d : loci_.ds_segments) {
      if (d.axis == axis && along >= d.lo - tol && along <= d.hi + tol &&
          d.branch_a == Quadrant::I) {
        return true;
      }
    }
    return false;
  };
  const bool h_ds = c.y <= tol && on_ds(Axis::Horizontal, c.x);
  const bool v_ds = c.x <= tol && on_ds(Axis::Vertical, c.y);
  if (h_ds || v_ds) {
    out.region.surface = SurfaceTag::Dispersal;
    out.multiple = true;
    const ArcPoint a = model_.evaluate(inv->family, inv->param, inv->local_tau);
    // The two branches are the canonical arc and its mirror across the axis.
    const Quadrant base = q;
    const Quadrant other = h_ds ? flip_y(base) : flip_x(base);
    for (Quadrant bq : {base, other}) {
      Branch br;
      br.region = {inv->family, bq, SurfaceTag::Dispersal};
      br.pursuer = mirror(a.pursuer, bq);
      br.evader = mirror(a.evader, bq);
      br.time_to_escape = a.tau;
      out.branches.push_back(br);
    }
    return out;
  }

  // Transition surface: primary arcs at their switch, TS tributaries at
  // departure.
  const ReducedRate rt = model_.retro_rate(inv->family, inv->param,
                                           inv->local_tau);
  const double speed = std::hypot(rt.dx, rt.dy);
  if (inv->family == ArcFamily::Primary) {
    const ArcStopInfo st = model_.stop(ArcFamily::Primary, inv->param);
    if (st.kind == ArcStop::Switch &&
        (st.local_tau - inv->local_tau) * speed <= tol) {
      out.region.surface = SurfaceTag::Transition;
    }
  } else if (inv->family == ArcFamily::TsTributary &&
             inv->local_tau * speed <= tol) {
    out.region.surface = SurfaceTag::Transition;
  }
  return out;
}

StrategyResult locate(const ReducedState& s, const Partition& part) {
  return part.locate(s);
}

double value(const ReducedState& s, const Partition& part) {
  return part.locate(s).time_to_escape;
}

}  // namespace survgame
