#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "output.hpp"
#include "survgame/error.hpp"
#include "survgame/partition.hpp"
#include "survgame/simulate.hpp"
#include "verify.hpp"

using namespace survgame;
using namespace survgame::cli;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kVerification = 2, kInternal = 3 };

struct RunConfig {
  double v_r = 1.0;
  double v_a = 2.0;
  double b = 1.0;
  double r_d = 7.0;
  std::string out_dir;
};

fs::path output_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("SURVGAME_OUTPUT_DIR"); env && *env) return env;
  return fs::current_path();
}

// The one place where command-line parameters become a GameParams.
GameParams validated_params(const RunConfig& cfg) {
  for (double v : {cfg.v_r, cfg.v_a, cfg.b, cfg.r_d}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidParameters, "parameters must be finite");
    }
  }
  return GameParams(cfg.v_r, cfg.v_a, cfg.b, cfg.r_d);
}

json params_json(const GameParams& p) {
  return {{"v_r_max", jnum(p.v_r_max())},
          {"v_a_max", jnum(p.v_a_max())},
          {"b", jnum(p.b())},
          {"r_d", jnum(p.r_d())},
          {"rho_v", jnum(p.rho_v())},
          {"rho_d", jnum(p.rho_d())}};
}

std::string surface_summary(const Regime& r) {
  std::vector<std::string> parts;
  if (r.has_critical_point) parts.push_back("CP");
  if (r.has_us) parts.push_back("US");
  if (r.has_fs) parts.push_back("FS");
  if (r.has_vertical_ds) parts.push_back("DS(x=0)");
  if (r.has_horizontal_ds) parts.push_back("DS(y=0)");
  std::string s;
  for (const std::string& p : parts) s += (s.empty() ? "" : "+") + p;
  return s.empty() ? "none" : s;
}

json regime_json(const Regime& r) {
  return {{"label", std::string(to_string(r.label))},
          {"critical_point", r.has_critical_point},
          {"universal_surface", r.has_us},
          {"focal_surface", r.has_fs},
          {"fs_source", std::string(to_string(r.fs_source))},
          {"vertical_ds", r.has_vertical_ds},
          {"horizontal_ds", r.has_horizontal_ds}};
}

// ---- classify -------------------------------------------------------------

struct ClassifyOptions {
  bool json_out = false;
  bool sweep = false;
  std::vector<double> rho_v_range{1.05, 4.0};
  std::vector<double> rho_d_range{0.05, 0.95};
  int cells = 24;
};

int cmd_classify(const RunConfig& cfg, const ClassifyOptions& o) {
  if (!o.sweep) {
    const GameParams p = validated_params(cfg);
    const Regime r = classify_regime(p);
    if (o.json_out) {
      std::cout << json{{"parameters", params_json(p)}, {"regime", regime_json(r)}}
                       .dump(2)
                << '\n';
      return kOk;
    }
    if (r.label == RegimeLabel::SlowerEvader) {
      std::cout << "A  slower evader: outside the scope of this solver\n";
      return kOk;
    }
    std::cout << to_string(r.label) << ", " << surface_summary(r) << '\n'
              << "rho_v " << num(p.rho_v()) << "  rho_d " << num(p.rho_d())
              << "  rho_v*rho_d " << num(p.rho_v() * p.rho_d()) << '\n';
    if (r.has_fs) std::cout << "FS fed by " << to_string(r.fs_source) << " tributaries\n";
    return kOk;
  }

  // Rasterize a (rho_v, rho_d) rectangle at unit pursuer speed and body size.
  const double v0 = o.rho_v_range[0], v1 = o.rho_v_range[1];
  const double d0 = o.rho_d_range[0], d1 = o.rho_d_range[1];
  if (!(v1 > v0) || !(d1 > d0) || d0 <= 0.0 || d1 >= 1.0 || o.cells < 2) {
    throw Error(ErrorKind::InvalidParameters, "bad sweep rectangle");
  }
  const fs::path dir = output_dir(cfg);
  std::ofstream csv = open_output(dir / "regime_map.csv");
  csv << "rho_v,rho_d,label,critical_point,us,fs,fs_source,vertical_ds,"
         "horizontal_ds\n";
  Svg svg(0.5 * std::max(v1 - v0, d1 - d0), 0.5 * (v0 + v1), 0.5 * (d0 + d1));
  const std::map<std::string, std::string> fill{
      {"A", "#dddddd"}, {"B", "#9ecae1"}, {"C", "#fdae6b"}, {"boundary", "#000000"}};
  const double dv = (v1 - v0) / o.cells;
  const double dd = (d1 - d0) / o.cells;
  for (int j = 0; j < o.cells; ++j) {
    for (int i = 0; i < o.cells; ++i) {
      const double rv = v0 + (i + 0.5) * dv;
      const double rd = d0 + (j + 0.5) * dd;
      std::string label = "boundary";
      csv << num(rv) << ',' << num(rd) << ',';
      try {
        const Regime r = classify_regime(GameParams(1.0, rv, 1.0, 1.0 / rd));
        label = std::string(to_string(r.label));
        csv << label << ',' << r.has_critical_point << ',' << r.has_us << ','
            << r.has_fs << ',' << to_string(r.fs_source) << ','
            << r.has_vertical_ds << ',' << r.has_horizontal_ds << '\n';
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Boundary) throw;
        csv << "boundary,,,,,,\n";
      }
      svg.rect(v0 + i * dv, d0 + j * dd, dv, dd,
               "fill:" + fill.at(label) + ";stroke:none");
    }
  }
  svg.save(dir / "regime_map.svg");
  std::cout << "wrote " << (dir / "regime_map.csv").string() << " ("
            << o.cells * o.cells << " cells)\n";
  return kOk;
}

// ---- partition ------------------------------------------------------------

struct PartitionOptions {
  std::string quadrant;
  PartitionResolution res;
  int svg_stride = 4;
};

std::optional<Quadrant> parse_quadrant(const std::string& s) {
  for (Quadrant q : kAllQuadrants) {
    if (s == to_string(q)) return q;
  }
  return std::nullopt;
}

const char* family_color(ArcFamily f) {
  switch (f) {
    case ArcFamily::Primary: return "#4c72b0";
    case ArcFamily::TsTributary: return "#dd8452";
    case ArcFamily::Universal: return "#55a868";
    case ArcFamily::UsTributary: return "#8172b3";
    case ArcFamily::Focal: return "#c44e52";
    case ArcFamily::FsTributary: return "#937860";
  }
  return "#000000";
}

json loci_json(const SingularLoci& l, const std::vector<Quadrant>& quads) {
  json out;
  json ts = json::array();
  for (Quadrant q : quads) {
    for (const ReducedState& s : l.ts_curve) {
      const ReducedState m = mirror(s, q);
      ts.push_back({jnum(m.x), jnum(m.y)});
    }
  }
  out["transition_surface"] = ts;
  if (l.critical_point) {
    out["critical_point"] = {{"y_c", jnum(l.critical_point->y_c)},
                             {"tau_c", jnum(l.critical_point->tau_c)},
                             {"s_c", jnum(l.critical_point->s_c)}};
  }
  if (l.us_segment) {
    out["universal_surface"] = {{"y_lo", jnum(l.us_segment->lo)},
                                {"y_hi", jnum(l.us_segment->hi)}};
  }
  if (l.us_ds_split) out["us_ds_split"] = jnum(*l.us_ds_split);
  json fsj = json::array();
  for (const AxisInterval& a : l.fs_segments) {
    fsj.push_back({{"x_lo", jnum(a.lo)}, {"x_hi", jnum(a.hi)}});
  }
  out["focal_surface"] = fsj;
  if (l.focal_point) {
    out["focal_point"] = {
        {"x_f", jnum(l.focal_point->x_f)},
        {"tau_f", jnum(l.focal_point->tau_f)},
        {"source_family", std::string(to_string(l.focal_point->source_family))},
        {"source_param", jnum(l.focal_point->source_param)}};
  }
  json ds = json::array();
  for (const DsSegment& d : l.ds_segments) {
    ds.push_back({{"axis", d.axis == Axis::Vertical ? "x=0" : "y=0"},
                  {"lo", jnum(d.lo)},
                  {"hi", jnum(d.hi)},
                  {"branches", {std::string(to_string(d.branch_a)),
                                std::string(to_string(d.branch_b))}},
                  {"cost_gap", jnum(d.cost_gap)},
                  {"pairs", d.pairs}});
  }
  out["dispersal_surfaces"] = ds;
  return out;
}

void draw_loci(Svg& svg, const GameParams& p, const SingularLoci& l,
               const std::vector<Quadrant>& quads) {
  for (Quadrant q : quads) {
    std::vector<std::pair<double, double>> pts;
    for (const ReducedState& s : l.ts_curve) {
      const ReducedState m = mirror(s, q);
      pts.emplace_back(m.x, m.y);
    }
    svg.polyline(pts, "stroke:#000;stroke-width:2;stroke-dasharray:6,3");
  }
  if (l.us_segment) {
    for (double sgn : {1.0, -1.0}) {
      svg.line(0, sgn * l.us_segment->lo, 0, sgn * l.us_segment->hi,
               "stroke:#1a7f1a;stroke-width:4");
    }
  }
  for (const AxisInterval& a : l.fs_segments) {
    svg.line(a.lo, 0, a.hi, 0, "stroke:#b00020;stroke-width:4");
  }
  for (const DsSegment& d : l.ds_segments) {
    const bool vert = d.axis == Axis::Vertical;
    svg.line(vert ? 0 : d.lo, vert ? d.lo : 0, vert ? 0 : d.hi, vert ? d.hi : 0,
             "stroke:#e377c2;stroke-width:3;stroke-dasharray:2,2");
  }
  if (l.critical_point) {
    for (double sgn : {1.0, -1.0}) {
      svg.circle(0, sgn * l.critical_point->y_c, 0.012 * p.r_d(), "fill:#000");
    }
  }
  svg.circle(0, 0, p.b(), "fill:#bbbbbb;stroke:#333;stroke-width:1.5");
  svg.circle(0, 0, p.r_d(), "fill:none;stroke:#000;stroke-width:2");
}

int cmd_partition(const RunConfig& cfg, const PartitionOptions& o) {
  const GameParams p = validated_params(cfg);
  std::vector<Quadrant> quads(std::begin(kAllQuadrants), std::end(kAllQuadrants));
  if (!o.quadrant.empty()) {
    const auto q = parse_quadrant(o.quadrant);
    if (!q) throw Error(ErrorKind::InvalidParameters, "quadrant must be I, II, III or IV");
    quads = {*q};
  }
  const Partition part = build_partition(p, o.res);
  const fs::path dir = output_dir(cfg);

  std::ofstream csv = open_output(dir / "partition_arcs.csv");
  csv << "arc,family,quadrant,param,tau,x,y,lambda_x,lambda_y,u1,u2,v1,v2\n";
  json arcs = json::array();
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < part.arcs().size(); ++i) {
    const TrajectoryArc& a = part.arcs()[i];
    if (std::find(quads.begin(), quads.end(), a.quadrant) == quads.end()) continue;
    const std::string fam(to_string(a.family));
    const std::string quad(to_string(a.quadrant));
    const std::string param = a.family_param ? num(*a.family_param) : "";
    ++counts[fam];
    arcs.push_back({{"arc", i},
                    {"family", fam},
                    {"quadrant", quad},
                    {"param", a.family_param ? jnum(*a.family_param) : json(nullptr)},
                    {"tau_begin", jnum(a.tau_begin)},
                    {"tau_end", jnum(a.tau_end)},
                    {"stop", std::string(to_string(a.stop))},
                    {"samples", a.samples.size()}});
    for (const ArcPoint& pt : a.samples) {
      csv << i << ',' << fam << ',' << quad << ',' << param << ',' << num(pt.tau)
          << ',' << num(pt.state.x) << ',' << num(pt.state.y) << ','
          << num(pt.costate.lambda_x) << ',' << num(pt.costate.lambda_y) << ','
          << num(pt.pursuer.u1) << ',' << num(pt.pursuer.u2) << ','
          << num(pt.evader.v1) << ',' << num(pt.evader.v2) << '\n';
    }
  }

  json quad_names = json::array();
  for (Quadrant q : quads) quad_names.push_back(std::string(to_string(q)));
  json doc{{"parameters", params_json(p)},
           {"regime", regime_json(part.regime())},
           {"quadrants", quad_names},
           {"resolution",
            {{"primary_arcs", part.resolution().primary_arcs},
             {"ts_arcs", part.resolution().ts_arcs},
             {"us_arcs", part.resolution().us_arcs},
             {"fs_arcs", part.resolution().fs_arcs}}},
           {"coverage",
            {{"fraction", jnum(part.coverage().fraction)},
             {"probes", part.coverage().probes}}},
           {"arc_counts", counts},
           {"loci", loci_json(part.loci(), quads)},
           {"arcs", arcs}};
  write_json(dir / "partition.json", doc);

  Svg svg(p.r_d());
  std::map<ArcFamily, int> seen;
  for (const TrajectoryArc& a : part.arcs()) {
    if (std::find(quads.begin(), quads.end(), a.quadrant) == quads.end()) continue;
    const bool singular = a.family == ArcFamily::Universal || a.family == ArcFamily::Focal;
    if (!singular && seen[a.family]++ % o.svg_stride != 0) continue;
    std::vector<std::pair<double, double>> pts;
    const std::size_t step = std::max<std::size_t>(1, a.samples.size() / 80);
    for (std::size_t k = 0; k < a.samples.size(); k += step) {
      pts.emplace_back(a.samples[k].state.x, a.samples[k].state.y);
    }
    pts.emplace_back(a.samples.back().state.x, a.samples.back().state.y);
    svg.polyline(pts, std::string("stroke:") + family_color(a.family) +
                          ";stroke-width:0.7;stroke-opacity:0.8");
  }
  draw_loci(svg, p, part.loci(), quads);
  double ly = p.r_d();
  for (ArcFamily f : kAllFamilies) {
    if (!part.model().family_present(f)) continue;
    svg.line(-p.r_d(), ly, -0.9 * p.r_d(), ly,
             std::string("stroke:") + family_color(f) + ";stroke-width:3");
    svg.text(-0.88 * p.r_d(), ly - 0.01 * p.r_d(), std::string(to_string(f)), 12);
    ly -= 0.05 * p.r_d();
  }
  svg.save(dir / "partition.svg");

  std::cout << "regime " << to_string(part.regime().label) << ", "
            << surface_summary(part.regime()) << "; " << arcs.size()
            << " arcs written to " << dir.string() << '\n';
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string scenario;
  double offset = 0.01;
  std::vector<double> reduced;
  std::vector<double> realistic;
  double dt = 0.0;
  std::vector<double> snapshots;
  std::string prefix;
};

void draw_simulation(const fs::path& file, const SimulationRun& run,
                     const std::vector<Snapshot>& snaps) {
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  std::vector<std::pair<double, double>> robot, evader;
  for (const TraceRow& r : run.trace) {
    robot.emplace_back(r.realistic.x_r, r.realistic.y_r);
    evader.emplace_back(r.realistic.x_a, r.realistic.y_a);
    for (const auto& [x, y] : {robot.back(), evader.back()}) {
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  }
  const double rd = run.params.r_d();
  Svg svg(0.5 * std::max(hi_x - lo_x, hi_y - lo_y) + rd, 0.5 * (lo_x + hi_x),
          0.5 * (lo_y + hi_y));
  for (const Snapshot& s : snaps) {
    svg.circle(s.pose.x_r, s.pose.y_r, s.detection_radius,
               "fill:none;stroke:#999;stroke-dasharray:4,3");
    svg.circle(s.pose.x_r, s.pose.y_r, s.body_radius, "fill:#ccc;stroke:#333");
    svg.line(s.pose.x_r, s.pose.y_r,
             s.pose.x_r + s.body_radius * std::cos(s.pose.theta_r),
             s.pose.y_r + s.body_radius * std::sin(s.pose.theta_r),
             "stroke:#000;stroke-width:2");
    svg.circle(s.pose.x_a, s.pose.y_a, 0.015 * rd, "fill:#c44e52");
    svg.text(s.pose.x_a, s.pose.y_a, "t=" + num(std::round(s.t * 100) / 100), 11);
  }
  const std::size_t step = std::max<std::size_t>(1, robot.size() / 2000);
  std::vector<std::pair<double, double>> rs, es;
  for (std::size_t i = 0; i < robot.size(); i += step) {
    rs.push_back(robot[i]);
    es.push_back(evader[i]);
  }
  rs.push_back(robot.back());
  es.push_back(evader.back());
  svg.polyline(rs, "stroke:#4c72b0;stroke-width:2");
  svg.polyline(es, "stroke:#c44e52;stroke-width:2");
  svg.save(file);
}

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& o) {
  const GameParams p = validated_params(cfg);
  const int sources = !o.scenario.empty() + !o.reduced.empty() + !o.realistic.empty();
  if (sources != 1) {
    throw Error(ErrorKind::InvalidParameters,
                "give exactly one of --scenario, --reduced, --realistic");
  }
  RealisticState init;
  std::string name = "simulation";
  if (!o.scenario.empty()) {
    const auto sc = parse_scenario(o.scenario);
    if (!sc) throw Error(ErrorKind::InvalidParameters, "unknown scenario " + o.scenario);
    init = scenario_initial_state(*sc, p, o.offset);
    name = o.scenario;
  } else if (!o.reduced.empty()) {
    init = {0.0, 0.0, 0.5 * kPi, o.reduced[0], o.reduced[1]};
  } else {
    init = {o.realistic[0], o.realistic[1], o.realistic[2], o.realistic[3],
            o.realistic[4]};
  }
  for (double v : {init.x_r, init.y_r, init.theta_r, init.x_a, init.y_a}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "initial state must be finite");
  }
  if (!o.prefix.empty()) name = o.prefix;
  const double dt = o.dt > 0.0 ? o.dt : p.default_dt();

  const Partition part = build_partition(p);
  const SimulationRun run = simulate_game(init, part, dt);

  std::vector<double> times = o.snapshots;
  if (times.empty()) {
    for (int i = 0; i <= 4; ++i) times.push_back(run.escape_time * i / 4.0);
  }
  const std::vector<Snapshot> snaps = export_snapshots(run, times);

  const fs::path dir = output_dir(cfg);
  std::ofstream trace = open_output(dir / (name + "_trace.csv"));
  trace << "t,x_r,y_r,theta_r,x_a,y_a,x,y,u1,u2,v1,v2,region\n";
  for (const TraceRow& r : run.trace) {
    trace << num(r.t) << ',' << num(r.realistic.x_r) << ',' << num(r.realistic.y_r)
          << ',' << num(r.realistic.theta_r) << ',' << num(r.realistic.x_a) << ','
          << num(r.realistic.y_a) << ',' << num(r.reduced.x) << ','
          << num(r.reduced.y) << ',' << num(r.pursuer.u1) << ','
          << num(r.pursuer.u2) << ',' << num(r.evader.v1) << ','
          << num(r.evader.v2) << ',' << r.region.label() << '\n';
  }
  std::ofstream events = open_output(dir / (name + "_events.csv"));
  events << "t,kind,detail\n";
  for (const SimEvent& e : run.events) {
    events << num(e.t) << ',' << to_string(e.kind) << ',' << e.detail << '\n';
  }
  json sj = json::array();
  for (const Snapshot& s : snaps) {
    sj.push_back({{"t", jnum(s.t)},
                  {"robot", {jnum(s.pose.x_r), jnum(s.pose.y_r), jnum(s.pose.theta_r)}},
                  {"evader", {jnum(s.pose.x_a), jnum(s.pose.y_a)}},
                  {"detection_radius", jnum(s.detection_radius)},
                  {"body_radius", jnum(s.body_radius)}});
  }
  json phases = phase_sequence(run);
  write_json(dir / (name + "_snapshots.json"),
             {{"parameters", params_json(p)},
              {"dt", jnum(dt)},
              {"escape_time", jnum(run.escape_time)},
              {"phases", phases},
              {"snapshots", sj}});
  draw_simulation(dir / (name + "_realistic.svg"), run, snaps);

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", run.escape_time);
  std::cout << "escape time " << buf << " s\nphases";
  for (const std::string& s : phase_sequence(run)) std::cout << ' ' << s;
  std::cout << '\n';
  return kOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, std::vector<std::string> suites,
               const VerifyOptions& vo) {
  const GameParams p = validated_params(cfg);
  if (suites.empty()) suites = kSuiteNames;
  const Partition part = build_partition(p);
  json report{{"parameters", params_json(p)}, {"suites", json::object()}};
  bool ok = true;
  for (const std::string& s : suites) {
    const SuiteResult r = run_suite(s, p, part, vo);
    ok = ok && r.status != "fail";
    report["suites"][s] = {{"status", r.status}, {"metrics", r.metrics}};
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
    std::cout << s << ' ' << r.status << " (" << secs << ")\n";
    if (s == "oracle") {
      for (const char* region : {"primary", "all_regions"}) {
        const json& m = r.metrics[region];
        std::printf("  %-12s used %4d excluded %4d max_rel %.4f mean_rel %.4f max_abs %.4f\n",
                    region, m["used"].get<int>(), m["excluded"].get<int>(),
                    m["max_relative_error"].get<double>(),
                    m["mean_relative_error"].get<double>(),
                    m["max_absolute_error"].get<double>());
      }
    } else {
      for (const auto& [k, v] : r.metrics.items()) std::cout << "  " << k << ' ' << v.dump() << '\n';
    }
  }
  report["status"] = ok ? "pass" : "fail";
  write_json(output_dir(cfg) / "verify_report.json", report);
  return ok ? kOk : kVerification;
}

void add_params(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--vr", cfg.v_r, "Pursuer wheel speed limit V_r [m/s]")->capture_default_str();
  cmd->add_option("--va", cfg.v_a, "Evader speed limit V_a [m/s]")->capture_default_str();
  cmd->add_option("--b", cfg.b, "Half wheel base / body radius [m]")->capture_default_str();
  cmd->add_option("--rd", cfg.r_d, "Detection radius [m]")->capture_default_str();
  cmd->add_option("--out", cfg.out_dir,
                  "Output directory (default $SURVGAME_OUTPUT_DIR or cwd)");
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidParameters:
    case ErrorKind::Boundary:
    case ErrorKind::NonFinite:
    case ErrorKind::AlreadyEscaped:
    case ErrorKind::InsideBody:
    case ErrorKind::OutOfRange:
    case ErrorKind::UnsupportedRegime:
    case ErrorKind::ControlOutOfBounds:
      return kValidation;
    default:
      return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surveillance game between a differential drive robot and a "
               "faster omnidirectional evader"};
  app.require_subcommand(1);
  RunConfig cfg;

  ClassifyOptions co;
  CLI::App* classify = app.add_subcommand("classify", "Report the regime and singular surfaces");
  add_params(classify, cfg);
  classify->add_flag("--json", co.json_out, "Print a JSON report");
  classify->add_flag("--sweep", co.sweep, "Rasterize a (rho_v, rho_d) rectangle");
  classify->add_option("--rho-v-range", co.rho_v_range, "Sweep range of rho_v")
      ->expected(2)->capture_default_str();
  classify->add_option("--rho-d-range", co.rho_d_range, "Sweep range of rho_d")
      ->expected(2)->capture_default_str();
  classify->add_option("--cells", co.cells, "Sweep cells per axis")->capture_default_str();

  PartitionOptions po;
  CLI::App* partition = app.add_subcommand("partition", "Build and export the partition");
  add_params(partition, cfg);
  partition->add_option("--quadrant", po.quadrant, "Restrict output to one quadrant");
  partition->add_option("--primary-arcs", po.res.primary_arcs)->capture_default_str();
  partition->add_option("--ts-arcs", po.res.ts_arcs)->capture_default_str();
  partition->add_option("--us-arcs", po.res.us_arcs)->capture_default_str();
  partition->add_option("--fs-arcs", po.res.fs_arcs)->capture_default_str();
  partition->add_option("--svg-stride", po.svg_stride, "Draw every n-th arc per family")
      ->check(CLI::PositiveNumber)->capture_default_str();

  SimulateOptions so;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate optimal play");
  add_params(simulate, cfg);
  simulate->add_option("--scenario", so.scenario, "us-escape or fs-escape");
  simulate->add_option("--offset", so.offset, "Scenario start offset [m]")->capture_default_str();
  simulate->add_option("--reduced", so.reduced, "Evader start X Y in the robot frame")
      ->expected(2);
  simulate->add_option("--realistic", so.realistic, "Start XR YR THETA XA YA")->expected(5);
  simulate->add_option("--dt", so.dt, "Integration step [s] (default 1e-3 b/V_r)");
  simulate->add_option("--snapshots", so.snapshots, "Snapshot times [s]")->delimiter(',');
  simulate->add_option("--prefix", so.prefix, "Output file prefix");

  std::vector<std::string> suites;
  VerifyOptions vo;
  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  add_params(verify, cfg);
  verify->add_option("--suite", suites, "hamiltonian, continuity, symmetry, fan, oracle")
      ->check(CLI::IsMember(kSuiteNames));
  verify->add_option("--n", vo.dp_n, "DP grid nodes per axis")->capture_default_str();
  verify->add_option("--k", vo.dp_k, "DP evader headings")->capture_default_str();
  verify->add_option("--dp-dt", vo.dp_dt, "DP time step [s]")->capture_default_str();
  verify->add_option("--samples", vo.oracle_samples, "Oracle comparison states")
      ->capture_default_str();
  verify->add_option("--seed", vo.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*classify) return cmd_classify(cfg, co);
    if (*partition) return cmd_partition(cfg, po);
    if (*simulate) return cmd_simulate(cfg, so);
    return cmd_verify(cfg, suites, vo);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
