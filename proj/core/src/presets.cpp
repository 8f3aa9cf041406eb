#include "somite/presets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "somite/error.hpp"
#include "somite/planar.hpp"

#ifndef SOMITE_VERSION_STRING
#define SOMITE_VERSION_STRING "0.0.0"
#endif

namespace somite {

std::string toolkit_version() { return SOMITE_VERSION_STRING; }

namespace {

double class_code(FixedPointClass c) { return static_cast<double>(static_cast<int>(c)); }

double kind_code(BifurcationKind k) { return k == BifurcationKind::Hopf ? 0.0 : 1.0; }

}  // namespace

Table nullcline_table(const Nullclines& n) {
  Table t{"nullclines", {"curve", "segment", "p", "q"}, {}};
  auto add = [&](const std::vector<Polyline>& lines, double curve) {
    for (std::size_t s = 0; s < lines.size(); ++s)
      for (const auto& pt : lines[s]) t.rows.push_back({curve, static_cast<double>(s), pt[0], pt[1]});
  };
  add(n.p_nullcline, 0.0);
  add(n.q_nullcline, 1.0);
  return t;
}

Table fixed_point_table(const std::string& name, const std::vector<std::pair<double, FixedPoint>>& fps) {
  Table t{name, {"param", "p", "q", "class", "re1", "im1", "re2", "im2"}, {}};
  for (const auto& [param, fp] : fps) {
    t.rows.push_back({param, fp.p, fp.q, class_code(fp.cls), fp.eigenvalues[0].real(), fp.eigenvalues[0].imag(),
                      fp.eigenvalues[1].real(), fp.eigenvalues[1].imag()});
  }
  return t;
}

Table scan_points_table(const std::string& name, const ScanResult& scan, std::optional<BifurcationKind> only) {
  Table t{name, {"value", "kind", "p", "q", "residual"}, {}};
  for (const auto& bp : scan.points)
    if (!only || bp.kind == *only) t.rows.push_back({bp.value, kind_code(bp.kind), bp.p, bp.q, bp.residual});
  return t;
}

Table scan_branch_table(const std::string& name, const ScanResult& scan) {
  Table t{name, {"branch", "param", "p", "q", "class"}, {}};
  for (std::size_t b = 0; b < scan.branches.size(); ++b)
    for (const auto& s : scan.branches[b])
      t.rows.push_back({static_cast<double>(b), s.param, s.point.p, s.point.q, class_code(s.point.cls)});
  return t;
}

std::vector<Table> cusp_tables(const CuspTrace& cusp, const std::string& name_a, const std::string& name_b) {
  Table br{"cusp_branches", {"branch", name_a, name_b}, {}};
  for (const auto& p : cusp.lower) br.rows.push_back({0.0, p[0], p[1]});
  for (const auto& p : cusp.upper) br.rows.push_back({1.0, p[0], p[1]});
  Table cp{"cusp_point", {name_a, name_b, "separation"}, {}};
  if (cusp.cusp) cp.rows.push_back({cusp.cusp->a, cusp.cusp->b, cusp.cusp->separation});
  return {br, cp};
}

namespace {

Table trajectory_table(const PlanarSystem& sys, Vec2 x, double t_end, double dt, std::size_t stride) {
  Table t{"trajectory", {"t", sys.p_name, sys.q_name}, {}};
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  t.rows.push_back({0.0, x[0], x[1]});
  for (std::size_t n = 1; n <= steps; ++n) {
    const Vec2 k1 = sys(x[0], x[1]);
    const Vec2 k2 = sys(x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]);
    const Vec2 k3 = sys(x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]);
    const Vec2 k4 = sys(x[0] + dt * k3[0], x[1] + dt * k3[1]);
    x = {x[0] + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]), x[1] + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    if (n % stride == 0) t.rows.push_back({static_cast<double>(n) * dt, x[0], x[1]});
  }
  return t;
}

Table probe_table(const std::string& name, const std::vector<std::pair<double, ProbeResult>>& probes) {
  Table t{name, {"param", "oscillatory", "period", "amplitude", "p_min", "p_max"}, {}};
  for (const auto& [param, r] : probes) {
    t.rows.push_back({param, r.oscillatory() ? 1.0 : 0.0, r.cycle ? r.cycle->period : 0.0,
                      r.cycle ? r.cycle->amplitude : 0.0, r.p_range[0], r.p_range[1]});
  }
  return t;
}

std::vector<Table> fig12_analysis() {
  const auto s = fig12_setup();
  const ModelSpec spec = s.params;
  Frozen frozen;
  frozen.F = s.F_inside;
  const PlanarSystem sys = planar_system(spec, frozen);
  std::vector<Table> tables;
  tables.push_back(nullcline_table(nullclines(sys, s.window, 160)));
  std::vector<std::pair<double, FixedPoint>> fps;
  for (double F : {s.F_inside, s.F_above}) {
    frozen.F = F;
    for (const auto& fp : find_fixed_points(planar_system(spec, frozen), s.window, 12)) fps.emplace_back(F, fp);
  }
  tables.push_back(fixed_point_table("fixed_points", fps));
  const auto scan = scan_one_param(planar_family(spec, Frozen{}, "F"), "F", s.F_from, s.F_to, s.F_steps,
                                   ScanOptions{s.window, 10});
  tables.push_back(scan_points_table("F_scan", scan));
  tables.push_back(scan_branch_table("F_branches", scan));
  std::vector<std::pair<double, ProbeResult>> probes;
  for (double F : {s.F_inside, s.F_above}) {
    frozen.F = F;
    probes.emplace_back(F, limit_cycle_probe(planar_system(spec, frozen), {0.1, 0.1}, 2000.0));
  }
  tables.push_back(probe_table("probes", probes));
  return tables;
}

std::vector<Table> fig14_analysis() {
  const ModelSpec spec = fhn_proto_params();
  const PlanarSystem sys = planar_system(spec, Frozen{});
  const Window w = default_window(spec);
  std::vector<Table> tables;
  tables.push_back(nullcline_table(nullclines(sys, w, 160)));
  std::vector<std::pair<double, FixedPoint>> fps;
  for (const auto& fp : find_fixed_points(sys, w, 12)) fps.emplace_back(0.0, fp);
  tables.push_back(fixed_point_table("fixed_points", fps));
  tables.push_back(trajectory_table(sys, {0.0, 0.0}, 200.0, 0.01, 10));
  return tables;
}

std::vector<Table> fig15_analysis() {
  const auto s = fig15_setup();
  const ModelSpec spec = s.params;
  const ScanOptions opts{s.window, 10};
  std::vector<Table> tables;
  const auto g = scan_one_param(planar_family(spec, Frozen{}, "gamma"), "gamma", s.gamma_from, s.gamma_to,
                                s.gamma_steps, opts);
  tables.push_back(scan_points_table("gamma_scan", g));
  tables.push_back(scan_branch_table("gamma_branches", g));
  Frozen at;
  at.gamma = s.alpha_at_gamma;
  const auto a = scan_one_param(planar_family(spec, at, "alpha"), "alpha", s.alpha_from, s.alpha_to, s.alpha_steps,
                                opts);
  tables.push_back(scan_points_table("alpha_scan", a));
  tables.push_back(scan_branch_table("alpha_branches", a));
  const auto cusp = cusp_trace(planar_family2(spec, Frozen{}, "gamma", "alpha"), "gamma", s.cusp_gamma_from,
                               s.cusp_gamma_to, s.cusp_gamma_steps, "alpha", s.cusp_alpha_from, s.cusp_alpha_to,
                               s.cusp_alpha_steps, opts);
  for (auto& t : cusp_tables(cusp, "gamma", "alpha")) tables.push_back(std::move(t));
  return tables;
}

SpaceTimeRaster select_species(const SpaceTimeRaster& r, const std::vector<std::string>& names) {
  if (names.empty()) return r;
  SpaceTimeRaster out;
  out.times = r.times;
  out.xs = r.xs;
  for (const auto& n : names) {
    out.species.push_back(n);
    out.data.push_back(r[n]);
  }
  return out;
}

std::pair<double, double> image_range(const RunSpec& spec, const Matrix& m) {
  double lo = spec.pgm_min.value_or(0.0), hi = spec.pgm_max.value_or(1.0);
  if (!spec.pgm_min || !spec.pgm_max) {
    const auto [mn, mx] = std::minmax_element(m.values.begin(), m.values.end());
    if (!spec.pgm_min) lo = *mn;
    if (!spec.pgm_max) hi = *mx;
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  return {lo, hi};
}

}  // namespace

std::vector<std::string> write_run_files(const RunSpec& spec, const SpaceTimeRaster& raster, const std::string& dir) {
  const SpaceTimeRaster out = select_species(raster, spec.export_species);
  const std::filesystem::path base = std::filesystem::path(dir) / spec.label;
  std::vector<std::string> files = write_csv(out, base.string() + ".csv");
  for (std::size_t k = 0; k < out.species.size(); ++k) {
    const std::string stem = out.species.size() == 1 ? base.string() : base.string() + "_" + out.species[k];
    const auto [lo, hi] = image_range(spec, out.data[k]);
    write_pgm(out.data[k], stem + ".pgm", lo, hi);
    files.push_back(stem + ".pgm");
  }
  return files;
}

namespace {

void add_checksums(Manifest& manifest, const std::vector<std::string>& files) {
  for (const auto& f : files) {
    manifest.emplace_back("manifest.checksum." + std::filesystem::path(f).filename().string(), file_checksum(f));
  }
}

RunSpec fhn_base_run(const std::string& label) {
  RunSpec r;
  r.label = label;
  r.model = FHNParams{};
  r.grid = Grid1D(101, 0.01, 0.0);
  r.sim.dt = 0.01;
  r.sim.t_end = 500.0;
  r.sim.record_stride = 100;
  r.sim.boundary = BoundaryMode::ZeroPadded;
  r.sim.scheme = Scheme::Euler;
  r.export_species = {"u"};
  r.pgm_min = -0.5;
  r.pgm_max = 1.5;
  return r;
}

// "D1e-3" for powers of ten, otherwise the shortest decimal.
std::string d_label(double D) {
  const double e = std::round(std::log10(D));
  if (D > 0.0 && std::abs(D - std::pow(10.0, e)) <= 1e-12 * D) return "D1e" + std::to_string(static_cast<int>(e));
  return "D" + format_double(D);
}

// Lowest-u stable equilibrium of the FHN kinetics at a given gamma.
Vec2 fhn_rest(const FHNParams& p, double gamma) {
  Frozen f;
  f.gamma = gamma;
  const auto fps = find_fixed_points(planar_system(ModelSpec{p}, f), default_window(ModelSpec{p}), 12);
  for (const auto& fp : fps)
    if (is_stable(fp.cls)) return {fp.p, fp.q};
  return fps.empty() ? Vec2{0.0, 0.0} : Vec2{fps.front().p, fps.front().q};
}

}  // namespace

PORDParams pord_derived_params() {
  PORDParams p;
  p.k1 = 2.0;
  p.k2 = 1.0;
  p.k3 = 1.0;
  p.mu = 0.2;
  p.beta = 0.0;
  p.D = 0.05;
  p.F = FProfile{0.5, 0.0, 0.0};
  return p;
}

FHNProtoParams fhn_proto_params() { return FHNProtoParams{0.5, 0.8, 0.7, 12.5}; }

PordPhaseSetup fig12_setup() {
  PordPhaseSetup s;
  s.params = pord_derived_params();
  s.params.D = 0.0;
  s.window = Window{0.0, 6.0, 0.0, 6.0};
  s.F_from = 2.0;
  s.F_to = 0.02;
  s.F_steps = 99;
  s.F_inside = 0.5;
  s.F_above = 1.5;
  return s;
}

FhnBifurcationSetup fig15_setup() {
  FhnBifurcationSetup s;
  s.params = FHNParams{};
  s.params.D = 0.0;
  s.window = Window{-0.5, 1.5, -0.5, 1.5};
  s.gamma_from = 0.05;
  s.gamma_to = 0.5;
  s.gamma_steps = 90;
  s.alpha_at_gamma = 0.15;
  s.alpha_from = 0.1;
  s.alpha_to = 0.9;
  s.alpha_steps = 80;
  s.cusp_gamma_from = 0.1;
  s.cusp_gamma_to = 0.32;
  s.cusp_gamma_steps = 22;
  s.cusp_alpha_from = 0.2;
  s.cusp_alpha_to = 0.6;
  s.cusp_alpha_steps = 80;
  return s;
}

RunSpec fig8_run() {
  RunSpec r;
  r.label = "fig8";
  CW2Params p;
  p.mu = 0.1;
  p.gamma = 0.2;
  p.kappa = 10.0;
  p.k = 10.0;
  p.c = 5e-3;
  p.epsilon = 1e-3;
  p.D = 100.0;
  r.model = p;
  r.grid = Grid1D::spanning(-5.0, 15.0, 0.2);
  r.sim.dt = 0.5;
  r.sim.t_end = 300.0;
  r.sim.record_stride = 1;
  r.sim.scheme = Scheme::Euler;
  r.sim.boundary = BoundaryMode::ZeroFlux;
  r.init.kind = InitKind::Appendix;
  return r;
}

RunSpec fig9_run(const CW3Pulse& pulse) {
  RunSpec r;
  r.label = "fig9";
  CW3Params p;
  p.pulse = pulse;
  r.model = p;
  r.grid = Grid1D::spanning(-5.0, 15.0, 0.05);
  r.sim.dt = 0.05;
  r.sim.t_end = 25.0;
  r.sim.record_stride = 1;
  r.sim.scheme = Scheme::Euler;
  r.sim.boundary = BoundaryMode::ZeroFlux;
  r.init.kind = InitKind::Appendix;
  return r;
}

RunSpec fig18_run(double D, std::uint64_t seed) {
  RunSpec r = fhn_base_run(d_label(D));
  FHNParams p;
  p.D = D;
  r.model = p;
  r.sim.seed = seed;
  r.init.kind = InitKind::UniformRandom;
  r.init.lo = 0.0;
  r.init.hi = 0.2;
  return r;
}

RunSpec fig17_run(char which) {
  RunSpec r = fhn_base_run(std::string("case_") + which);
  r.sim.t_end = 1000.0;
  FHNParams p;
  switch (which) {
    case 'a':
      // Time-invariant published gradient.
      p.D = 1e-4;
      p.gamma = GammaProfile{0.21, -0.2, 0.0, 0.0, 0.0, 0.0};
      break;
    case 'b':
      // Gradient translating with the growing tail; the oscillatory end shrinks over time.
      p.D = 3e-5;
      p.gamma = GammaProfile{0.3, -0.2, -0.002, 0.0, 0.01, 0.0};
      break;
    case 'c':
      // Fixed gradient whose level drops at the same rate, but only behind a sweep at speed 0.01.
      p.D = 3e-5;
      p.gamma = GammaProfile{0.3, -0.2, 0.0, 4e-4, 0.01, 0.01};
      break;
    default:
      fail(ErrorKind::Validation, std::string("fig17 case must be a, b or c, got ") + which);
  }
  r.model = p;
  const Vec2 rest = fhn_rest(p, p.gamma(0.0, 0.0));
  r.init.kind = InitKind::Constant;
  r.init.values = {rest[0], rest[1]};
  r.init.pulse_cells = 5;
  r.init.pulse_value = 1.0;
  return r;
}

RunSpec pord_spatial_run() {
  RunSpec r;
  r.label = "pord_stripes";
  PORDParams p = pord_derived_params();
  p.F = FProfile{0.0, 0.4, 0.05};
  r.model = p;
  r.grid = Grid1D::spanning(0.0, 10.0, 0.05);
  r.sim.dt = 0.01;
  r.sim.t_end = 200.0;
  r.sim.record_stride = 50;
  r.sim.scheme = Scheme::Euler;
  r.sim.boundary = BoundaryMode::ZeroFlux;
  r.init.kind = InitKind::Constant;
  r.init.values = {0.0, 0.0};
  return r;
}

std::vector<std::string> preset_names() {
  return {"fig8_collier",          "fig9_baker",       "fig12_pord_phase",  "fig14_fhn_proto",
          "fig15_fhn_bifurcations", "fig17_fhn_waves", "fig18_wave_failure"};
}

Preset get_preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "fig8_collier") {
    p.description = "two-species clock and wavefront, 0 <= t <= 300";
    p.runs = {fig8_run()};
    p.expected = {{"u_plateau_min_duration", "20"}, {"u_plateau_level", "0.5"}};
  } else if (name == "fig9_baker") {
    p.description = "three-species clock and wavefront with regressing FGF8 front";
    p.runs = {fig9_run()};
    p.expected = {{"w_front_speed", "0.5"}, {"v_pulses_min", "3"}, {"u_stripes_min", "3"},
                  {"stripe_width_uniformity", "0.15"}};
  } else if (name == "fig12_pord_phase") {
    p.description = "PORD phase portrait, F scan and a spatial stripe run (derived parameters)";
    p.runs = {pord_spatial_run()};
    p.expected = {{"F_scan", "hopf-bounded oscillation window"}, {"parameters", "derived"}};
    p.analysis = fig12_analysis;
  } else if (name == "fig14_fhn_proto") {
    p.description = "prototype FitzHugh-Nagumo phase plane and trajectory";
    p.expected = {{"trajectory_max_v_above", "1"}};
    p.analysis = fig14_analysis;
  } else if (name == "fig15_fhn_bifurcations") {
    p.description = "FHN kinetics: gamma Hopf scan, alpha saddle-node scan, (gamma, alpha) cusp";
    p.expected = {{"gamma_scan", "hopf"}, {"alpha_scan", "saddle-node"}, {"cusp", "two branches"}};
    p.analysis = fig15_analysis;
  } else if (name == "fig17_fhn_waves") {
    p.description = "FHN lattice wave propagation for three gamma distributions";
    p.runs = {fig17_run('a'), fig17_run('b'), fig17_run('c')};
    p.expected = {{"case_a_bands", "1"}, {"case_b", "static periodic bands"}, {"case_c_vs_b", "thicker bands"}};
  } else if (name == "fig18_wave_failure") {
    p.description = "FHN lattice wave propagation failure as D decreases";
    p.runs = {fig18_run(1e-3, 1), fig18_run(1e-4, 1), fig18_run(1e-5, 1)};
    p.expected = {{"D1e-3", "activity reaches final 10%"}, {"D1e-4", "stationary band"},
                  {"D1e-5", "no activity beyond first 20%"}};
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    fail(ErrorKind::Validation, "unknown preset '" + name + "'; available: " + list);
  }
  return p;
}

Manifest run_echo(const RunSpec& spec) {
  Manifest m;
  const ConfigDocument doc = to_config(spec);
  for (const auto& [k, v] : doc.entries()) m.emplace_back("run." + spec.label + "." + k, v);
  const auto guard = stability_guard(spec.model, spec.grid, spec.sim);
  m.emplace_back("manifest." + spec.label + ".substeps", std::to_string(substep_count(spec.model, spec.grid, spec.sim)));
  m.emplace_back("manifest." + spec.label + ".stability", guard.ok ? "ok" : "warning: " + guard.message);
  return m;
}

RunResult execute_run(const RunSpec& spec, const std::string& out_dir) {
  RunResult result;
  const ModelState init = make_initial(spec.model, spec.grid, spec.init, spec.sim.seed);
  result.raster = run(spec.model, spec.grid, init, spec.sim);
  result.manifest = {{"manifest.version", toolkit_version()}, {"manifest.model", model_id(spec.model)}};
  for (auto& e : run_echo(spec)) result.manifest.push_back(e);
  if (!out_dir.empty()) {
    ensure_directory(out_dir);
    result.files = write_run_files(spec, result.raster, out_dir);
    add_checksums(result.manifest, result.files);
    const std::string path = (std::filesystem::path(out_dir) / "manifest.txt").string();
    write_manifest(result.manifest, path);
    result.files.push_back(path);
  }
  return result;
}

PresetResult run_preset(const std::string& name, const std::string& out_dir) {
  const Preset preset = get_preset(name);
  PresetResult result;
  result.name = name;
  result.manifest = {{"manifest.preset", name},
                     {"manifest.version", toolkit_version()},
                     {"manifest.description", preset.description},
                     {"manifest.stripe_threshold", format_double(preset.stripe_threshold)}};
  for (const auto& [k, v] : preset.expected) result.manifest.emplace_back("manifest.expected." + k, v);
  for (const auto& spec : preset.runs) {
    const ModelState init = make_initial(spec.model, spec.grid, spec.init, spec.sim.seed);
    result.rasters.push_back({spec.label, run(spec.model, spec.grid, init, spec.sim)});
    for (auto& e : run_echo(spec)) result.manifest.push_back(e);
  }
  if (preset.analysis) result.tables = preset.analysis();
  if (!out_dir.empty()) {
    ensure_directory(out_dir);
    for (std::size_t i = 0; i < preset.runs.size(); ++i) {
      for (auto& f : write_run_files(preset.runs[i], result.rasters[i].raster, out_dir)) result.files.push_back(f);
    }
    for (const auto& t : result.tables) {
      const std::string path = (std::filesystem::path(out_dir) / (t.name + ".csv")).string();
      write_table(t, path);
      result.files.push_back(path);
    }
    add_checksums(result.manifest, result.files);
    const std::string path = (std::filesystem::path(out_dir) / "manifest.txt").string();
    write_manifest(result.manifest, path);
    result.files.push_back(path);
  }
  return result;
}

StripeReport fig9_somites(const SpaceTimeRaster& raster, const SegmentOptions& options) {
  return segment_somites(raster["u"], raster.times, raster.xs, options);
}

FrontTrack fig9_front(const SpaceTimeRaster& raster, const CW3Params& params) {
  const double margin = std::sqrt(params.Dw / params.eta);
  return track_front(raster["w"], raster.times, raster.xs, 0.5 / params.eta, raster.xs.front() + margin,
                     raster.xs.back() - margin);
}

PulseExperiment pulse_perturbation_experiment(const CW3Pulse& pulse, const SegmentOptions& options) {
  if (!(pulse.o >= 0.0)) fail(ErrorKind::Validation, "pulse amplitude o must be >= 0");
  PulseExperiment e;
  CW3Pulse off = pulse;
  off.o = 0.0;
  e.baseline = fig9_somites(execute_run(fig9_run(off)).raster, options);
  e.perturbed = fig9_somites(execute_run(fig9_run(pulse)).raster, options);
  e.mean_width_delta = e.perturbed.mean_width() - e.baseline.mean_width();
  return e;
}

}  // namespace somite
