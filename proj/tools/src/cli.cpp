#include "somite/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>

#include "somite/error.hpp"
#include "somite/planar.hpp"
#include "somite/presets.hpp"

namespace somite {

namespace {

namespace fs = std::filesystem;

struct RunArgs {
  std::optional<std::string> model;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> label;
};

struct AnalyzeArgs {
  std::string kind;
  std::optional<std::string> model;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> param, param_b;
  std::optional<double> from, to, b_from, b_to;
  int steps = 100;
  int b_steps = 60;
  std::optional<double> chi_u, chi_v, F, gamma;
  std::optional<std::string> window;
  std::optional<int> resolution, seeds;
  std::vector<std::string> sets;
};

struct SweepArgs {
  std::optional<std::string> model;
  std::optional<std::string> config;
  std::string out;
  std::string param;
  double from = 0.0, to = 0.0;
  int steps = 0;
};

std::vector<double> parse_window(const std::string& text) {
  std::vector<double> v;
  std::string item;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      v.push_back(parse_double(item, "--window"));
      item.clear();
    } else {
      item += text[i];
    }
  }
  if (v.size() != 4) fail(ErrorKind::Validation, "--window needs p_min,p_max,q_min,q_max");
  return v;
}

// Picks the run to execute from a plain config or from a manifest holding run.<label>.* sections.
ConfigDocument select_run(const ConfigDocument& doc, const std::optional<std::string>& label) {
  const auto labels = doc.run_labels();
  if (label) {
    ConfigDocument sec = doc.section(*label);
    if (sec.entries().empty()) fail(ErrorKind::Validation, "config has no run." + *label + ".* entries");
    return sec;
  }
  if (labels.empty()) return doc;
  if (labels.size() == 1) return doc.section(labels.front());
  std::string list;
  for (const auto& l : labels) list += (list.empty() ? "" : ", ") + l;
  fail(ErrorKind::Validation, "config holds several runs (" + list + "); choose one with --run");
}

RunSpec load_spec(const std::optional<std::string>& config, const std::optional<std::string>& model,
                  const std::optional<std::string>& label = {}) {
  ConfigDocument doc;
  if (config) doc = select_run(ConfigDocument::load(*config), label);
  return run_spec_from_config(doc, model);
}

std::string output_dir(const std::optional<std::string>& flag, const RunSpec& spec) {
  if (flag) return *flag;
  if (spec.output_dir) return *spec.output_dir;
  fail(ErrorKind::Validation, "no output directory (use --out or output.dir)");
}

void report_files(std::ostream& out, const std::vector<std::string>& files) {
  for (const auto& f : files) out << f << '\n';
}

int do_run(const RunArgs& a, std::ostream& out) {
  const RunSpec spec = load_spec(a.config, a.model, a.label);
  const std::string dir = output_dir(a.out, spec);
  try {
    report_files(out, execute_run(spec, dir).files);
  } catch (const DivergenceError& e) {
    // Keep what was recorded so the blow-up can be inspected.
    ensure_directory(dir);
    Manifest m{{"manifest.version", toolkit_version()},
               {"manifest.model", model_id(spec.model)},
               {"manifest.status", "diverged"},
               {"manifest.divergence_time", format_double(e.time())},
               {"manifest.message", e.what()}};
    for (auto& kv : run_echo(spec)) m.push_back(kv);
    if (e.partial().rows() > 0) report_files(out, write_run_files(spec, e.partial(), dir));
    write_manifest(m, (fs::path(dir) / "manifest.txt").string());
    throw;
  }
  return 0;
}

void emit_tables(const std::vector<Table>& tables, Manifest manifest, const std::optional<std::string>& dir,
                 std::ostream& out) {
  if (!dir) {
    for (const auto& t : tables) {
      out << "# " << t.name << '\n';
      for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
      }
    }
    return;
  }
  ensure_directory(*dir);
  std::vector<std::string> files;
  for (const auto& t : tables) {
    const std::string path = (fs::path(*dir) / (t.name + ".csv")).string();
    write_table(t, path);
    files.push_back(path);
    manifest.emplace_back("manifest.checksum." + t.name + ".csv", file_checksum(path));
  }
  const std::string mpath = (fs::path(*dir) / "manifest.txt").string();
  write_manifest(manifest, mpath);
  files.push_back(mpath);
  report_files(out, files);
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  ConfigDocument doc;
  if (a.config) doc = select_run(ConfigDocument::load(*a.config), std::nullopt);
  RunSpec spec = run_spec_from_config(doc, a.model);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Validation, "--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    const std::string pre = model_id(spec.model) + ".";
    if (key.rfind(pre, 0) == 0) key = key.substr(pre.size());
    set_parameter(spec.model, key, parse_double(kv.substr(eq + 1), key));
  }
  validate(spec.model);
  const AnalysisSettings settings = analysis_settings_from_config(doc);

  Frozen frozen;
  frozen.chi_u = a.chi_u.value_or(settings.chi_u.value_or(frozen.chi_u));
  frozen.chi_v = a.chi_v.value_or(settings.chi_v.value_or(frozen.chi_v));
  frozen.F = a.F.value_or(settings.F.value_or(frozen.F));
  frozen.gamma = a.gamma.value_or(settings.gamma.value_or(frozen.gamma));
  Window window = default_window(spec.model);
  std::optional<std::vector<double>> wv = settings.window;
  if (a.window) wv = parse_window(*a.window);
  if (wv) window = Window{(*wv)[0], (*wv)[1], (*wv)[2], (*wv)[3]};
  window.validate();
  const int resolution = a.resolution.value_or(settings.resolution);
  const int seeds = a.seeds.value_or(settings.seeds);

  Manifest manifest{{"manifest.command", "analyze"},
                    {"manifest.analysis", a.kind},
                    {"manifest.version", toolkit_version()},
                    {"manifest.model", model_id(spec.model)},
                    {"manifest.frozen.chi_u", format_double(frozen.chi_u)},
                    {"manifest.frozen.chi_v", format_double(frozen.chi_v)},
                    {"manifest.frozen.F", format_double(frozen.F)},
                    {"manifest.frozen.gamma", format_double(frozen.gamma)},
                    {"manifest.window", format_double(window.p_min) + "," + format_double(window.p_max) + "," +
                                            format_double(window.q_min) + "," + format_double(window.q_max)}};
  const std::string prefix = model_id(spec.model) + ".";
  for (const auto& k : parameter_keys(spec.model))
    manifest.emplace_back("manifest.param." + prefix + k, format_double(get_parameter(spec.model, k)));

  auto need = [](const auto& opt, const std::string& flag) {
    if (!opt) fail(ErrorKind::Validation, "analyze needs " + flag);
    return *opt;
  };
  std::vector<Table> tables;
  if (a.kind == "nullclines") {
    tables.push_back(nullcline_table(nullclines(planar_system(spec.model, frozen), window, resolution)));
  } else if (a.kind == "fixed-points") {
    std::vector<std::pair<double, FixedPoint>> fps;
    for (const auto& fp : find_fixed_points(planar_system(spec.model, frozen), window, seeds)) fps.emplace_back(0.0, fp);
    tables.push_back(fixed_point_table("fixed_points", fps));
  } else if (a.kind == "hopf-scan" || a.kind == "sn-scan") {
    const std::string param = need(a.param, "--param");
    const auto scan = scan_one_param(planar_family(spec.model, frozen, param), param, need(a.from, "--from"),
                                     need(a.to, "--to"), a.steps, ScanOptions{window, seeds});
    const auto kind = a.kind == "hopf-scan" ? BifurcationKind::Hopf : BifurcationKind::SaddleNode;
    tables.push_back(scan_points_table(a.kind == "hopf-scan" ? "hopf_points" : "sn_points", scan, kind));
    tables.push_back(scan_branch_table("branches", scan));
    manifest.emplace_back("manifest.scan.param", param);
    manifest.emplace_back("manifest.scan.gaps", std::to_string(scan.gaps.size()));
  } else {
    const std::string pa = need(a.param, "--param"), pb = need(a.param_b, "--param-b");
    const auto trace = cusp_trace(planar_family2(spec.model, frozen, pa, pb), pa, need(a.from, "--from"),
                                  need(a.to, "--to"), a.steps, pb, need(a.b_from, "--b-from"), need(a.b_to, "--b-to"),
                                  a.b_steps, ScanOptions{window, seeds});
    tables = cusp_tables(trace, pa, pb);
    manifest.emplace_back("manifest.cusp.partial", trace.partial ? "true" : "false");
  }
  emit_tables(tables, manifest, a.out, out);
  return 0;
}

int do_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.steps < 1) fail(ErrorKind::Validation, "--steps must be >= 1");
  RunSpec base = load_spec(a.config, a.model);
  std::string param = a.param;
  const std::string prefix = model_id(base.model) + ".";
  if (param.rfind(prefix, 0) == 0) param = param.substr(prefix.size());
  const auto keys = parameter_keys(base.model);
  if (std::find(keys.begin(), keys.end(), param) == keys.end()) {
    fail(ErrorKind::Validation, "--param: " + model_id(base.model) + " has no parameter '" + a.param + "'");
  }
  ensure_directory(a.out);
  Table summary{"sweep", {"index", "value", "diverged"}, {}};
  Manifest manifest{{"manifest.command", "sweep"},
                    {"manifest.version", toolkit_version()},
                    {"manifest.model", model_id(base.model)},
                    {"manifest.sweep.param", prefix + param},
                    {"manifest.sweep.from", format_double(a.from)},
                    {"manifest.sweep.to", format_double(a.to)},
                    {"manifest.sweep.steps", std::to_string(a.steps)}};
  bool diverged_any = false;
  for (int i = 0; i <= a.steps; ++i) {
    const double value = a.from + (a.to - a.from) * i / a.steps;
    RunSpec spec = base;
    set_parameter(spec.model, param, value);
    validate(spec.model);
    const std::string sub = param + "_" + std::to_string(i);
    const std::string dir = (fs::path(a.out) / sub).string();
    bool diverged = false;
    try {
      execute_run(spec, dir);
    } catch (const DivergenceError& e) {
      diverged = diverged_any = true;
      err << "warning: " << sub << " (" << param << "=" << format_double(value) << ") diverged: " << e.what() << '\n';
    }
    summary.rows.push_back({static_cast<double>(i), value, diverged ? 1.0 : 0.0});
    manifest.emplace_back("manifest.sweep." + std::to_string(i) + ".dir", sub);
    manifest.emplace_back("manifest.sweep." + std::to_string(i) + ".value", format_double(value));
  }
  emit_tables({summary}, manifest, a.out, out);
  return diverged_any ? exit_code(ErrorKind::Divergence) : 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"somite: somitogenesis reaction-diffusion toolkit", "somite"};
  app.set_version_flag("--version", toolkit_version());
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "simulate one configured run");
  run->add_option("--model", run_args.model, "cw2 | cw3 | pord | fhn | fhn-proto");
  run->add_option("--config", run_args.config, "key=value config or manifest")->required();
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--run", run_args.label, "run label inside a manifest");

  std::string preset_name, preset_out;
  auto* preset = app.add_subcommand("preset", "run a named figure preset");
  preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
  preset->add_option("--out", preset_out, "output directory")->required();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "planar phase-plane and bifurcation analysis");
  analyze->add_option("kind", an.kind, "nullclines | fixed-points | hopf-scan | sn-scan | cusp")
      ->required()
      ->check(CLI::IsMember({"nullclines", "fixed-points", "hopf-scan", "sn-scan", "cusp"}));
  analyze->add_option("--model", an.model, "model id");
  analyze->add_option("--config", an.config, "config file");
  analyze->add_option("--out", an.out, "output directory (tables go to stdout otherwise)");
  analyze->add_option("--param", an.param, "scanned parameter (cusp: first parameter)");
  analyze->add_option("--from", an.from);
  analyze->add_option("--to", an.to);
  analyze->add_option("--steps", an.steps, "scan intervals");
  analyze->add_option("--param-b", an.param_b, "cusp: second parameter");
  analyze->add_option("--b-from", an.b_from);
  analyze->add_option("--b-to", an.b_to);
  analyze->add_option("--b-steps", an.b_steps);
  analyze->add_option("--chi-u", an.chi_u, "frozen CW switch chi_u");
  analyze->add_option("--chi-v", an.chi_v, "frozen CW switch chi_v");
  analyze->add_option("--F", an.F, "frozen PORD FGF input");
  analyze->add_option("--gamma", an.gamma, "frozen FHN gamma");
  analyze->add_option("--window", an.window, "p_min,p_max,q_min,q_max");
  analyze->add_option("--resolution", an.resolution, "nullcline grid resolution");
  analyze->add_option("--seeds", an.seeds, "Newton seed grid size");
  analyze->add_option("--set", an.sets, "model parameter override key=value (repeatable)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "repeat a run over a parameter range");
  sweep->add_option("--model", sw.model, "model id");
  sweep->add_option("--config", sw.config, "base config");
  sweep->add_option("--out", sw.out, "output directory")->required();
  sweep->add_option("--param", sw.param, "model parameter")->required();
  sweep->add_option("--from", sw.from)->required();
  sweep->add_option("--to", sw.to)->required();
  sweep->add_option("--steps", sw.steps, "intervals; steps+1 runs")->required();

  auto* list = app.add_subcommand("list-presets", "print the preset names");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : exit_code(ErrorKind::Validation);
  }

  try {
    if (run->parsed()) return do_run(run_args, out);
    if (preset->parsed()) {
      report_files(out, run_preset(preset_name, preset_out).files);
      return 0;
    }
    if (analyze->parsed()) return do_analyze(an, out);
    if (sweep->parsed()) return do_sweep(sw, out, err);
    if (list->parsed()) {
      for (const auto& n : preset_names()) out << n << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace somite
