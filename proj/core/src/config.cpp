#include "somite/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "somite/error.hpp"

namespace somite {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(ErrorKind::Validation, key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(ErrorKind::Validation, key + ": expected true or false, got '" + text + "'");
}

// Display names used when a mandatory parameter is missing.
std::string pretty(const std::string& model, const std::string& key) {
  if (model == "pord") {
    if (key == "k1") return "pord.k1 (κ₁)";
    if (key == "k2") return "pord.k2 (κ₂)";
    if (key == "k3") return "pord.k3 (κ₃)";
    if (key == "mu") return "pord.mu (μ)";
    if (key == "beta") return "pord.beta (β)";
    if (key == "D") return "pord.D (repressor diffusivity)";
  }
  if (model == "fhn-proto" && key == "tau") return "fhn-proto.tau (τ)";
  return model + "." + key;
}

const std::set<std::string>& analysis_keys() {
  static const std::set<std::string> keys{"analysis.chi_u", "analysis.chi_v", "analysis.F", "analysis.gamma",
                                          "analysis.window", "analysis.resolution", "analysis.seeds"};
  return keys;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::Validation, "cannot format number");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* b = t.data();
  if (!t.empty() && t[0] == '+') ++b;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    fail(ErrorKind::Validation, key + ": expected a number, got '" + text + "'");
  }
  return v;
}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Validation, "config line " + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Validation, "config line " + std::to_string(lineno) + ": empty key");
    if (doc.has(key)) fail(ErrorKind::Validation, "config line " + std::to_string(lineno) + ": duplicate key " + key);
    doc.entries_.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

bool ConfigDocument::has(const std::string& key) const { return get(key).has_value(); }

std::optional<std::string> ConfigDocument::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

std::vector<std::string> ConfigDocument::run_labels() const {
  std::vector<std::string> labels;
  for (const auto& [k, v] : entries_) {
    if (!starts_with(k, "run.")) continue;
    const auto dot = k.find('.', 4);
    if (dot == std::string::npos) continue;
    const std::string label = k.substr(4, dot - 4);
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  return labels;
}

ConfigDocument ConfigDocument::section(const std::string& label) const {
  ConfigDocument out;
  const std::string prefix = "run." + label + ".";
  for (const auto& [k, v] : entries_)
    if (starts_with(k, prefix)) out.entries_.emplace_back(k.substr(prefix.size()), v);
  return out;
}

std::string ConfigDocument::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

RunSpec run_spec_from_config(const ConfigDocument& doc, const std::optional<std::string>& model_override) {
  RunSpec spec;
  std::optional<std::string> id = model_override;
  if (const auto m = doc.get("model")) {
    if (id && *id != *m) fail(ErrorKind::Validation, "model: --model " + *id + " conflicts with config model=" + *m);
    id = *m;
  }
  if (!id) fail(ErrorKind::Validation, "model: no model selected (use --model or a model= key)");
  spec.model = model_from_id(*id);
  const std::string prefix = *id + ".";
  const auto keys = parameter_keys(spec.model);

  std::set<std::string> seen;
  std::optional<std::size_t> n_cells;
  std::optional<double> dx, x0;
  for (const auto& [key, value] : doc.entries()) {
    if (key == "model" || starts_with(key, "manifest.")) continue;
    if (starts_with(key, "analysis.")) {
      if (!analysis_keys().count(key)) fail(ErrorKind::Validation, "unknown config key " + key);
      continue;
    }
    if (starts_with(key, prefix)) {
      const std::string name = key.substr(prefix.size());
      if (std::find(keys.begin(), keys.end(), name) == keys.end()) {
        fail(ErrorKind::Validation, "unknown config key " + key);
      }
      set_parameter(spec.model, name, parse_double(value, key));
      seen.insert(name);
    } else if (key == "label") {
      spec.label = value;
    } else if (key == "grid.n_cells") {
      n_cells = static_cast<std::size_t>(parse_uint(value, key));
    } else if (key == "grid.dx") {
      dx = parse_double(value, key);
    } else if (key == "grid.x0") {
      x0 = parse_double(value, key);
    } else if (key == "sim.dt") {
      spec.sim.dt = parse_double(value, key);
    } else if (key == "sim.t_end") {
      spec.sim.t_end = parse_double(value, key);
    } else if (key == "sim.record_stride") {
      spec.sim.record_stride = static_cast<std::size_t>(parse_uint(value, key));
    } else if (key == "sim.seed") {
      spec.sim.seed = parse_uint(value, key);
    } else if (key == "sim.auto_substep") {
      spec.sim.auto_substep = parse_bool(value, key);
    } else if (key == "sim.boundary") {
      if (value == "zero-flux") spec.sim.boundary = BoundaryMode::ZeroFlux;
      else if (value == "zero-padded") spec.sim.boundary = BoundaryMode::ZeroPadded;
      else fail(ErrorKind::Validation, key + ": expected zero-flux or zero-padded, got '" + value + "'");
    } else if (key == "sim.scheme") {
      if (value == "euler") spec.sim.scheme = Scheme::Euler;
      else if (value == "rk4") spec.sim.scheme = Scheme::RK4;
      else fail(ErrorKind::Validation, key + ": expected euler or rk4, got '" + value + "'");
    } else if (key == "init.kind") {
      spec.init.kind = init_kind_from_string(value);
    } else if (key == "init.lo") {
      spec.init.lo = parse_double(value, key);
    } else if (key == "init.hi") {
      spec.init.hi = parse_double(value, key);
    } else if (key == "init.values") {
      spec.init.values.clear();
      for (const auto& item : split_list(value)) spec.init.values.push_back(parse_double(item, key));
    } else if (key == "init.pulse_cells") {
      spec.init.pulse_cells = static_cast<std::size_t>(parse_uint(value, key));
    } else if (key == "init.pulse_value") {
      spec.init.pulse_value = parse_double(value, key);
    } else if (key == "output.dir") {
      spec.output_dir = value;
    } else if (key == "output.species") {
      spec.export_species = split_list(value);
    } else if (key == "output.pgm_min") {
      spec.pgm_min = parse_double(value, key);
    } else if (key == "output.pgm_max") {
      spec.pgm_max = parse_double(value, key);
    } else {
      fail(ErrorKind::Validation, "unknown config key " + key);
    }
  }

  std::vector<std::string> mandatory;
  if (*id == "pord") mandatory = {"k1", "k2", "k3", "D", "mu", "beta"};
  if (*id == "fhn-proto") mandatory = {"tau"};
  for (const auto& m : mandatory) {
    if (!seen.count(m)) {
      fail(ErrorKind::Validation, "missing mandatory parameter " + pretty(*id, m) +
                                      " (no published value exists; set it explicitly)");
    }
  }

  spec.grid = Grid1D(n_cells.value_or(101), dx.value_or(0.01), x0.value_or(0.0));
  spec.sim.validate();
  validate(spec.model);
  const auto names = species_names(spec.model);
  for (const auto& s : spec.export_species) {
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      fail(ErrorKind::Validation, "output.species: " + *id + " has no species '" + s + "'");
    }
  }
  if (spec.pgm_min && spec.pgm_max && !(*spec.pgm_min < *spec.pgm_max)) {
    fail(ErrorKind::Validation, "output.pgm_min must be < output.pgm_max");
  }
  return spec;
}

AnalysisSettings analysis_settings_from_config(const ConfigDocument& doc) {
  AnalysisSettings s;
  for (const auto& [key, value] : doc.entries()) {
    if (!starts_with(key, "analysis.")) continue;
    if (key == "analysis.chi_u") s.chi_u = parse_double(value, key);
    else if (key == "analysis.chi_v") s.chi_v = parse_double(value, key);
    else if (key == "analysis.F") s.F = parse_double(value, key);
    else if (key == "analysis.gamma") s.gamma = parse_double(value, key);
    else if (key == "analysis.resolution") s.resolution = static_cast<int>(parse_uint(value, key));
    else if (key == "analysis.seeds") s.seeds = static_cast<int>(parse_uint(value, key));
    else if (key == "analysis.window") {
      std::vector<double> w;
      for (const auto& item : split_list(value)) w.push_back(parse_double(item, key));
      if (w.size() != 4) fail(ErrorKind::Validation, key + ": expected p_min,p_max,q_min,q_max");
      s.window = w;
    } else {
      fail(ErrorKind::Validation, "unknown config key " + key);
    }
  }
  return s;
}

ConfigDocument to_config(const RunSpec& spec) {
  ConfigDocument doc;
  const std::string id = model_id(spec.model);
  doc.set("label", spec.label);
  doc.set("model", id);
  for (const auto& key : parameter_keys(spec.model)) doc.set(id + "." + key, format_double(get_parameter(spec.model, key)));
  doc.set("grid.n_cells", std::to_string(spec.grid.n_cells()));
  doc.set("grid.dx", format_double(spec.grid.dx()));
  doc.set("grid.x0", format_double(spec.grid.x0()));
  doc.set("sim.dt", format_double(spec.sim.dt));
  doc.set("sim.t_end", format_double(spec.sim.t_end));
  doc.set("sim.record_stride", std::to_string(spec.sim.record_stride));
  doc.set("sim.boundary", to_string(spec.sim.boundary));
  doc.set("sim.scheme", to_string(spec.sim.scheme));
  doc.set("sim.seed", std::to_string(spec.sim.seed));
  doc.set("sim.auto_substep", spec.sim.auto_substep ? "true" : "false");
  doc.set("init.kind", to_string(spec.init.kind));
  doc.set("init.lo", format_double(spec.init.lo));
  doc.set("init.hi", format_double(spec.init.hi));
  std::string values;
  for (std::size_t i = 0; i < spec.init.values.size(); ++i) values += (i ? "," : "") + format_double(spec.init.values[i]);
  doc.set("init.values", values);
  doc.set("init.pulse_cells", std::to_string(spec.init.pulse_cells));
  doc.set("init.pulse_value", format_double(spec.init.pulse_value));
  std::string species;
  for (std::size_t i = 0; i < spec.export_species.size(); ++i) species += (i ? "," : "") + spec.export_species[i];
  if (!species.empty()) doc.set("output.species", species);
  if (spec.pgm_min) doc.set("output.pgm_min", format_double(*spec.pgm_min));
  if (spec.pgm_max) doc.set("output.pgm_max", format_double(*spec.pgm_max));
  return doc;
}

}  // namespace somite
