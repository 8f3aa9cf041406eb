#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "somite/grid.hpp"
#include "somite/initial.hpp"
#include "somite/integrator.hpp"
#include "somite/models.hpp"

namespace somite {

/// Flat key=value document. Keys are dotted (cw3.Dv, sim.dt); '#' starts a comment line.
class ConfigDocument {
public:
  /// Throws Validation on malformed lines and duplicate keys.
  static ConfigDocument parse(const std::string& text);
  /// Reads and parses a file. Throws Io if it cannot be read.
  static ConfigDocument load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  /// Labels of run.<label>.* sections, in order of first appearance.
  std::vector<std::string> run_labels() const;
  /// The run.<label>.* entries with the prefix removed.
  ConfigDocument section(const std::string& label) const;

  std::string to_text() const;

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Everything needed to reproduce one simulation.
struct RunSpec {
  std::string label = "run";
  ModelSpec model = CW2Params{};
  Grid1D grid{101, 0.01, 0.0};
  SimConfig sim;
  InitRecipe init;
  std::vector<std::string> export_species;  ///< empty exports every species
  std::optional<double> pgm_min;            ///< image range; data range when unset
  std::optional<double> pgm_max;
  std::optional<std::string> output_dir;  ///< used when the command line gives no --out
};

/// Settings for the analyze subcommand, read from analysis.* keys.
struct AnalysisSettings {
  std::optional<double> chi_u, chi_v, F, gamma;
  std::optional<std::vector<double>> window;  ///< p_min, p_max, q_min, q_max
  int resolution = 128;
  int seeds = 10;
};

/// Builds a run from a document. The model comes from `model_override` when given, else from
/// the `model` key. Unknown keys are rejected; manifest.* keys are ignored. pord needs
/// k1, k2, k3, D, mu and beta; fhn-proto needs tau.
RunSpec run_spec_from_config(const ConfigDocument& doc, const std::optional<std::string>& model_override = {});

AnalysisSettings analysis_settings_from_config(const ConfigDocument& doc);

/// Inverse of run_spec_from_config: every field written at full precision.
ConfigDocument to_config(const RunSpec& spec);

/// Shortest decimal text that reads back to the same double; locale independent.
std::string format_double(double v);
/// Strict decimal parse of the whole string. Throws Validation naming `key`.
double parse_double(const std::string& text, const std::string& key);

}  // namespace somite
