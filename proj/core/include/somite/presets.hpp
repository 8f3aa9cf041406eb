#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "somite/analysis.hpp"
#include "somite/config.hpp"
#include "somite/measure.hpp"
#include "somite/output.hpp"

namespace somite {

/// Toolkit version recorded in manifests.
std::string toolkit_version();

struct Preset {
  std::string name;
  std::string description;
  std::vector<RunSpec> runs;
  /// Expected-structure descriptor, echoed into the manifest.
  std::vector<std::pair<std::string, std::string>> expected;
  double stripe_threshold = 0.5;
  /// Phase-plane and bifurcation tables; empty for pure simulation presets.
  std::function<std::vector<Table>()> analysis;
};

/// The seven preset names in registry order.
std::vector<std::string> preset_names();

/// Throws Validation listing every preset when the name is unknown.
Preset get_preset(const std::string& name);

struct LabeledRaster {
  std::string label;
  SpaceTimeRaster raster;
};

struct PresetResult {
  std::string name;
  std::vector<LabeledRaster> rasters;
  std::vector<Table> tables;
  Manifest manifest;
  std::vector<std::string> files;  ///< written artifacts (empty when no directory was given)
};

/// Runs every simulation and analysis of the preset. With a non-empty out_dir writes
/// <label>[_<species>].csv and .pgm per run, <table>.csv per analysis table and manifest.txt.
PresetResult run_preset(const std::string& name, const std::string& out_dir = "");

struct RunResult {
  SpaceTimeRaster raster;
  Manifest manifest;
  std::vector<std::string> files;
};

/// Simulates one run. With a non-empty out_dir writes its CSV/PGM artifacts and manifest.txt.
RunResult execute_run(const RunSpec& spec, const std::string& out_dir = "");

/// Manifest lines echoing a run under run.<label>.* plus its substep count and stability verdict.
Manifest run_echo(const RunSpec& spec);

/// Writes <label>[_<species>].csv and .pgm for the exported species of one run; returns the paths.
std::vector<std::string> write_run_files(const RunSpec& spec, const SpaceTimeRaster& raster, const std::string& dir);

// Analysis tables. Class and kind columns hold the enum index (kind: 0 hopf, 1 saddle-node).

/// Columns curve (0 p-nullcline, 1 q-nullcline), segment, p, q.
Table nullcline_table(const Nullclines& n);
/// Columns param, p, q, class, re1, im1, re2, im2.
Table fixed_point_table(const std::string& name, const std::vector<std::pair<double, FixedPoint>>& fps);
/// Columns value, kind, p, q, residual; `only` keeps a single kind.
Table scan_points_table(const std::string& name, const ScanResult& scan,
                        std::optional<BifurcationKind> only = std::nullopt);
/// Columns branch, param, p, q, class.
Table scan_branch_table(const std::string& name, const ScanResult& scan);
/// cusp_branches (branch 0 lower, 1 upper) and cusp_point.
std::vector<Table> cusp_tables(const CuspTrace& cusp, const std::string& name_a, const std::string& name_b);

// Preset building blocks shared with the test suites.

RunSpec fig8_run();
RunSpec fig9_run(const CW3Pulse& pulse = {});
/// Appendix FHN lattice with the given coupling and seed.
RunSpec fig18_run(double D, std::uint64_t seed);
/// Cases 'a' (constant gamma), 'b' (moving gradient) and 'c' (gamma decaying in time).
RunSpec fig17_run(char which);
RunSpec pord_spatial_run();

/// Derived PORD parameters with an oscillation window in F (not published values).
PORDParams pord_derived_params();
FHNProtoParams fhn_proto_params();

struct PordPhaseSetup {
  PORDParams params;
  Window window;
  double F_from, F_to;
  int F_steps;
  double F_inside;  ///< inside the oscillation window
  double F_above;   ///< above the Hopf point
};
PordPhaseSetup fig12_setup();

struct FhnBifurcationSetup {
  FHNParams params;
  Window window;
  double gamma_from, gamma_to;
  int gamma_steps;
  double alpha_at_gamma;  ///< frozen gamma for the alpha scan
  double alpha_from, alpha_to;
  int alpha_steps;
  double cusp_gamma_from, cusp_gamma_to;
  int cusp_gamma_steps;
  double cusp_alpha_from, cusp_alpha_to;
  int cusp_alpha_steps;
};
FhnBifurcationSetup fig15_setup();

struct PulseExperiment {
  StripeReport baseline;
  StripeReport perturbed;
  double mean_width_delta = 0.0;
};

/// Fig9 run with the pulse at amplitude 0 against the same pulse at amplitude o.
PulseExperiment pulse_perturbation_experiment(const CW3Pulse& pulse, const SegmentOptions& options = {});

/// w front of a fig9-style raster at half the travelling-wave plateau 1/eta. The fit skips
/// crossings within one decay length sqrt(Dw/eta) of either domain end.
FrontTrack fig9_front(const SpaceTimeRaster& raster, const CW3Params& params = {});

/// Somite report of a fig9-style raster (u species).
StripeReport fig9_somites(const SpaceTimeRaster& raster, const SegmentOptions& options = {});

}  // namespace somite
