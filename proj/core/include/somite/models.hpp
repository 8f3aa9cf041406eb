#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "somite/grid.hpp"

namespace somite {

/// Two-species clock-and-wavefront kinetics (somitic factor u, signal v).
struct CW2Params {
  double mu = 0.1;
  double gamma = 0.2;
  double kappa = 10.0;
  double k = 1.0;  ///< decay divisor of u
  double c = 5e-3;  ///< speed of both switches
  double epsilon = 1e-3;
  double D = 100.0;  ///< diffusivity of v
  double x1 = 1.0;
  double x2 = 0.0;
};

/// Optional FGF8 pulse of amplitude o on the window |x - xb| <= eps1.
struct CW3Pulse {
  double o = 0.0;
  double xb = 7.5;
  double eps1 = 0.0;
};

/// Three-species clock-and-wavefront kinetics (u, v, FGF8 w).
struct CW3Params {
  double mu = 1e-4;
  double gamma = 1e-3;
  double kappa = 10.0;  ///< carried for the record; the u kinetics has no kappa and k plays its role
  double k = 10.0;
  double epsilon = 1e-3;
  double eta = 1.0;
  double Dv = 50.0;
  double Dw = 20.0;
  double xn = 0.0;
  double cn = 0.5;
  double x1 = 1.0;
  double x2 = 0.0;
  CW3Pulse pulse;
};

/// FGF input to the PORD activator: F(x,t) = max(0, a + b (x - speed t)).
/// speed = 0 gives a static linear gradient.
struct FProfile {
  double a = 0.5;
  double b = 0.0;
  double speed = 0.0;

  double operator()(double x, double t) const noexcept;
};

/// Activator A / diffusible repressor R kinetics.
struct PORDParams {
  double k1 = 2.0;
  double k2 = 1.0;
  double k3 = 1.0;
  double D = 0.0;  ///< diffusivity of R
  double mu = 0.2;
  double beta = 0.0;
  FProfile F;
};

/// gamma(x,t) = max(floor, a + b (x - growth_speed t) - decay_rate s), where s = t, or
/// s = max(0, t - x / decay_front_speed) when decay_front_speed > 0.
/// The floor is inactive while it is 0.
struct GammaProfile {
  double a = 0.21;
  double b = -0.20;
  double growth_speed = 0.0;
  double decay_rate = 0.0;
  double floor = 0.0;
  double decay_front_speed = 0.0;

  double operator()(double x, double t = 0.0) const noexcept;
};

/// a + b*x.
constexpr double gamma_profile(double x, double a, double b) noexcept { return a + b * x; }

/// Discrete FitzHugh-Nagumo lattice with a cell-dependent cubic amplitude gamma.
struct FHNParams {
  double tau1 = 0.588;
  double tau2 = 32.1;
  double alpha = 0.4;
  double beta = 0.33;
  GammaProfile gamma;
  double D = 1e-5;  ///< coupling of u; v does not diffuse
};

/// Prototype FitzHugh-Nagumo oscillator (v fast, w slow).
struct FHNProtoParams {
  double I_ext = 0.5;
  double a = 0.8;
  double b = 0.7;
  double tau = 12.5;
};

using ModelSpec = std::variant<CW2Params, CW3Params, PORDParams, FHNParams, FHNProtoParams>;

/// Named per-species fields on one grid.
struct ModelState {
  std::vector<std::string> names;
  std::vector<Field> fields;

  std::size_t species() const noexcept { return fields.size(); }
  std::size_t n_cells() const noexcept { return fields.empty() ? 0 : fields.front().size(); }
  const Field& operator[](std::string_view name) const;
  Field& operator[](std::string_view name);
};

/// Model ids as used on the command line: cw2, cw3, pord, fhn, fhn-proto.
std::string model_id(const ModelSpec& spec);
ModelSpec model_from_id(std::string_view id);
std::vector<std::string> species_names(const ModelSpec& spec);
/// Diffusivity per species, in species order.
std::vector<double> diffusivities(const ModelSpec& spec);

/// Sets a scalar parameter by key (e.g. "mu", "pulse.o", "F.a", "gamma.b").
/// Unknown keys throw Validation.
void set_parameter(ModelSpec& spec, std::string_view key, double value);
double get_parameter(const ModelSpec& spec, std::string_view key);
/// All parameter keys of the model, in a stable order.
std::vector<std::string> parameter_keys(const ModelSpec& spec);

/// Throws Validation when the parameter record violates its invariants.
void validate(const ModelSpec& spec);

/// Allocates a zero state with the model's species on the grid.
ModelState make_state(const ModelSpec& spec, const Grid1D& grid);

/// Writes d(state)/dt into `out`, which must already have the state's shape.
/// Throws Numeric on non-finite input, Domain for an invalid PORD
/// denominator, Validation when gamma(x,t) <= 0.
void rhs_into(const ModelSpec& spec, const ModelState& state, double t, const Grid1D& grid, BoundaryMode mode,
              ModelState& out);

/// Allocating wrapper around rhs_into; also checks the state against the grid (Dimension).
ModelState rhs(const ModelSpec& spec, const ModelState& state, double t, const Grid1D& grid, BoundaryMode mode);

// Per-model evaluators. States are {u,v}, {u,v,w}, {A,R}, {u,v} and {v,w}.
ModelState cw2_rhs(const ModelState& state, double t, const Grid1D& grid, const CW2Params& p, BoundaryMode mode);
ModelState cw3_rhs(const ModelState& state, double t, const Grid1D& grid, const CW3Params& p, BoundaryMode mode);
ModelState pord_rhs(const ModelState& state, double t, const Grid1D& grid, const PORDParams& p, BoundaryMode mode);
ModelState fhn_rhs(const ModelState& state, const Grid1D& grid, const FHNParams& p, BoundaryMode mode);
ModelState fhn_proto_rhs(const ModelState& state, const FHNProtoParams& p);

/// Pointwise kinetics (no diffusion) shared by the lattice evaluators and the planar analysis.
namespace kinetics {

struct Pair {
  double first;
  double second;
};

/// du/dt and dv/dt of the CW2 pair with frozen switch values.
Pair cw2(double u, double v, double chi_u, double chi_v, const CW2Params& p) noexcept;
/// du/dt and dv/dt of the CW3 u/v pair with frozen switch values.
Pair cw3_uv(double u, double v, double chi_u, double chi_v, const CW3Params& p) noexcept;
/// dA/dt and dR/dt at FGF input F. Throws Domain if the denominator is not positive.
Pair pord(double A, double R, double F, const PORDParams& p);
/// f(u,v) and g(u,v) of the FHN lattice at a given gamma.
Pair fhn(double u, double v, double gamma, const FHNParams& p) noexcept;
Pair fhn_proto(double v, double w, const FHNProtoParams& p) noexcept;

}  // namespace kinetics

}  // namespace somite
