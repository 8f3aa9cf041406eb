#include "somite/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "somite/error.hpp"

namespace somite {

double FProfile::operator()(double x, double t) const noexcept { return std::max(0.0, a + b * (x - speed * t)); }

double GammaProfile::operator()(double x, double t) const noexcept {
  // Decay at x starts once a sweep moving at decay_front_speed has passed it.
  const double since = decay_front_speed > 0.0 ? std::max(0.0, t - x / decay_front_speed) : t;
  const double g = a + b * (x - growth_speed * t) - decay_rate * since;
  return floor > 0.0 ? std::max(floor, g) : g;
}

const Field& ModelState::operator[](std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return fields[i];
  fail(ErrorKind::Validation, "state has no species '" + std::string(name) + "'");
}

Field& ModelState::operator[](std::string_view name) {
  return const_cast<Field&>(static_cast<const ModelState&>(*this)[name]);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Bindings = std::vector<std::pair<const char*, double*>>;

Bindings bind(CW2Params& p) {
  return {{"mu", &p.mu}, {"gamma", &p.gamma}, {"kappa", &p.kappa}, {"k", &p.k}, {"c", &p.c},
          {"epsilon", &p.epsilon}, {"D", &p.D}, {"x1", &p.x1}, {"x2", &p.x2}};
}

Bindings bind(CW3Params& p) {
  return {{"mu", &p.mu},         {"gamma", &p.gamma},       {"kappa", &p.kappa},          {"k", &p.k},
          {"epsilon", &p.epsilon}, {"eta", &p.eta},         {"Dv", &p.Dv},                {"Dw", &p.Dw},
          {"xn", &p.xn},         {"cn", &p.cn},             {"x1", &p.x1},                {"x2", &p.x2},
          {"pulse.o", &p.pulse.o}, {"pulse.xb", &p.pulse.xb}, {"pulse.eps1", &p.pulse.eps1}};
}

Bindings bind(PORDParams& p) {
  return {{"k1", &p.k1}, {"k2", &p.k2}, {"k3", &p.k3}, {"D", &p.D}, {"mu", &p.mu},
          {"beta", &p.beta}, {"F.a", &p.F.a}, {"F.b", &p.F.b}, {"F.speed", &p.F.speed}};
}

Bindings bind(FHNParams& p) {
  return {{"tau1", &p.tau1},
          {"tau2", &p.tau2},
          {"alpha", &p.alpha},
          {"beta", &p.beta},
          {"D", &p.D},
          {"gamma.a", &p.gamma.a},
          {"gamma.b", &p.gamma.b},
          {"gamma.growth_speed", &p.gamma.growth_speed},
          {"gamma.decay_rate", &p.gamma.decay_rate},
          {"gamma.floor", &p.gamma.floor},
          {"gamma.decay_front_speed", &p.gamma.decay_front_speed}};
}

Bindings bind(FHNProtoParams& p) { return {{"I_ext", &p.I_ext}, {"a", &p.a}, {"b", &p.b}, {"tau", &p.tau}}; }

void require(bool ok, const std::string& model, const std::string& what) {
  if (!ok) fail(ErrorKind::Validation, model + ": " + what);
}

void check_finite(const ModelState& s) {
  for (std::size_t k = 0; k < s.fields.size(); ++k) {
    const Field& f = s.fields[k];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!std::isfinite(f[i])) {
        fail(ErrorKind::Numeric, "non-finite value in species " + s.names[k] + " at cell " + std::to_string(i));
      }
    }
  }
}

void check_shape(const ModelSpec& spec, const ModelState& s, const Grid1D& grid) {
  const auto names = species_names(spec);
  if (s.fields.size() != names.size() || s.names.size() != names.size()) {
    fail(ErrorKind::Dimension, model_id(spec) + " expects " + std::to_string(names.size()) + " species, state has " +
                                   std::to_string(s.fields.size()));
  }
  for (std::size_t k = 0; k < s.fields.size(); ++k) {
    if (s.fields[k].size() != grid.n_cells()) {
      fail(ErrorKind::Dimension, "species " + s.names[k] + " has " + std::to_string(s.fields[k].size()) +
                                     " cells but grid has " + std::to_string(grid.n_cells()));
    }
  }
}

// Second difference of f at cell i with boundary ghosts; inv = 1/dx^2.
inline double lap_at(const double* f, std::size_t i, std::size_t n, double inv, BoundaryMode mode) noexcept {
  const double left = i > 0 ? f[i - 1] : (mode == BoundaryMode::ZeroFlux ? f[0] : 0.0);
  const double right = i + 1 < n ? f[i + 1] : (mode == BoundaryMode::ZeroFlux ? f[n - 1] : 0.0);
  return (left - 2.0 * f[i] + right) * inv;
}

void cw2_into(const ModelState& s, double t, const Grid1D& g, const CW2Params& p, BoundaryMode mode, ModelState& o) {
  const std::size_t n = g.n_cells();
  const double* u = s.fields[0].data();
  const double* v = s.fields[1].data();
  double* du = o.fields[0].data();
  double* dv = o.fields[1].data();
  const double inv = 1.0 / (g.dx() * g.dx());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    const auto r = kinetics::cw2(u[i], v[i], heaviside(p.c * t - x + p.x1), heaviside(p.c * t - x + p.x2), p);
    du[i] = r.first;
    dv[i] = r.second + p.D * lap_at(v, i, n, inv, mode);
  }
}

void cw3_into(const ModelState& s, double t, const Grid1D& g, const CW3Params& p, BoundaryMode mode, ModelState& o) {
  const std::size_t n = g.n_cells();
  const double* u = s.fields[0].data();
  const double* v = s.fields[1].data();
  const double* w = s.fields[2].data();
  double* du = o.fields[0].data();
  double* dv = o.fields[1].data();
  double* dw = o.fields[2].data();
  const double inv = 1.0 / (g.dx() * g.dx());
  const double front = p.cn * t;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    const auto r = kinetics::cw3_uv(u[i], v[i], heaviside(p.x1 - x + front), heaviside(p.x2 - x + front), p);
    du[i] = r.first;
    dv[i] = r.second + p.Dv * lap_at(v, i, n, inv, mode);
    const double chi_w = heaviside(x - p.xn - front);
    const double chi_b = heaviside(p.pulse.eps1 - p.pulse.xb + x) * heaviside(p.pulse.eps1 + p.pulse.xb - x);
    dw[i] = chi_w + p.pulse.o * chi_b - p.eta * w[i] + p.Dw * lap_at(w, i, n, inv, mode);
  }
}

void pord_into(const ModelState& s, double t, const Grid1D& g, const PORDParams& p, BoundaryMode mode, ModelState& o) {
  const std::size_t n = g.n_cells();
  const double* A = s.fields[0].data();
  const double* R = s.fields[1].data();
  double* dA = o.fields[0].data();
  double* dR = o.fields[1].data();
  const double inv = 1.0 / (g.dx() * g.dx());
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = 1.0 + p.k1 * A[i] + p.k2 * R[i] + p.F(g.x(i), t) + p.beta;
    if (!(denom > 0.0)) {
      fail(ErrorKind::Domain, "pord: activation denominator " + std::to_string(denom) + " <= 0 at cell " +
                                  std::to_string(i) + " (t=" + std::to_string(t) + ")");
    }
    const auto r = kinetics::pord(A[i], R[i], p.F(g.x(i), t), p);
    dA[i] = r.first;
    dR[i] = r.second + p.D * lap_at(R, i, n, inv, mode);
  }
}

void fhn_into(const ModelState& s, double t, const Grid1D& g, const FHNParams& p, BoundaryMode mode, ModelState& o) {
  const std::size_t n = g.n_cells();
  const double* u = s.fields[0].data();
  const double* v = s.fields[1].data();
  double* du = o.fields[0].data();
  double* dv = o.fields[1].data();
  const double inv = 1.0 / (g.dx() * g.dx());
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = p.gamma(g.x(i), t);
    if (!(gamma > 0.0)) {
      fail(ErrorKind::Validation, "fhn: gamma(x) = " + std::to_string(gamma) + " <= 0 at cell " + std::to_string(i) +
                                      " (x=" + std::to_string(g.x(i)) + ", t=" + std::to_string(t) + ")");
    }
    const auto r = kinetics::fhn(u[i], v[i], gamma, p);
    du[i] = r.first + p.D * lap_at(u, i, n, inv, mode);
    dv[i] = r.second;
  }
}

void fhn_proto_into(const ModelState& s, const FHNProtoParams& p, ModelState& o) {
  const std::size_t n = s.n_cells();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = kinetics::fhn_proto(s.fields[0][i], s.fields[1][i], p);
    o.fields[0][i] = r.first;
    o.fields[1][i] = r.second;
  }
}

ModelState state_like(const ModelState& s) {
  ModelState out;
  out.names = s.names;
  out.fields.assign(s.fields.size(), Field(s.n_cells(), 0.0));
  return out;
}

}  // namespace

namespace kinetics {

Pair cw2(double u, double v, double chi_u, double chi_v, const CW2Params& p) noexcept {
  const double s = u + p.mu * v;
  return {s * s / (p.gamma + p.kappa * u * u) * chi_u - u / p.k, chi_v / (p.epsilon + u) - v};
}

Pair cw3_uv(double u, double v, double chi_u, double chi_v, const CW3Params& p) noexcept {
  const double s = u + p.mu * v;
  return {s * s / (p.gamma + u * u) * chi_u - u, p.k * (chi_v / (p.epsilon + u) - v)};
}

Pair pord(double A, double R, double F, const PORDParams& p) {
  const double num = p.k1 * A - p.k2 * R + F + p.beta;
  const double denom = 1.0 + p.k1 * A + p.k2 * R + F + p.beta;
  if (!(denom > 0.0)) fail(ErrorKind::Domain, "pord: activation denominator " + std::to_string(denom) + " <= 0");
  const double arg = num / denom;
  const double phi = arg * heaviside(arg);
  return {phi - p.mu * A, p.k3 * A / (1.0 + p.k3 * A) - p.mu * R};
}

Pair fhn(double u, double v, double gamma, const FHNParams& p) noexcept {
  return {(u * (u - p.alpha) * (1.0 - u) / gamma - v + p.beta) / p.tau1, (u - v) / p.tau2};
}

Pair fhn_proto(double v, double w, const FHNProtoParams& p) noexcept {
  return {v - v * v * v / 3.0 - w + p.I_ext, (v + p.a - p.b * w) / p.tau};
}

}  // namespace kinetics

std::string model_id(const ModelSpec& spec) {
  return std::visit(overloaded{[](const CW2Params&) { return std::string("cw2"); },
                               [](const CW3Params&) { return std::string("cw3"); },
                               [](const PORDParams&) { return std::string("pord"); },
                               [](const FHNParams&) { return std::string("fhn"); },
                               [](const FHNProtoParams&) { return std::string("fhn-proto"); }},
                    spec);
}

ModelSpec model_from_id(std::string_view id) {
  if (id == "cw2") return CW2Params{};
  if (id == "cw3") return CW3Params{};
  if (id == "pord") return PORDParams{};
  if (id == "fhn") return FHNParams{};
  if (id == "fhn-proto") return FHNProtoParams{};
  fail(ErrorKind::Validation, "unknown model '" + std::string(id) + "' (expected cw2, cw3, pord, fhn or fhn-proto)");
}

std::vector<std::string> species_names(const ModelSpec& spec) {
  return std::visit(overloaded{[](const CW2Params&) { return std::vector<std::string>{"u", "v"}; },
                               [](const CW3Params&) { return std::vector<std::string>{"u", "v", "w"}; },
                               [](const PORDParams&) { return std::vector<std::string>{"A", "R"}; },
                               [](const FHNParams&) { return std::vector<std::string>{"u", "v"}; },
                               [](const FHNProtoParams&) { return std::vector<std::string>{"v", "w"}; }},
                    spec);
}

std::vector<double> diffusivities(const ModelSpec& spec) {
  return std::visit(overloaded{[](const CW2Params& p) { return std::vector<double>{0.0, p.D}; },
                               [](const CW3Params& p) { return std::vector<double>{0.0, p.Dv, p.Dw}; },
                               [](const PORDParams& p) { return std::vector<double>{0.0, p.D}; },
                               [](const FHNParams& p) { return std::vector<double>{p.D, 0.0}; },
                               [](const FHNProtoParams&) { return std::vector<double>{0.0, 0.0}; }},
                    spec);
}

void set_parameter(ModelSpec& spec, std::string_view key, double value) {
  std::visit(
      [&](auto& p) {
        for (auto& [name, ptr] : bind(p)) {
          if (key == name) {
            *ptr = value;
            return;
          }
        }
        fail(ErrorKind::Validation, "unknown " + model_id(spec) + " parameter '" + std::string(key) + "'");
      },
      spec);
}

double get_parameter(const ModelSpec& spec, std::string_view key) {
  ModelSpec copy = spec;
  return std::visit(
      [&](auto& p) -> double {
        for (auto& [name, ptr] : bind(p))
          if (key == name) return *ptr;
        fail(ErrorKind::Validation, "unknown " + model_id(spec) + " parameter '" + std::string(key) + "'");
      },
      copy);
}

std::vector<std::string> parameter_keys(const ModelSpec& spec) {
  ModelSpec copy = spec;
  return std::visit(
      [](auto& p) {
        std::vector<std::string> keys;
        for (auto& [name, ptr] : bind(p)) keys.emplace_back(name);
        return keys;
      },
      copy);
}

void validate(const ModelSpec& spec) {
  ModelSpec copy = spec;
  const std::string id = model_id(spec);
  std::visit([&](auto& p) {
    for (auto& [name, ptr] : bind(p)) require(std::isfinite(*ptr), id, std::string(name) + " must be finite");
  }, copy);
  std::visit(overloaded{
                 [&](const CW2Params& p) {
                   require(p.gamma > 0, id, "gamma must be > 0");
                   require(p.kappa >= 0, id, "kappa must be >= 0");
                   require(p.epsilon > 0, id, "epsilon must be > 0");
                   require(p.D >= 0, id, "D must be >= 0");
                   require(p.k > 0, id, "k must be > 0");
                 },
                 [&](const CW3Params& p) {
                   require(p.gamma > 0, id, "gamma must be > 0");
                   require(p.epsilon > 0, id, "epsilon must be > 0");
                   require(p.eta > 0, id, "eta must be > 0");
                   require(p.Dv >= 0 && p.Dw >= 0, id, "Dv and Dw must be >= 0");
                   require(p.k > 0, id, "k must be > 0");
                   require(p.pulse.o >= 0, id, "pulse.o must be >= 0");
                   require(p.pulse.eps1 >= 0, id, "pulse.eps1 must be >= 0");
                 },
                 [&](const PORDParams& p) {
                   require(p.k1 >= 0 && p.k2 >= 0 && p.k3 >= 0, id, "k1, k2 and k3 must be >= 0");
                   require(p.D >= 0, id, "D must be >= 0");
                   require(p.mu > 0, id, "mu must be > 0");
                 },
                 [&](const FHNParams& p) {
                   require(p.tau1 > 0 && p.tau2 > 0, id, "tau1 and tau2 must be > 0");
                   require(p.D >= 0, id, "D must be >= 0");
                 },
                 [&](const FHNProtoParams& p) { require(p.tau > 0, id, "tau must be > 0"); }},
             spec);
}

ModelState make_state(const ModelSpec& spec, const Grid1D& grid) {
  ModelState s;
  s.names = species_names(spec);
  s.fields.assign(s.names.size(), Field(grid.n_cells(), 0.0));
  return s;
}

void rhs_into(const ModelSpec& spec, const ModelState& state, double t, const Grid1D& grid, BoundaryMode mode,
              ModelState& out) {
  check_finite(state);
  std::visit(overloaded{[&](const CW2Params& p) { cw2_into(state, t, grid, p, mode, out); },
                        [&](const CW3Params& p) { cw3_into(state, t, grid, p, mode, out); },
                        [&](const PORDParams& p) { pord_into(state, t, grid, p, mode, out); },
                        [&](const FHNParams& p) { fhn_into(state, t, grid, p, mode, out); },
                        [&](const FHNProtoParams& p) { fhn_proto_into(state, p, out); }},
             spec);
}

ModelState rhs(const ModelSpec& spec, const ModelState& state, double t, const Grid1D& grid, BoundaryMode mode) {
  check_shape(spec, state, grid);
  ModelState out = state_like(state);
  rhs_into(spec, state, t, grid, mode, out);
  return out;
}

ModelState cw2_rhs(const ModelState& state, double t, const Grid1D& grid, const CW2Params& p, BoundaryMode mode) {
  return rhs(ModelSpec{p}, state, t, grid, mode);
}

ModelState cw3_rhs(const ModelState& state, double t, const Grid1D& grid, const CW3Params& p, BoundaryMode mode) {
  return rhs(ModelSpec{p}, state, t, grid, mode);
}

ModelState pord_rhs(const ModelState& state, double t, const Grid1D& grid, const PORDParams& p, BoundaryMode mode) {
  return rhs(ModelSpec{p}, state, t, grid, mode);
}

ModelState fhn_rhs(const ModelState& state, const Grid1D& grid, const FHNParams& p, BoundaryMode mode) {
  return rhs(ModelSpec{p}, state, 0.0, grid, mode);
}

ModelState fhn_proto_rhs(const ModelState& state, const FHNProtoParams& p) {
  if (state.fields.size() != 2) fail(ErrorKind::Dimension, "fhn-proto expects 2 species");
  if (state.fields[0].size() != state.fields[1].size()) fail(ErrorKind::Dimension, "species lengths differ");
  check_finite(state);
  ModelState out = state_like(state);
  fhn_proto_into(state, p, out);
  return out;
}

}  // namespace somite
