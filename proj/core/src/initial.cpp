#include "somite/initial.hpp"

#include <cmath>
#include <limits>

#include "somite/error.hpp"

namespace somite {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Appendix: return "appendix";
    case InitKind::UniformRandom: return "uniform-random";
    case InitKind::Constant: return "constant";
  }
  return "appendix";
}

InitKind init_kind_from_string(const std::string& s) {
  if (s == "appendix") return InitKind::Appendix;
  if (s == "uniform-random") return InitKind::UniformRandom;
  if (s == "constant") return InitKind::Constant;
  fail(ErrorKind::Validation, "init.kind: unknown value '" + s + "' (expected appendix, uniform-random or constant)");
}

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed) {}

double UniformSource::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Signal profile A*H(-x) + A*sign(x)/2 * cosh(lam*(10-|x|))/cosh(10*lam), with the
// cosh ratio written in exponentials so that large lam does not overflow.
double signal_profile(double x, double A, double lam) {
  double v = A * heaviside(-x);
  const double s = sign(x);
  if (s == 0.0 || std::isinf(lam)) return v;
  const double ax = std::abs(x);
  const double ratio = (std::exp(-lam * ax) + std::exp(-lam * (20.0 - ax))) / (1.0 + std::exp(-20.0 * lam));
  return v + 0.5 * A * s * ratio;
}

}  // namespace

ModelState appendix_initial(const CW2Params& p, const Grid1D& grid) {
  ModelState s = make_state(ModelSpec{p}, grid);
  const double lam = p.D > 0 ? std::sqrt(1.0 / p.D) : std::numeric_limits<double>::infinity();
  const double A = 1.0 / (1.0 + p.epsilon);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double x = grid.x(i);
    s.fields[0][i] = heaviside(-x);
    s.fields[1][i] = signal_profile(x, A, lam);
  }
  return s;
}

ModelState appendix_initial(const CW3Params& p, const Grid1D& grid) {
  ModelState s = make_state(ModelSpec{p}, grid);
  const double lam = p.Dv > 0 ? std::sqrt(p.k / p.Dv) : std::numeric_limits<double>::infinity();
  const double A = 1.0 / (1.0 + p.epsilon - p.pulse.eps1);
  const double root = std::sqrt(p.cn * p.cn + 4.0 * p.eta * p.Dw);
  const double n1 = (-p.cn - root) / (2.0 * p.Dw);
  const double n2 = (-p.cn + root) / (2.0 * p.Dw);
  const double scale = 1.0 / (p.eta * (n1 - n2));
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double x = grid.x(i);
    s.fields[0][i] = heaviside(-x);
    s.fields[1][i] = signal_profile(x, A, lam);
    // The two branches agree at x = xn, so the join is taken from the right branch only.
    if (p.Dw > 0) {
      s.fields[2][i] = x < p.xn ? n1 * scale * std::exp(n2 * (x - p.xn))
                                : n2 * scale * std::exp(n1 * (x - p.xn)) + 1.0 / p.eta;
    } else {
      s.fields[2][i] = heaviside(x - p.xn) / p.eta;
    }
  }
  return s;
}

ModelState make_initial(const ModelSpec& spec, const Grid1D& grid, const InitRecipe& recipe, std::uint64_t seed) {
  switch (recipe.kind) {
    case InitKind::Appendix:
      if (const auto* p = std::get_if<CW2Params>(&spec)) return appendix_initial(*p, grid);
      if (const auto* p = std::get_if<CW3Params>(&spec)) return appendix_initial(*p, grid);
      fail(ErrorKind::Validation, "init.kind=appendix applies only to cw2 and cw3");
    case InitKind::UniformRandom: {
      if (!(recipe.hi >= recipe.lo)) fail(ErrorKind::Validation, "init.hi must be >= init.lo");
      ModelState s = make_state(spec, grid);
      UniformSource rng(seed);
      for (auto& f : s.fields)
        for (auto& value : f) value = recipe.lo + (recipe.hi - recipe.lo) * rng.next();
      return s;
    }
    case InitKind::Constant: {
      ModelState s = make_state(spec, grid);
      if (recipe.values.size() > s.species()) {
        fail(ErrorKind::Validation, "init.values has " + std::to_string(recipe.values.size()) + " entries but " +
                                        model_id(spec) + " has " + std::to_string(s.species()) + " species");
      }
      for (std::size_t k = 0; k < recipe.values.size(); ++k) s.fields[k].assign(grid.n_cells(), recipe.values[k]);
      if (recipe.pulse_cells > grid.n_cells()) fail(ErrorKind::Validation, "init.pulse_cells exceeds the grid");
      for (std::size_t i = 0; i < recipe.pulse_cells; ++i) s.fields[0][i] = recipe.pulse_value;
      return s;
    }
  }
  fail(ErrorKind::Validation, "unknown init kind");
}

}  // namespace somite
