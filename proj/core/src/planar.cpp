#include "somite/planar.hpp"

#include <algorithm>
#include <limits>

#include "somite/error.hpp"

namespace somite {

namespace {

// Frozen coordinates each model understands: the CW switches, the PORD input F and the FHN gamma.
bool is_frozen_key(const ModelSpec& spec, const std::string& key) {
  if (std::holds_alternative<CW2Params>(spec) || std::holds_alternative<CW3Params>(spec))
    return key == "chi_u" || key == "chi_v";
  if (std::holds_alternative<PORDParams>(spec)) return key == "F";
  if (std::holds_alternative<FHNParams>(spec)) return key == "gamma";
  return false;
}

void check_key(const ModelSpec& spec, const std::string& key) {
  if (is_frozen_key(spec, key)) return;
  const auto keys = parameter_keys(spec);
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    fail(ErrorKind::Validation, "unknown " + model_id(spec) + " analysis parameter '" + key + "'");
  }
}

void apply(ModelSpec& spec, Frozen& frozen, const std::string& key, double value) {
  if (!is_frozen_key(spec, key)) {
    set_parameter(spec, key, value);
  } else if (key == "chi_u") {
    frozen.chi_u = value;
  } else if (key == "chi_v") {
    frozen.chi_v = value;
  } else if (key == "F") {
    frozen.F = value;
  } else {
    frozen.gamma = value;
  }
}

}  // namespace

PlanarSystem planar_system(const ModelSpec& spec, const Frozen& frozen) {
  PlanarSystem sys;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, CW2Params>) {
          sys.rhs = [p, frozen](double u, double v) {
            const auto r = kinetics::cw2(u, v, frozen.chi_u, frozen.chi_v, p);
            return Vec2{r.first, r.second};
          };
          sys.p_name = "u";
          sys.q_name = "v";
        } else if constexpr (std::is_same_v<P, CW3Params>) {
          sys.rhs = [p, frozen](double u, double v) {
            const auto r = kinetics::cw3_uv(u, v, frozen.chi_u, frozen.chi_v, p);
            return Vec2{r.first, r.second};
          };
          sys.p_name = "u";
          sys.q_name = "v";
        } else if constexpr (std::is_same_v<P, PORDParams>) {
          sys.rhs = [p, frozen](double A, double R) {
            // Outside the model's domain the field is undefined; NaN makes Newton reject the iterate.
            if (!(1.0 + p.k1 * A + p.k2 * R + frozen.F + p.beta > 0.0)) {
              return Vec2{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
            }
            const auto r = kinetics::pord(A, R, frozen.F, p);
            return Vec2{r.first, r.second};
          };
          sys.p_name = "A";
          sys.q_name = "R";
        } else if constexpr (std::is_same_v<P, FHNParams>) {
          if (!(frozen.gamma > 0.0)) fail(ErrorKind::Validation, "fhn: frozen gamma must be > 0");
          sys.rhs = [p, frozen](double u, double v) {
            const auto r = kinetics::fhn(u, v, frozen.gamma, p);
            return Vec2{r.first, r.second};
          };
          sys.p_name = "u";
          sys.q_name = "v";
        } else {
          sys.rhs = [p](double v, double w) {
            const auto r = kinetics::fhn_proto(v, w, p);
            return Vec2{r.first, r.second};
          };
          sys.p_name = "v";
          sys.q_name = "w";
        }
      },
      spec);
  return sys;
}

PlanarFamily planar_family(const ModelSpec& spec, const Frozen& frozen, const std::string& param) {
  check_key(spec, param);
  return [spec, frozen, param](double value) {
    ModelSpec s = spec;
    Frozen f = frozen;
    apply(s, f, param, value);
    return planar_system(s, f);
  };
}

PlanarFamily2 planar_family2(const ModelSpec& spec, const Frozen& frozen, const std::string& param_a,
                             const std::string& param_b) {
  check_key(spec, param_a);
  check_key(spec, param_b);
  return [spec, frozen, param_a, param_b](double a, double b) {
    ModelSpec s = spec;
    Frozen f = frozen;
    apply(s, f, param_a, a);
    apply(s, f, param_b, b);
    return planar_system(s, f);
  };
}

Window default_window(const ModelSpec& spec) {
  if (std::holds_alternative<CW2Params>(spec)) return {-5e-4, 1.5, -0.1, 20.0};
  if (std::holds_alternative<CW3Params>(spec)) return {-5e-4, 1.5, -0.1, 20.0};
  if (std::holds_alternative<PORDParams>(spec)) return {0.0, 6.0, 0.0, 6.0};
  if (std::holds_alternative<FHNParams>(spec)) return {-0.5, 1.5, -0.5, 1.5};
  return {-2.5, 2.5, -1.5, 2.5};
}

}  // namespace somite
