#pragma once

#include <string>

#include "somite/analysis.hpp"
#include "somite/models.hpp"

namespace somite {

/// Values held constant when a spatial model is reduced to its pointwise kinetics.
struct Frozen {
  double chi_u = 1.0;  ///< CW switch values
  double chi_v = 0.0;
  double F = 0.5;       ///< PORD FGF input
  double gamma = 0.21;  ///< FHN cubic amplitude
};

/// Diffusion-free pointwise kinetics of the first two species of a model:
/// (u, v) for cw2/cw3/fhn, (A, R) for pord, (v, w) for fhn-proto.
PlanarSystem planar_system(const ModelSpec& spec, const Frozen& frozen);

/// Family obtained by varying one parameter. Besides the model's own keys
/// (see parameter_keys) the frozen values are addressable: chi_u and chi_v for cw2/cw3,
/// F for pord, gamma for fhn (where it shadows the gamma.* profile keys).
/// Throws Validation for an unknown key.
PlanarFamily planar_family(const ModelSpec& spec, const Frozen& frozen, const std::string& param);

PlanarFamily2 planar_family2(const ModelSpec& spec, const Frozen& frozen, const std::string& param_a,
                             const std::string& param_b);

/// A sensible analysis window for each model's kinetics.
Window default_window(const ModelSpec& spec);

}  // namespace somite
