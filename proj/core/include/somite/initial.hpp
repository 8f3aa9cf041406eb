#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "somite/grid.hpp"
#include "somite/models.hpp"

namespace somite {

enum class InitKind {
  Appendix,       ///< CW2/CW3 closed-form initial profiles (u = H(-x), cosh-shaped v, two-exponential w)
  UniformRandom,  ///< every species i.i.d. uniform on [lo, hi], species drawn one after another
  Constant,       ///< per-species constants, optionally with a raised block of cells at the left end
};

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& s);

/// How the initial state is built. Fields that do not apply to `kind` are ignored.
struct InitRecipe {
  InitKind kind = InitKind::Appendix;
  double lo = 0.0;
  double hi = 0.2;
  std::vector<double> values;     ///< Constant: one value per species (missing entries are 0)
  std::size_t pulse_cells = 0;    ///< Constant: number of leftmost cells raised in species 0
  double pulse_value = 1.0;
};

/// Uniform doubles on [0,1) from a 64-bit Mersenne Twister, 53 random bits per draw.
class UniformSource {
public:
  explicit UniformSource(std::uint64_t seed);
  double next();

private:
  std::mt19937_64 engine_;
};

ModelState appendix_initial(const CW2Params& p, const Grid1D& grid);
ModelState appendix_initial(const CW3Params& p, const Grid1D& grid);

ModelState make_initial(const ModelSpec& spec, const Grid1D& grid, const InitRecipe& recipe, std::uint64_t seed);

}  // namespace somite
