#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "somite/error.hpp"
#include "somite/grid.hpp"
#include "somite/models.hpp"

namespace somite {

enum class Scheme { Euler, RK4 };

std::string to_string(Scheme s);
std::string to_string(BoundaryMode m);

struct SimConfig {
  double dt = 0.01;
  double t_end = 1.0;
  std::size_t record_stride = 1;
  BoundaryMode boundary = BoundaryMode::ZeroFlux;
  Scheme scheme = Scheme::Euler;
  std::uint64_t seed = 1;
  /// Split each dt into ceil(ratio/0.4) substeps when the diffusion ratio exceeds 0.5.
  bool auto_substep = true;

  /// Number of dt steps to reach t_end (t_end/dt rounded to the nearest integer).
  std::size_t steps() const;
  void validate() const;
};

/// Row-major (time x space) samples.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
  std::vector<double> row(std::size_t r) const;
  std::vector<double> column(std::size_t c) const;
};

/// Recorded history of a run. Row j of every species holds the state at times[j].
struct SpaceTimeRaster {
  std::vector<std::string> species;
  std::vector<double> times;
  std::vector<double> xs;
  std::vector<Matrix> data;

  std::size_t rows() const noexcept { return times.size(); }
  const Matrix& operator[](const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
};

/// Thrown when a step produces a value above 1e6 in magnitude or a non-finite value.
/// Carries everything recorded before the failure.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& message, SpaceTimeRaster partial, double t)
      : Error(ErrorKind::Divergence, message), partial_(std::move(partial)), t_(t) {}

  const SpaceTimeRaster& partial() const noexcept { return partial_; }
  double time() const noexcept { return t_; }

private:
  SpaceTimeRaster partial_;
  double t_;
};

inline constexpr double kDivergenceLimit = 1e6;

struct StabilityReport {
  bool ok = true;
  double max_ratio = 0.0;  ///< largest D*dt/dx^2 over species
  std::string species;     ///< species attaining max_ratio
  std::string message;     ///< empty when ok
};

/// Explicit-diffusion check D*dt/dx^2 <= 0.5 for every diffusing species. Never throws.
StabilityReport stability_guard(const ModelSpec& model, const Grid1D& grid, const SimConfig& config);

/// Substeps per dt that run() will take: 1, or ceil(ratio/0.4) when the guard fails and
/// auto_substep is on.
std::size_t substep_count(const ModelSpec& model, const Grid1D& grid, const SimConfig& config);

/// One step of size h from time t into a fresh state. Throws DivergenceError (with an
/// empty partial raster) if the result leaves the finite/bounded range.
ModelState step(const ModelState& state, double t, double h, const ModelSpec& model, const Grid1D& grid,
                const SimConfig& config);
ModelState step(const ModelState& state, double t, const ModelSpec& model, const Grid1D& grid,
                const SimConfig& config);

/// Integrates from t=0 to t_end recording every record_stride steps.
/// Rows: steps/record_stride + 1 (integer division), row j at time j*record_stride*dt.
SpaceTimeRaster run(const ModelSpec& model, const Grid1D& grid, const ModelState& init, const SimConfig& config);

}  // namespace somite
