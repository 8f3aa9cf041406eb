#include "somite/grid.hpp"

#include <cmath>
#include <string>

#include "somite/error.hpp"

namespace somite {

Grid1D::Grid1D(std::size_t n_cells, double dx, double x0) : n_cells_(n_cells), dx_(dx), x0_(x0) {
  if (n_cells < 2) fail(ErrorKind::Validation, "grid needs at least 2 cells, got " + std::to_string(n_cells));
  if (!(dx > 0.0) || !std::isfinite(dx)) fail(ErrorKind::Validation, "grid spacing dx must be positive and finite");
  if (!std::isfinite(x0)) fail(ErrorKind::Validation, "grid origin x0 must be finite");
}

Grid1D Grid1D::spanning(double left, double right, double dx) {
  if (!(right > left)) fail(ErrorKind::Validation, "grid span needs right > left");
  if (!(dx > 0.0)) fail(ErrorKind::Validation, "grid spacing dx must be positive");
  const auto intervals = static_cast<std::size_t>(std::llround((right - left) / dx));
  return Grid1D(intervals + 1, dx, left);
}

std::vector<double> Grid1D::coordinates() const {
  std::vector<double> xs(n_cells_);
  for (std::size_t i = 0; i < n_cells_; ++i) xs[i] = x(i);
  return xs;
}

void laplacian_into(std::span<const double> f, double dx, BoundaryMode mode, std::span<double> out) noexcept {
  const std::size_t n = f.size();
  const double inv = 1.0 / (dx * dx);
  const double left_ghost = mode == BoundaryMode::ZeroFlux ? f[0] : 0.0;
  const double right_ghost = mode == BoundaryMode::ZeroFlux ? f[n - 1] : 0.0;
  out[0] = (left_ghost - 2.0 * f[0] + f[1]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
  out[n - 1] = (f[n - 2] - 2.0 * f[n - 1] + right_ghost) * inv;
}

Field laplacian(std::span<const double> f, const Grid1D& grid, BoundaryMode mode) {
  if (f.size() != grid.n_cells()) {
    fail(ErrorKind::Dimension, "field has " + std::to_string(f.size()) + " cells but grid has " +
                                   std::to_string(grid.n_cells()));
  }
  Field out(f.size());
  laplacian_into(f, grid.dx(), mode, out);
  return out;
}

}  // namespace somite
