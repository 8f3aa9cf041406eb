#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace somite {

/// Per-cell samples of one species. Length always equals the owning grid's cell count.
using Field = std::vector<double>;

/// Uniform 1D lattice. Cell i sits at x0 + i*dx.
class Grid1D {
public:
  /// Throws Validation if n_cells < 2 or dx is not a positive finite number.
  Grid1D(std::size_t n_cells, double dx, double x0 = 0.0);

  /// Grid covering [left, right] inclusive with the given spacing; the cell
  /// count is rounded to the nearest whole number of intervals.
  static Grid1D spanning(double left, double right, double dx);

  std::size_t n_cells() const noexcept { return n_cells_; }
  double dx() const noexcept { return dx_; }
  double x0() const noexcept { return x0_; }
  double x(std::size_t i) const noexcept { return x0_ + static_cast<double>(i) * dx_; }
  double x_max() const noexcept { return x(n_cells_ - 1); }
  std::vector<double> coordinates() const;

  bool operator==(const Grid1D&) const = default;

private:
  std::size_t n_cells_;
  double dx_;
  double x0_;
};

/// Ghost-cell treatment at both ends of the lattice.
enum class BoundaryMode {
  ZeroFlux,    ///< reflecting ghosts: ghost value equals the adjacent interior value
  ZeroPadded,  ///< ghost values fixed at 0
};

/// Second difference (f[i-1] - 2 f[i] + f[i+1]) / dx^2 with boundary ghosts per `mode`.
/// Throws Dimension if f does not match the grid.
Field laplacian(std::span<const double> f, const Grid1D& grid, BoundaryMode mode);

/// Same stencil written into `out` (must not alias `f`). No length checks.
void laplacian_into(std::span<const double> f, double dx, BoundaryMode mode, std::span<double> out) noexcept;

/// H(x) = 1 for x >= 0, else 0.
constexpr double heaviside(double x) noexcept { return x >= 0.0 ? 1.0 : 0.0; }

}  // namespace somite
