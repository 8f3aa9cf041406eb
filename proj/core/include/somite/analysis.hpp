#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace somite {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Autonomous vector field (p, q) -> (dp/dt, dq/dt).
struct PlanarSystem {
  std::function<Vec2(double, double)> rhs;
  std::string p_name = "p";
  std::string q_name = "q";

  Vec2 operator()(double p, double q) const { return rhs(p, q); }
};

/// One-parameter family of planar systems.
using PlanarFamily = std::function<PlanarSystem(double)>;
/// Two-parameter family, called as family(a, b).
using PlanarFamily2 = std::function<PlanarSystem(double, double)>;

struct Window {
  double p_min = 0.0;
  double p_max = 1.0;
  double q_min = 0.0;
  double q_max = 1.0;

  bool contains(double p, double q, double margin = 0.0) const noexcept;
  /// Throws Validation unless p_max > p_min and q_max > q_min.
  void validate() const;
};

enum class FixedPointClass { StableNode, StableFocus, UnstableNode, UnstableFocus, Saddle, Center };

std::string to_string(FixedPointClass c);
bool is_stable(FixedPointClass c) noexcept;

struct FixedPoint {
  double p = 0.0;
  double q = 0.0;
  Mat2 jacobian{};
  std::array<std::complex<double>, 2> eigenvalues{};
  FixedPointClass cls = FixedPointClass::StableNode;
  double residual = 0.0;  ///< max |rhs| component at (p, q)
};

/// Central-difference Jacobian with step 1e-7 * (1 + |value|).
Mat2 jacobian(const PlanarSystem& sys, double p, double q);
std::array<std::complex<double>, 2> eigenvalues(const Mat2& j);
FixedPointClass classify(const Mat2& j);

/// Newton from one start; nullopt when it does not converge to |rhs| < 1e-10 in 50 iterations.
std::optional<FixedPoint> newton(const PlanarSystem& sys, double p, double q);

/// Newton from every node of an n x n seed lattice on the window (plus any extra seeds),
/// then from multi-scale offsets around each root found; roots inside the window are
/// deduplicated within 1e-6 and sorted by (p, q).
/// Throws Validation if seed_grid_n < 8.
std::vector<FixedPoint> find_fixed_points(const PlanarSystem& sys, const Window& window, int seed_grid_n,
                                          const std::vector<Vec2>& extra_seeds = {});

using Polyline = std::vector<Vec2>;

struct Nullclines {
  std::vector<Polyline> p_nullcline;  ///< dp/dt = 0
  std::vector<Polyline> q_nullcline;  ///< dq/dt = 0
};

/// Zero contours of each component by marching squares on a resolution x resolution
/// sample lattice, joined into ordered polylines. Throws Validation if resolution < 32
/// or a component is identically zero on the window.
Nullclines nullclines(const PlanarSystem& sys, const Window& window, int resolution);

enum class BifurcationKind { Hopf, SaddleNode };

std::string to_string(BifurcationKind k);

struct BifurcationPoint {
  std::string parameter;
  double value = 0.0;
  BifurcationKind kind = BifurcationKind::SaddleNode;
  double residual = 0.0;  ///< |rhs| plus |tr J| (Hopf) or |det J| (saddle-node) at the refined point
  double p = 0.0;         ///< state at the critical value
  double q = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
};

struct BranchSample {
  double param;
  FixedPoint point;
};

using Branch = std::vector<BranchSample>;

struct ScanOptions {
  Window window;
  int seed_grid_n = 10;
};

struct ScanResult {
  std::vector<BifurcationPoint> points;  ///< ordered by critical value
  std::vector<double> gaps;              ///< parameter values where no fixed point was found
  std::vector<Branch> branches;
};

/// Sweeps `param` from `from` to `to` (either direction) in n_steps intervals, tracks
/// fixed-point branches, and reports Hopf and saddle-node points refined to 1e-6 in the
/// parameter. Throws Validation if n_steps < 16.
ScanResult scan_one_param(const PlanarFamily& family, const std::string& param, double from, double to, int n_steps,
                          const ScanOptions& options);

struct CuspPoint {
  double a = 0.0;
  double b = 0.0;
  double separation = 0.0;  ///< distance in b between the two branches at `a`
};

struct CuspTrace {
  std::vector<Vec2> lower;  ///< (a, b) points, smaller b of each saddle-node pair
  std::vector<Vec2> upper;
  std::optional<CuspPoint> cusp;
  bool partial = false;  ///< some grid value of a had fewer than two saddle-node points
};

/// For each a on an n_a grid over [a_from, a_to], scans b over [b_from, b_to] and splits
/// the saddle-node points into two branches. The meeting point is located by bisection in
/// a between the last value with two saddle-nodes and its neighbour with fewer.
CuspTrace cusp_trace(const PlanarFamily2& family, const std::string& param_a, double a_from, double a_to, int n_a,
                     const std::string& param_b, double b_from, double b_to, int n_b, const ScanOptions& options);

struct Cycle {
  double period = 0.0;
  double amplitude = 0.0;  ///< half the peak-to-peak range of p over the last returns
};

struct ProbeResult {
  std::optional<FixedPoint> converged_to;
  std::optional<Cycle> cycle;
  Vec2 p_range{};  ///< min and max of p along the trajectory
  Vec2 q_range{};
  double t_elapsed = 0.0;

  bool oscillatory() const noexcept { return cycle.has_value(); }
};

/// RK4 integration from `start`. Stops when |rhs| < 1e-8 (converged) or t_probe is reached;
/// in the latter case upward crossings of p = mean(p) over the second half are used to
/// detect a cycle, with decaying amplitude rejected.
ProbeResult limit_cycle_probe(const PlanarSystem& sys, Vec2 start, double t_probe, double dt = 0.01);

/// Trajectory check of a classification: a stable point must attract starts at distance
/// 1e-3 back to within 1e-4; a saddle must let one of them leave the 1e-2 ball.
/// Other classes return true when no start converges back.
bool stability_consistent(const PlanarSystem& sys, const FixedPoint& fp, double t_max = 4000.0);

/// Smallest kick of p away from the rest point `rest` whose trajectory reaches p > level.
/// Searches [0, max_kick] by bisection; returns max_kick when even that does not fire.
double excitation_threshold(const PlanarSystem& sys, const FixedPoint& rest, double level = 0.8,
                            double max_kick = 1.0, double t_max = 400.0);

}  // namespace somite
