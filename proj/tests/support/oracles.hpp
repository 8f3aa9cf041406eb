#pragma once

// Reference computations written independently of the library: closed forms, hand
// stencils and scalar bisection. Tests compare library output against these.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Ghost-padded second difference, built by copying into a vector with explicit ghosts.
inline std::vector<double> laplacian(const std::vector<double>& f, double dx, bool zero_flux) {
  const std::size_t n = f.size();
  std::vector<double> g(n + 2);
  for (std::size_t i = 0; i < n; ++i) g[i + 1] = f[i];
  g[0] = zero_flux ? f[0] : 0.0;
  g[n + 1] = zero_flux ? f[n - 1] : 0.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (g[i] - 2.0 * g[i + 1] + g[i + 2]) / (dx * dx);
  return out;
}

// Roots of kappa u^2 - u + gamma = 0, ascending.
inline std::pair<double, double> quadratic_roots(double kappa, double gamma) {
  const double disc = std::sqrt(1.0 - 4.0 * kappa * gamma);
  return {(1.0 - disc) / (2.0 * kappa), (1.0 + disc) / (2.0 * kappa)};
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All sign changes of f on a uniform sampling of [lo, hi], each refined by bisection.
inline std::vector<double> all_roots(const std::function<double(double)>& f, double lo, double hi, int samples = 20000) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = lo + (hi - lo) * i / samples;
    const double f1 = f(x1);
    if (std::isfinite(f0) && std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0)) roots.push_back(bisect(f, x0, x1));
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// FHN lattice kinetics, cubic c(u) = u (u - a)(1 - u) and its derivative.
struct Fhn {
  double tau1 = 0.588, tau2 = 32.1, alpha = 0.4, beta = 0.33;

  double c(double u) const { return u * (u - alpha) * (1.0 - u); }
  double dc(double u) const { return -3.0 * u * u + 2.0 * (1.0 + alpha) * u - alpha; }
  // Fixed points lie on u = v with c(u) = gamma (u - beta).
  // Trace zero: dc/(gamma tau1) = 1/tau2.  Determinant zero: dc = gamma.
  std::vector<double> hopf_gammas() const {
    const double r = tau2 / tau1;
    std::vector<double> out;
    for (double u : all_roots([&](double u) { return c(u) - dc(u) * r * (u - beta); }, -0.5, 1.5)) {
      const double g = dc(u) * r;
      if (g > 0.0) out.push_back(g);
    }
    return out;
  }
  std::vector<double> saddle_node_gammas() const {
    std::vector<double> out;
    for (double u : all_roots([&](double u) { return c(u) - dc(u) * (u - beta); }, -0.5, 1.5)) {
      const double g = dc(u);
      if (g > 0.0) out.push_back(g);
    }
    return out;
  }
};

// Saddle-node values of alpha at fixed gamma: solve the fixed-point equation for alpha as a
// function of u, then the determinant condition dc = gamma in u.
inline std::vector<double> fhn_saddle_node_alphas(double gamma, double beta) {
  auto alpha_of = [&](double u) { return (u * u * (1.0 - u) - gamma * (u - beta)) / (u * (1.0 - u)); };
  auto det = [&](double u) {
    const double a = alpha_of(u);
    return -3.0 * u * u + 2.0 * (1.0 + a) * u - a - gamma;
  };
  std::vector<double> out;
  for (double u : all_roots(det, 1e-3, 1.0 - 1e-3)) out.push_back(alpha_of(u));
  return out;
}

// Prototype FhN equilibrium: v - v^3/3 - (v + a)/b + I = 0 (single real root for Fig. 14 values).
inline std::pair<double, double> fhn_proto_rest(double I, double a, double b) {
  const auto roots = all_roots([&](double v) { return v - v * v * v / 3.0 - (v + a) / b + I; }, -3.0, 3.0);
  const double v = roots.front();
  return {v, (v + a) / b};
}

// PORD pointwise kinetics with Phi(s) = s H(s). Equilibria: R = k3 A / ((1 + k3 A) mu) and
// s(A, R(A)) = mu A. Trace of the analytic Jacobian is ds/dA - 2 mu.
struct Pord {
  double k1, k2, k3, mu, beta;

  double R_eq(double A) const { return k3 * A / ((1.0 + k3 * A) * mu); }
  double num(double A, double R, double F) const { return k1 * A - k2 * R + F + beta; }
  double den(double A, double R, double F) const { return 1.0 + k1 * A + k2 * R + F + beta; }
  double s(double A, double R, double F) const {
    const double n = num(A, R, F);
    return n > 0.0 ? n / den(A, R, F) : 0.0;
  }
  std::vector<double> equilibria(double F) const {
    return all_roots([&](double A) { return s(A, R_eq(A), F) - mu * A; }, 1e-9, 1.0 / mu + 1.0);
  }
  double trace(double A, double F) const {
    const double R = R_eq(A);
    const double n = num(A, R, F), d = den(A, R, F);
    const double dsdA = n > 0.0 ? (k1 * d - n * k1) / (d * d) : 0.0;
    return dsdA - 2.0 * mu;
  }
};

// Brute-force count of maximal runs at or above the threshold.
inline std::size_t count_runs(const std::vector<double>& row, double threshold) {
  std::size_t n = 0;
  bool in = false;
  for (double v : row) {
    const bool above = v >= threshold;
    if (above && !in) ++n;
    in = above;
  }
  return n;
}

// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  const auto p = std::filesystem::temp_directory_path() / ("somite_" + tag + "_" + std::to_string(rd()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
