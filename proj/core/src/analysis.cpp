#include "somite/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "somite/error.hpp"

namespace somite {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr double kResidualTol = 1e-10;
constexpr double kDedupRadius = 1e-6;

double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double dist(const FixedPoint& a, const FixedPoint& b) { return std::hypot(a.p - b.p, a.q - b.q); }

Mat2 jacobian_with_step(const PlanarSystem& sys, double p, double q, double rel) {
  const double hp = rel * (1.0 + std::abs(p));
  const double hq = rel * (1.0 + std::abs(q));
  const Vec2 fp1 = sys(p + hp, q), fm1 = sys(p - hp, q);
  const Vec2 fp2 = sys(p, q + hq), fm2 = sys(p, q - hq);
  Mat2 j{};
  for (int r = 0; r < 2; ++r) {
    j[r][0] = (fp1[r] - fm1[r]) / (2.0 * hp);
    j[r][1] = (fp2[r] - fm2[r]) / (2.0 * hq);
  }
  return j;
}

double trace(const Mat2& j) { return j[0][0] + j[1][1]; }
double det(const Mat2& j) { return j[0][0] * j[1][1] - j[0][1] * j[1][0]; }

FixedPoint make_fixed_point(const PlanarSystem& sys, double p, double q) {
  FixedPoint fp;
  fp.p = p;
  fp.q = q;
  fp.jacobian = jacobian(sys, p, q);
  fp.eigenvalues = eigenvalues(fp.jacobian);
  fp.cls = classify(fp.jacobian);
  fp.residual = norm_inf(sys(p, q));
  return fp;
}

// Solves the 3x3 system a x = b by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b, std::array<double, 3>& x) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return true;
}

// Test function whose zero marks the bifurcation: trace for Hopf, determinant for saddle-node.
double test_function(const PlanarSystem& sys, double p, double q, BifurcationKind kind) {
  const Mat2 j = jacobian_with_step(sys, p, q, 1e-5);
  return kind == BifurcationKind::Hopf ? trace(j) : det(j);
}

struct Augmented {
  double p, q, param, residual;
};

// Newton on (p, q, param) for rhs = 0 together with the test function = 0.
std::optional<Augmented> polish(const PlanarFamily& family, double p, double q, double param, BifurcationKind kind) {
  auto G = [&](double pp, double qq, double lam) {
    const PlanarSystem sys = family(lam);
    const Vec2 f = sys(pp, qq);
    return std::array<double, 3>{f[0], f[1], test_function(sys, pp, qq, kind)};
  };
  std::array<double, 3> z{p, q, param};
  std::array<double, 3> g = G(z[0], z[1], z[2]);
  for (int it = 0; it < 40; ++it) {
    if (!std::isfinite(g[0] + g[1] + g[2])) return std::nullopt;
    if (std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])}) < 1e-13) break;
    std::array<std::array<double, 3>, 3> J{};
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-6 * (1.0 + std::abs(z[c]));
      auto zp = z, zm = z;
      zp[c] += h;
      zm[c] -= h;
      const auto gp = G(zp[0], zp[1], zp[2]);
      const auto gm = G(zm[0], zm[1], zm[2]);
      for (int r = 0; r < 3; ++r) J[r][c] = (gp[r] - gm[r]) / (2.0 * h);
    }
    std::array<double, 3> dz{};
    if (!solve3(J, {-g[0], -g[1], -g[2]}, dz)) return std::nullopt;
    z = {z[0] + dz[0], z[1] + dz[1], z[2] + dz[2]};
    g = G(z[0], z[1], z[2]);
    const double step = std::max({std::abs(dz[0]), std::abs(dz[1]), std::abs(dz[2])});
    if (step < 1e-14 * (1.0 + std::abs(z[2]))) break;
  }
  if (!std::isfinite(g[0] + g[1] + g[2])) return std::nullopt;
  const double res = std::abs(g[0]) + std::abs(g[1]) + std::abs(g[2]);
  if (std::max(std::abs(g[0]), std::abs(g[1])) > kResidualTol || std::abs(g[2]) > 1e-7) return std::nullopt;
  return Augmented{z[0], z[1], z[2], res};
}

BifurcationPoint make_point(const PlanarFamily& family, const std::string& param, BifurcationKind kind, double p,
                            double q, double value, double residual) {
  BifurcationPoint bp;
  bp.parameter = param;
  bp.kind = kind;
  bp.value = value;
  bp.p = p;
  bp.q = q;
  bp.residual = residual;
  bp.eigenvalues = eigenvalues(jacobian(family(value), p, q));
  return bp;
}

// Bisection of a sign change of the test function along a branch, then polishing.
std::optional<BifurcationPoint> refine_along_branch(const PlanarFamily& family, const std::string& param,
                                                    BifurcationKind kind, const BranchSample& a,
                                                    const BranchSample& b) {
  double pa = a.param, pb = b.param;
  FixedPoint fa = a.point, fb = b.point;
  double sa = test_function(family(pa), fa.p, fa.q, kind);
  while (std::abs(pb - pa) > 1e-9) {
    const double m = 0.5 * (pa + pb);
    const auto fm = newton(family(m), 0.5 * (fa.p + fb.p), 0.5 * (fa.q + fb.q));
    if (!fm) break;
    const double sm = test_function(family(m), fm->p, fm->q, kind);
    if ((sm > 0) == (sa > 0)) {
      pa = m;
      fa = *fm;
      sa = sm;
    } else {
      pb = m;
      fb = *fm;
    }
  }
  const double mid = 0.5 * (pa + pb);
  const auto pol = polish(family, 0.5 * (fa.p + fb.p), 0.5 * (fa.q + fb.q), mid, kind);
  const double lo = std::min(a.param, b.param), hi = std::max(a.param, b.param);
  const double slack = 1e-3 * (hi - lo) + 1e-9;
  if (pol && pol->param >= lo - slack && pol->param <= hi + slack) {
    return make_point(family, param, kind, pol->p, pol->q, pol->param, pol->residual);
  }
  if (std::abs(pb - pa) > 1e-6) return std::nullopt;
  const PlanarSystem sys = family(mid);
  const auto fm = newton(sys, fa.p, fa.q);
  const double p = fm ? fm->p : fa.p, q = fm ? fm->q : fa.q;
  return make_point(family, param, kind, p, q, mid,
                    norm_inf(sys(p, q)) + std::abs(test_function(sys, p, q, kind)));
}

// Two roots near the pair (x, y)? On success x, y are replaced by the new pair.
bool pair_exists(const PlanarSystem& sys, Vec2& x, Vec2& y) {
  const Vec2 mid{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
  const double sep = dist(x, y);
  const double radius = std::max(4.0 * sep, 1e-6);
  std::vector<FixedPoint> roots;
  for (const Vec2& s : {x, y, Vec2{2 * x[0] - mid[0], 2 * x[1] - mid[1]}, Vec2{2 * y[0] - mid[0], 2 * y[1] - mid[1]}}) {
    const auto r = newton(sys, s[0], s[1]);
    if (!r || std::hypot(r->p - mid[0], r->q - mid[1]) > radius) continue;
    bool dup = false;
    for (const auto& o : roots) dup = dup || dist(o, *r) < 1e-9;
    if (!dup) roots.push_back(*r);
  }
  if (roots.size() < 2) return false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (dist(roots[i], roots[j]) < best) {
        best = dist(roots[i], roots[j]);
        x = {roots[i].p, roots[i].q};
        y = {roots[j].p, roots[j].q};
      }
  return true;
}

// Fold between a parameter where the pair (x, y) exists and one where it does not.
std::optional<BifurcationPoint> refine_fold(const PlanarFamily& family, const std::string& param, double p_exists,
                                            double p_gone, Vec2 x, Vec2 y) {
  const double lo = std::min(p_exists, p_gone), hi = std::max(p_exists, p_gone);
  // Branches that merely failed to match across the step are not a fold: the pair is still
  // there, well separated, at p_gone. (Exactly at a fold Newton returns two nearly equal roots.)
  {
    Vec2 xg = x, yg = y;
    if (pair_exists(family(p_gone), xg, yg) && dist(xg, yg) > 0.1 * dist(x, y)) return std::nullopt;
  }
  double e = p_exists, n = p_gone;
  while (std::abs(e - n) > 1e-9) {
    const double m = 0.5 * (e + n);
    Vec2 xm = x, ym = y;
    if (pair_exists(family(m), xm, ym)) {
      e = m;
      x = xm;
      y = ym;
    } else {
      n = m;
    }
  }
  const Vec2 mid{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
  const auto pol = polish(family, mid[0], mid[1], e, BifurcationKind::SaddleNode);
  const double slack = 1e-3 * (hi - lo) + 1e-9;
  if (pol && pol->param >= lo - slack && pol->param <= hi + slack) {
    return make_point(family, param, BifurcationKind::SaddleNode, pol->p, pol->q, pol->param, pol->residual);
  }
  const PlanarSystem sys = family(e);
  return make_point(family, param, BifurcationKind::SaddleNode, mid[0], mid[1], e,
                    norm_inf(sys(mid[0], mid[1])) +
                        std::abs(test_function(sys, mid[0], mid[1], BifurcationKind::SaddleNode)));
}

// A branch that ends (or starts) alone: the grid value sat on the fold itself, so polish
// from its last point and keep the result only if it lies within the step.
std::optional<BifurcationPoint> fold_from_single(const PlanarFamily& family, const std::string& param, double at,
                                                 double other, Vec2 x) {
  const double lo = std::min(at, other), hi = std::max(at, other);
  const double slack = 1e-3 * (hi - lo) + 1e-9;
  const auto pol = polish(family, x[0], x[1], at, BifurcationKind::SaddleNode);
  if (!pol || pol->param < lo - slack || pol->param > hi + slack) return std::nullopt;
  return make_point(family, param, BifurcationKind::SaddleNode, pol->p, pol->q, pol->param, pol->residual);
}

// Pairs the given points greedily by distance; an odd one out is left in `pts`.
std::vector<std::pair<Vec2, Vec2>> closest_pairs(std::vector<Vec2>& pts) {
  std::vector<std::pair<Vec2, Vec2>> out;
  while (pts.size() >= 2) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (dist(pts[i], pts[j]) < best) {
          best = dist(pts[i], pts[j]);
          bi = i;
          bj = j;
        }
    out.emplace_back(pts[bi], pts[bj]);
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(bj));
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(bi));
  }
  return out;
}

}  // namespace

bool Window::contains(double p, double q, double margin) const noexcept {
  return p >= p_min - margin && p <= p_max + margin && q >= q_min - margin && q <= q_max + margin;
}

void Window::validate() const {
  if (!(p_max > p_min) || !(q_max > q_min)) fail(ErrorKind::Validation, "analysis window is degenerate");
}

std::string to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::StableNode: return "stable-node";
    case FixedPointClass::StableFocus: return "stable-focus";
    case FixedPointClass::UnstableNode: return "unstable-node";
    case FixedPointClass::UnstableFocus: return "unstable-focus";
    case FixedPointClass::Saddle: return "saddle";
    case FixedPointClass::Center: return "center";
  }
  return "unknown";
}

bool is_stable(FixedPointClass c) noexcept {
  return c == FixedPointClass::StableNode || c == FixedPointClass::StableFocus;
}

std::string to_string(BifurcationKind k) { return k == BifurcationKind::Hopf ? "hopf" : "saddle-node"; }

Mat2 jacobian(const PlanarSystem& sys, double p, double q) { return jacobian_with_step(sys, p, q, 1e-7); }

std::array<std::complex<double>, 2> eigenvalues(const Mat2& j) {
  const double tr = trace(j), dt = det(j);
  const std::complex<double> root = std::sqrt(std::complex<double>(tr * tr - 4.0 * dt, 0.0));
  return {0.5 * (tr - root), 0.5 * (tr + root)};
}

FixedPointClass classify(const Mat2& j) {
  const double tr = trace(j), dt = det(j);
  if (dt < 0.0) return FixedPointClass::Saddle;
  const double disc = tr * tr - 4.0 * dt;
  if (disc >= 0.0) return tr < 0.0 ? FixedPointClass::StableNode : FixedPointClass::UnstableNode;
  if (std::abs(tr) <= 1e-8 * std::sqrt(dt)) return FixedPointClass::Center;
  return tr < 0.0 ? FixedPointClass::StableFocus : FixedPointClass::UnstableFocus;
}

std::optional<FixedPoint> newton(const PlanarSystem& sys, double p, double q) {
  Vec2 f = sys(p, q);
  double r = norm_inf(f);
  for (int it = 0; it < kNewtonMaxIter && r > 1e-14; ++it) {
    if (!std::isfinite(r)) return std::nullopt;
    const Mat2 j = jacobian(sys, p, q);
    const double d = det(j);
    if (!std::isfinite(d) || std::abs(d) < 1e-300) return std::nullopt;
    const double dp = -(j[1][1] * f[0] - j[0][1] * f[1]) / d;
    const double dq = -(-j[1][0] * f[0] + j[0][0] * f[1]) / d;
    // Backtrack while the residual grows.
    double lambda = 1.0;
    Vec2 fn{};
    double rn = 0.0;
    for (int k = 0; k < 12; ++k) {
      fn = sys(p + lambda * dp, q + lambda * dq);
      rn = norm_inf(fn);
      if (std::isfinite(rn) && rn < r) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(rn) || !(rn < r)) break;
    p += lambda * dp;
    q += lambda * dq;
    f = fn;
    r = rn;
  }
  if (!std::isfinite(r) || r >= kResidualTol) return std::nullopt;
  return make_fixed_point(sys, p, q);
}

std::vector<FixedPoint> find_fixed_points(const PlanarSystem& sys, const Window& window, int seed_grid_n,
                                          const std::vector<Vec2>& extra_seeds) {
  if (seed_grid_n < 8) fail(ErrorKind::Validation, "seed_grid_n must be >= 8");
  window.validate();
  std::vector<Vec2> seeds = extra_seeds;
  for (int i = 0; i < seed_grid_n; ++i)
    for (int k = 0; k < seed_grid_n; ++k)
      seeds.push_back({window.p_min + (window.p_max - window.p_min) * i / (seed_grid_n - 1),
                       window.q_min + (window.q_max - window.q_min) * k / (seed_grid_n - 1)});
  const double margin = 1e-9 * std::hypot(window.p_max - window.p_min, window.q_max - window.q_min);
  std::vector<FixedPoint> roots;
  auto accept = [&](const std::optional<FixedPoint>& r) {
    if (!r || !window.contains(r->p, r->q, margin)) return false;
    for (const auto& o : roots)
      if (dist(o, *r) < kDedupRadius) return false;
    roots.push_back(*r);
    return true;
  };
  for (const Vec2& s : seeds) accept(newton(sys, s[0], s[1]));

  // Roots closer together than the lattice spacing: seed around every root found so far at
  // offsets of 1e-4 .. 1e-1 of the window span along each axis.
  const double sp = window.p_max - window.p_min, sq = window.q_max - window.q_min;
  for (std::size_t next = 0; next < roots.size(); ++next) {
    const FixedPoint r = roots[next];
    for (double scale = 1e-4; scale < 0.5; scale *= 10.0) {
      for (const auto& d : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}})
        accept(newton(sys, r.p + d[0] * scale * sp, r.q + d[1] * scale * sq));
    }
  }
  std::sort(roots.begin(), roots.end(), [](const FixedPoint& a, const FixedPoint& b) {
    return a.p != b.p ? a.p < b.p : a.q < b.q;
  });
  return roots;
}

namespace {

// Zero-level polylines of one sampled component; values[k * n + i] is the sample at (p_i, q_k).
std::vector<Polyline> march(const std::vector<double>& values, int n, const Window& w) {
  const auto px = [&](int i) { return w.p_min + (w.p_max - w.p_min) * i / (n - 1); };
  const auto qy = [&](int k) { return w.q_min + (w.q_max - w.q_min) * k / (n - 1); };
  const auto val = [&](int i, int k) { return values[static_cast<std::size_t>(k) * n + i]; };
  const auto pos = [&](int i, int k) { return val(i, k) >= 0.0; };

  // Edge ids: horizontal edge from node (i,k) to (i+1,k) is 2*(k*n+i), vertical to (i,k+1) is 2*(k*n+i)+1.
  std::map<long, Vec2> point;
  auto edge_point = [&](long id) -> Vec2 {
    auto it = point.find(id);
    if (it != point.end()) return it->second;
    const long node = id / 2;
    const int i = static_cast<int>(node % n), k = static_cast<int>(node / n);
    const double f0 = val(i, k);
    Vec2 v;
    if (id % 2 == 0) {
      const double f1 = val(i + 1, k);
      const double t = f0 / (f0 - f1);
      v = {px(i) + t * (px(i + 1) - px(i)), qy(k)};
    } else {
      const double f1 = val(i, k + 1);
      const double t = f0 / (f0 - f1);
      v = {px(i), qy(k) + t * (qy(k + 1) - qy(k))};
    }
    point.emplace(id, v);
    return v;
  };

  std::vector<std::pair<long, long>> segs;
  for (int k = 0; k + 1 < n; ++k) {
    for (int i = 0; i + 1 < n; ++i) {
      const bool c0 = pos(i, k), c1 = pos(i + 1, k), c2 = pos(i + 1, k + 1), c3 = pos(i, k + 1);
      const long e0 = 2L * (k * n + i), e1 = 2L * (k * n + i + 1) + 1, e2 = 2L * ((k + 1) * n + i),
                 e3 = 2L * (k * n + i) + 1;
      std::vector<long> cut;
      if (c0 != c1) cut.push_back(e0);
      if (c1 != c2) cut.push_back(e1);
      if (c3 != c2) cut.push_back(e2);
      if (c0 != c3) cut.push_back(e3);
      if (cut.size() == 2) {
        segs.emplace_back(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const double centre = 0.25 * (val(i, k) + val(i + 1, k) + val(i + 1, k + 1) + val(i, k + 1));
        if ((centre >= 0.0) == c0) {
          segs.emplace_back(e0, e1);
          segs.emplace_back(e2, e3);
        } else {
          segs.emplace_back(e3, e0);
          segs.emplace_back(e1, e2);
        }
      }
    }
  }

  std::map<long, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    at[segs[s].first].push_back(s);
    at[segs[s].second].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  auto extend = [&](std::vector<long>& chain) {
    while (true) {
      const long end = chain.back();
      bool moved = false;
      for (std::size_t s : at[end]) {
        if (used[s]) continue;
        used[s] = true;
        chain.push_back(segs[s].first == end ? segs[s].second : segs[s].first);
        moved = true;
        break;
      }
      if (!moved) return;
    }
  };

  std::vector<Polyline> lines;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<long> fwd{segs[s].first, segs[s].second};
    extend(fwd);
    std::vector<long> back{segs[s].first};
    extend(back);
    std::vector<long> chain(back.rbegin(), back.rend());
    chain.insert(chain.end(), fwd.begin() + 1, fwd.end());
    Polyline line;
    for (long id : chain) {
      const Vec2 v = edge_point(id);
      if (line.empty() || dist(line.back(), v) > 1e-14) line.push_back(v);
    }
    if (line.size() >= 2) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Nullclines nullclines(const PlanarSystem& sys, const Window& window, int resolution) {
  window.validate();
  if (resolution < 32) fail(ErrorKind::Validation, "nullcline resolution must be >= 32");
  const int n = resolution;
  std::vector<double> fp(static_cast<std::size_t>(n) * n), fq(fp.size());
  bool p_zero = true, q_zero = true;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double p = window.p_min + (window.p_max - window.p_min) * i / (n - 1);
      const double q = window.q_min + (window.q_max - window.q_min) * k / (n - 1);
      const Vec2 f = sys(p, q);
      fp[static_cast<std::size_t>(k) * n + i] = f[0];
      fq[static_cast<std::size_t>(k) * n + i] = f[1];
      p_zero = p_zero && f[0] == 0.0;
      q_zero = q_zero && f[1] == 0.0;
    }
  }
  if (p_zero) fail(ErrorKind::Validation, "degenerate contour: d" + sys.p_name + "/dt is identically zero on the window");
  if (q_zero) fail(ErrorKind::Validation, "degenerate contour: d" + sys.q_name + "/dt is identically zero on the window");
  return {march(fp, n, window), march(fq, n, window)};
}

ScanResult scan_one_param(const PlanarFamily& family, const std::string& param, double from, double to, int n_steps,
                          const ScanOptions& options) {
  if (n_steps < 16) fail(ErrorKind::Validation, "scan needs n_steps >= 16");
  options.window.validate();
  const Window& w = options.window;
  const double diag = std::hypot(w.p_max - w.p_min, w.q_max - w.q_min);

  ScanResult result;
  std::vector<std::size_t> active;  // indices into result.branches
  std::vector<BifurcationPoint> found;

  for (int k = 0; k <= n_steps; ++k) {
    const double lam = from + (to - from) * k / n_steps;
    const PlanarSystem sys = family(lam);

    std::vector<Vec2> extra;
    std::vector<Vec2> predicted;
    std::vector<double> cap;
    for (std::size_t b : active) {
      const Branch& br = result.branches[b];
      const FixedPoint& last = br.back().point;
      Vec2 pred{last.p, last.q};
      double motion = 0.0;
      if (br.size() >= 2) {
        const FixedPoint& prev = br[br.size() - 2].point;
        pred = {2 * last.p - prev.p, 2 * last.q - prev.q};
        motion = dist(last, prev);
      }
      predicted.push_back(pred);
      cap.push_back(std::max(10.0 * motion, 0.02 * diag));
      extra.push_back({last.p, last.q});
      extra.push_back(pred);
    }
    const auto pts = find_fixed_points(sys, w, options.seed_grid_n, extra);
    if (pts.empty()) result.gaps.push_back(lam);

    // Greedy nearest-neighbour matching; ties go to the smaller branch then point index.
    struct Cand {
      double d;
      std::size_t b, pt;
    };
    std::vector<Cand> cands;
    for (std::size_t a = 0; a < active.size(); ++a) {
      // Newton continuation from the prediction also counts as a match, which keeps fast
      // branches near a fold attached.
      const auto cont = newton(sys, predicted[a][0], predicted[a][1]);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double d = dist(predicted[a], Vec2{pts[j].p, pts[j].q});
        const bool continued = cont && dist(*cont, pts[j]) < kDedupRadius && d <= 0.25 * diag;
        if (d <= cap[a] || continued) cands.push_back({d, a, j});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      if (x.d != y.d) return x.d < y.d;
      if (x.b != y.b) return x.b < y.b;
      return x.pt < y.pt;
    });
    std::vector<int> branch_to(active.size(), -1), point_to(pts.size(), -1);
    for (const Cand& c : cands) {
      if (branch_to[c.b] >= 0 || point_to[c.pt] >= 0) continue;
      branch_to[c.b] = static_cast<int>(c.pt);
      point_to[c.pt] = static_cast<int>(c.b);
    }

    std::vector<Vec2> ended, born;
    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < active.size(); ++a) {
      Branch& br = result.branches[active[a]];
      if (branch_to[a] < 0) {
        ended.push_back({br.back().point.p, br.back().point.q});
        continue;
      }
      const BranchSample prev = br.back();
      const BranchSample cur{lam, pts[static_cast<std::size_t>(branch_to[a])]};
      const double t0 = trace(prev.point.jacobian), t1 = trace(cur.point.jacobian);
      const double d0 = det(prev.point.jacobian), d1 = det(cur.point.jacobian);
      if ((d0 > 0) != (d1 > 0)) {
        if (auto bp = refine_along_branch(family, param, BifurcationKind::SaddleNode, prev, cur)) found.push_back(*bp);
      } else if (d0 > 0 && d1 > 0 && (t0 > 0) != (t1 > 0)) {
        if (auto bp = refine_along_branch(family, param, BifurcationKind::Hopf, prev, cur)) found.push_back(*bp);
      }
      br.push_back(cur);
      still.push_back(active[a]);
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (point_to[j] >= 0) continue;
      result.branches.push_back(Branch{BranchSample{lam, pts[j]}});
      still.push_back(result.branches.size() - 1);
      if (k > 0) born.push_back({pts[j].p, pts[j].q});
    }
    active = std::move(still);

    if (k > 0) {
      const double prev_lam = from + (to - from) * (k - 1) / n_steps;
      for (auto& [x, y] : closest_pairs(ended))
        if (auto bp = refine_fold(family, param, prev_lam, lam, x, y)) found.push_back(*bp);
      for (auto& [x, y] : closest_pairs(born))
        if (auto bp = refine_fold(family, param, lam, prev_lam, x, y)) found.push_back(*bp);
      for (const Vec2& x : ended)
        if (auto bp = fold_from_single(family, param, prev_lam, lam, x)) found.push_back(*bp);
      for (const Vec2& x : born)
        if (auto bp = fold_from_single(family, param, lam, prev_lam, x)) found.push_back(*bp);
    }
  }

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  for (const auto& bp : found) {
    bool dup = false;
    for (const auto& o : result.points)
      dup = dup || (o.kind == bp.kind && std::abs(o.value - bp.value) < 1e-6 &&
                    std::hypot(o.p - bp.p, o.q - bp.q) < 1e-4 * (1.0 + diag));
    if (!dup) result.points.push_back(bp);
  }
  return result;
}

CuspTrace cusp_trace(const PlanarFamily2& family, const std::string& param_a, double a_from, double a_to, int n_a,
                     const std::string& param_b, double b_from, double b_to, int n_b, const ScanOptions& options) {
  if (n_a < 2) fail(ErrorKind::Validation, "cusp trace needs at least 2 values of " + param_a);
  options.window.validate();
  CuspTrace trace_out;

  struct Row {
    double a;
    std::vector<BifurcationPoint> sn;
  };
  std::vector<Row> rows;
  for (int i = 0; i <= n_a; ++i) {
    const double a = a_from + (a_to - a_from) * i / n_a;
    const PlanarFamily fam = [&family, a](double b) { return family(a, b); };
    const auto scan = scan_one_param(fam, param_b, b_from, b_to, n_b, options);
    Row row{a, {}};
    for (const auto& bp : scan.points)
      if (bp.kind == BifurcationKind::SaddleNode) row.sn.push_back(bp);
    if (row.sn.size() >= 2) {
      trace_out.lower.push_back({a, row.sn.front().value});
      trace_out.upper.push_back({a, row.sn.back().value});
    } else {
      trace_out.partial = true;
    }
    rows.push_back(std::move(row));
  }

  std::optional<CuspPoint> best;
  auto consider = [&](double a, double b1, double b2) {
    const double sep = std::abs(b2 - b1);
    if (!best || sep < best->separation) best = CuspPoint{a, 0.5 * (b1 + b2), sep};
  };
  for (const auto& r : rows)
    if (r.sn.size() >= 2) consider(r.a, r.sn.front().value, r.sn.back().value);

  // Continue the outermost pair from the last row that resolves it, stepping in a while the
  // two folds stay distinct, then bisect the step where they merge.
  auto pair_at = [&](double a, BifurcationPoint& lo, BifurcationPoint& hi) {
    const PlanarFamily fam = [&family, a](double b) { return family(a, b); };
    const auto l = polish(fam, lo.p, lo.q, lo.value, BifurcationKind::SaddleNode);
    const auto h = polish(fam, hi.p, hi.q, hi.value, BifurcationKind::SaddleNode);
    const bool distinct =
        l && h && std::abs(l->param - h->param) > 1e-10 && std::hypot(l->p - h->p, l->q - h->q) > 1e-8;
    if (distinct) {
      lo.p = l->p, lo.q = l->q, lo.value = l->param;
      hi.p = h->p, hi.q = h->q, hi.value = h->param;
    }
    return distinct;
  };
  const double a_step = (a_to - a_from) / n_a;
  const double a_lo = std::min(a_from, a_to), a_hi = std::max(a_from, a_to);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const bool gi = rows[i].sn.size() >= 2, gj = rows[i + 1].sn.size() >= 2;
    if (gi == gj) continue;
    const Row& good = gi ? rows[i] : rows[i + 1];
    const double dir = gi ? a_step : -a_step;
    double a_good = good.a;
    BifurcationPoint lo = good.sn.front(), hi = good.sn.back();
    double a_bad = a_good + dir;
    while (a_bad >= a_lo - 1e-12 && a_bad <= a_hi + 1e-12) {
      BifurcationPoint l2 = lo, h2 = hi;
      if (!pair_at(a_bad, l2, h2)) break;
      a_good = a_bad;
      lo = l2, hi = h2;
      a_bad += dir;
    }
    if (a_bad < a_lo - 1e-12 || a_bad > a_hi + 1e-12) {
      consider(a_good, lo.value, hi.value);
      continue;
    }
    while (std::abs(a_good - a_bad) > 1e-7) {
      const double m = 0.5 * (a_good + a_bad);
      BifurcationPoint l2 = lo, h2 = hi;
      if (pair_at(m, l2, h2)) {
        a_good = m;
        lo = l2, hi = h2;
      } else {
        a_bad = m;
      }
    }
    consider(a_good, lo.value, hi.value);
  }
  trace_out.cusp = best;
  return trace_out;
}

namespace {

Vec2 rk4(const PlanarSystem& sys, Vec2 x, double h) {
  const Vec2 k1 = sys(x[0], x[1]);
  const Vec2 k2 = sys(x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]);
  const Vec2 k3 = sys(x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]);
  const Vec2 k4 = sys(x[0] + h * k3[0], x[1] + h * k3[1]);
  return {x[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          x[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

}  // namespace

ProbeResult limit_cycle_probe(const PlanarSystem& sys, Vec2 start, double t_probe, double dt) {
  if (!(t_probe > 0.0)) fail(ErrorKind::Validation, "t_probe must be > 0");
  if (!(dt > 0.0)) fail(ErrorKind::Validation, "probe dt must be > 0");
  ProbeResult out;
  out.p_range = {start[0], start[0]};
  out.q_range = {start[1], start[1]};
  const auto steps = static_cast<std::size_t>(std::ceil(t_probe / dt));
  std::vector<double> ps{start[0]}, qs{start[1]};
  ps.reserve(steps + 1);
  qs.reserve(steps + 1);
  Vec2 x = start;
  for (std::size_t n = 1; n <= steps; ++n) {
    x = rk4(sys, x, dt);
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) break;
    ps.push_back(x[0]);
    qs.push_back(x[1]);
    out.p_range = {std::min(out.p_range[0], x[0]), std::max(out.p_range[1], x[0])};
    out.q_range = {std::min(out.q_range[0], x[1]), std::max(out.q_range[1], x[1])};
    out.t_elapsed = static_cast<double>(n) * dt;
    if (norm_inf(sys(x[0], x[1])) < 1e-8) {
      const auto fp = newton(sys, x[0], x[1]);
      out.converged_to = fp ? *fp : make_fixed_point(sys, x[0], x[1]);
      return out;
    }
  }

  // Upward crossings of the mean of p over the second half.
  const std::size_t half = ps.size() / 2;
  if (ps.size() < 4) return out;
  const double mean = std::accumulate(ps.begin() + static_cast<std::ptrdiff_t>(half), ps.end(), 0.0) /
                      static_cast<double>(ps.size() - half);
  std::vector<double> times;
  std::vector<std::size_t> index;
  for (std::size_t n = half + 1; n < ps.size(); ++n) {
    if (ps[n - 1] < mean && ps[n] >= mean) {
      const double frac = (mean - ps[n - 1]) / (ps[n] - ps[n - 1]);
      times.push_back((static_cast<double>(n - 1) + frac) * dt);
      index.push_back(n);
    }
  }
  if (times.size() < 6) return out;
  const std::size_t m = times.size();
  std::vector<double> amps;
  for (std::size_t r = m - 6; r + 1 < m; ++r) {
    const auto b = ps.begin() + static_cast<std::ptrdiff_t>(index[r]);
    const auto e = ps.begin() + static_cast<std::ptrdiff_t>(index[r + 1]);
    const auto [lo, hi] = std::minmax_element(b, e);
    amps.push_back(0.5 * (*hi - *lo));
  }
  if (amps.back() < 1e-6) return out;
  if (amps.back() < 0.95 * amps.front()) return out;  // still spiralling in
  out.cycle = Cycle{(times[m - 1] - times[m - 6]) / 5.0, amps.back()};
  return out;
}

bool stability_consistent(const PlanarSystem& sys, const FixedPoint& fp, double t_max) {
  const double r0 = 1e-3, dt = 0.01;
  const auto steps = static_cast<std::size_t>(t_max / dt);
  int returned = 0, escaped = 0;
  const int dirs = 8;
  for (int d = 0; d < dirs; ++d) {
    const double ang = 2.0 * M_PI * d / dirs;
    Vec2 x{fp.p + r0 * std::cos(ang), fp.q + r0 * std::sin(ang)};
    bool left = false, back = false;
    for (std::size_t n = 0; n < steps; ++n) {
      x = rk4(sys, x, dt);
      if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
        left = true;
        break;
      }
      const double r = std::hypot(x[0] - fp.p, x[1] - fp.q);
      if (r > 1e-2) {
        left = true;
        break;
      }
      if (r < 1e-5) {
        back = true;
        break;
      }
    }
    if (!back && !left) back = std::hypot(x[0] - fp.p, x[1] - fp.q) < 1e-4;
    returned += back ? 1 : 0;
    escaped += left ? 1 : 0;
  }
  if (is_stable(fp.cls)) return returned == dirs;
  if (fp.cls == FixedPointClass::Saddle) return escaped > 0;
  if (fp.cls == FixedPointClass::Center) return true;
  return returned == 0;
}

double excitation_threshold(const PlanarSystem& sys, const FixedPoint& rest, double level, double max_kick,
                            double t_max) {
  const double dt = 0.01;
  const auto steps = static_cast<std::size_t>(t_max / dt);
  auto fires = [&](double kick) {
    Vec2 x{rest.p + kick, rest.q};
    for (std::size_t n = 0; n < steps; ++n) {
      if (x[0] > level) return true;
      x = rk4(sys, x, dt);
      if (!std::isfinite(x[0])) return false;
    }
    return x[0] > level;
  };
  if (fires(0.0)) return 0.0;
  if (!fires(max_kick)) return max_kick;
  double lo = 0.0, hi = max_kick;
  while (hi - lo > 1e-6) {
    const double m = 0.5 * (lo + hi);
    (fires(m) ? hi : lo) = m;
  }
  return hi;
}

}  // namespace somite
