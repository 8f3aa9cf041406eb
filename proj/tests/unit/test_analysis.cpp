#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "somite/analysis.hpp"
#include "somite/error.hpp"
#include "somite/planar.hpp"
#include "somite/presets.hpp"

using namespace somite;

namespace {

PlanarSystem linear(double a, double b) {
  return {[a, b](double p, double q) { return Vec2{a * p, b * q}; }};
}

CW2Params region_params() {
  CW2Params p;
  p.gamma = 1e-3;
  p.kappa = 10.0;
  p.k = 1.0;
  return p;
}

std::vector<double> values_of(const ScanResult& r, BifurcationKind kind) {
  std::vector<double> out;
  for (const auto& b : r.points)
    if (b.kind == kind) out.push_back(b.value);
  return out;
}

void check_matches(std::vector<double> got, std::vector<double> want, double tol) {
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < tol);
}

void check_bifurcation_invariants(const ScanResult& r) {
  for (const auto& b : r.points) {
    if (b.kind == BifurcationKind::Hopf) {
      CHECK(std::abs(b.eigenvalues[0].real()) < 1e-6);
      CHECK(std::abs(b.eigenvalues[0].imag()) > 0.0);
    } else {
      CHECK(std::min(std::abs(b.eigenvalues[0]), std::abs(b.eigenvalues[1])) < 1e-6);
    }
  }
  for (const auto& br : r.branches)
    for (const auto& s : br) CHECK(s.point.residual < 1e-10);
}

}  // namespace

TEST_CASE("nullclines of the FHN and prototype kinetics") {
  const auto fhn = planar_system(FHNParams{}, Frozen{});
  const auto n = nullclines(fhn, {-0.5, 1.5, -0.5, 1.5}, 64);
  REQUIRE_FALSE(n.q_nullcline.empty());
  std::size_t pts = 0;
  for (const auto& line : n.q_nullcline)
    for (const auto& pt : line) {
      CHECK(std::abs(pt[0] - pt[1]) < 1e-9);
      ++pts;
    }
  CHECK(pts > 32);

  const FHNProtoParams pp;
  const auto proto = nullclines(planar_system(pp, Frozen{}), {-2.5, 2.5, -1.5, 2.5}, 200);
  for (const auto& line : proto.q_nullcline)
    for (const auto& pt : line) CHECK(std::abs(pt[1] - (pt[0] + pp.a) / pp.b) < 1e-9);

  // Cubic v-nullcline w = v - v^3/3 + 0.5 with turning points at v = -1 and v = 1.
  const double cell = 5.0 / 199.0;
  REQUIRE(proto.p_nullcline.size() >= 1);
  std::vector<Vec2> all;
  for (const auto& line : proto.p_nullcline)
    for (const auto& pt : line) {
      CHECK(std::abs(pt[1] - (pt[0] - pt[0] * pt[0] * pt[0] / 3.0 + 0.5)) < 0.02);
      all.push_back(pt);
    }
  std::sort(all.begin(), all.end());
  std::vector<double> turns;
  for (std::size_t i = 1; i + 1 < all.size(); ++i) {
    const double l = all[i][1] - all[i - 1][1], r = all[i + 1][1] - all[i][1];
    if (l * r < 0.0) turns.push_back(all[i][0]);
  }
  REQUIRE(turns.size() == 2);
  CHECK(std::abs(turns[0] + 1.0) < 2 * cell);
  CHECK(std::abs(turns[1] - 1.0) < 2 * cell);

  const PlanarSystem flat{[](double p, double) { return Vec2{0.0, p}; }};
  CHECK_THROWS_AS(nullclines(flat, {0, 1, 0, 1}, 64), Error);
  CHECK_THROWS_AS(nullclines(fhn, {0, 1, 0, 1}, 16), Error);
  CHECK_THROWS_AS(nullclines(fhn, {1, 0, 0, 1}, 64), Error);
}

TEST_CASE("clock-and-wavefront region II and III equilibria") {
  const auto p = region_params();
  const auto [lo, hi] = oracle::quadratic_roots(p.kappa, p.gamma);

  const auto sys2 = planar_system(p, Frozen{1.0, 0.0});
  const auto fps = find_fixed_points(sys2, default_window(p), 10);
  REQUIRE(fps.size() == 3);
  const double want[3] = {0.0, lo, hi};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(fps[i].p - want[i]) < 1e-4);
    CHECK(std::abs(fps[i].q) < 1e-9);
    CHECK(fps[i].residual < 1e-10);
    CHECK(stability_consistent(sys2, fps[i]));
  }
  CHECK(is_stable(fps[0].cls));
  CHECK(fps[1].cls == FixedPointClass::Saddle);
  CHECK(is_stable(fps[2].cls));

  const auto sys3 = planar_system(p, Frozen{1.0, 1.0});
  const auto one = find_fixed_points(sys3, default_window(p), 10);
  REQUIRE(one.size() == 1);
  CHECK(is_stable(one[0].cls));
  CHECK(one[0].residual < 1e-10);
  // On the v-nullcline v = 1/(eps + u).
  CHECK(one[0].q == doctest::Approx(1.0 / (p.epsilon + one[0].p)).epsilon(1e-9));
  CHECK(stability_consistent(sys3, one[0]));
}

TEST_CASE("linear node and classification table") {
  const auto fps = find_fixed_points(linear(-1.0, -1.0), {-1, 1, -1, 1}, 8);
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].cls == FixedPointClass::StableNode);
  CHECK(fps[0].eigenvalues[0].real() == doctest::Approx(-1.0));
  CHECK(fps[0].eigenvalues[1].real() == doctest::Approx(-1.0));
  CHECK(std::abs(fps[0].p) < 1e-12);

  CHECK(classify({{{1, 0}, {0, -2}}}) == FixedPointClass::Saddle);
  CHECK(classify({{{2, 0}, {0, 1}}}) == FixedPointClass::UnstableNode);
  CHECK(classify({{{-0.1, 1}, {-1, -0.1}}}) == FixedPointClass::StableFocus);
  CHECK(classify({{{0.1, 1}, {-1, 0.1}}}) == FixedPointClass::UnstableFocus);
  CHECK(classify({{{0, 1}, {-1, 0}}}) == FixedPointClass::Center);
  CHECK_THROWS_AS(find_fixed_points(linear(-1, -1), {-1, 1, -1, 1}, 4), Error);
  CHECK(find_fixed_points(linear(-1, -1), {2, 3, 2, 3}, 8).empty());
}

TEST_CASE("saddle-node normal form") {
  const PlanarFamily family = [](double mu) {
    return PlanarSystem{[mu](double p, double q) { return Vec2{mu - p * p, -q}; }};
  };
  ScanOptions opt;
  opt.window = {-2, 2, -1, 1};
  const auto up = scan_one_param(family, "mu", -1.0, 1.0, 40, opt);
  const auto sn = values_of(up, BifurcationKind::SaddleNode);
  REQUIRE(sn.size() == 1);
  CHECK(std::abs(sn[0]) < 1e-6);
  CHECK(values_of(up, BifurcationKind::Hopf).empty());
  CHECK_FALSE(up.gaps.empty());  // no equilibria for mu < 0

  const auto down = scan_one_param(family, "mu", 1.0, -1.0, 40, opt);
  const auto sn2 = values_of(down, BifurcationKind::SaddleNode);
  REQUIRE(sn2.size() == 1);
  CHECK(std::abs(sn2[0] - sn[0]) < 1e-5);
  CHECK_THROWS_AS(scan_one_param(family, "mu", -1.0, 1.0, 8, opt), Error);
}

TEST_CASE("FHN gamma scan against the closed-form Hopf and fold conditions") {
  const auto setup = fig15_setup();
  const oracle::Fhn ref{setup.params.tau1, setup.params.tau2, setup.params.alpha, setup.params.beta};
  const auto family = planar_family(setup.params, Frozen{}, "gamma");
  ScanOptions opt;
  opt.window = setup.window;
  const auto r = scan_one_param(family, "gamma", setup.gamma_from, setup.gamma_to, setup.gamma_steps, opt);

  std::vector<double> want_h, want_sn;
  for (double g : ref.hopf_gammas())
    if (g > setup.gamma_from && g < setup.gamma_to) want_h.push_back(g);
  for (double g : ref.saddle_node_gammas())
    if (g > setup.gamma_from && g < setup.gamma_to) want_sn.push_back(g);
  REQUIRE_FALSE(want_h.empty());
  check_matches(values_of(r, BifurcationKind::Hopf), want_h, 1e-5);
  check_matches(values_of(r, BifurcationKind::SaddleNode), want_sn, 1e-5);
  check_bifurcation_invariants(r);

  const auto back = scan_one_param(family, "gamma", setup.gamma_to, setup.gamma_from, setup.gamma_steps, opt);
  check_matches(values_of(back, BifurcationKind::Hopf), values_of(r, BifurcationKind::Hopf), 1e-5);
  check_matches(values_of(back, BifurcationKind::SaddleNode), values_of(r, BifurcationKind::SaddleNode), 1e-5);
}

TEST_CASE("FHN alpha scan against the closed-form fold condition") {
  const auto setup = fig15_setup();
  Frozen frozen;
  frozen.gamma = setup.alpha_at_gamma;
  const auto family = planar_family(setup.params, frozen, "alpha");
  ScanOptions opt;
  opt.window = setup.window;
  const auto r = scan_one_param(family, "alpha", setup.alpha_from, setup.alpha_to, setup.alpha_steps, opt);
  std::vector<double> want;
  for (double a : oracle::fhn_saddle_node_alphas(setup.alpha_at_gamma, setup.params.beta))
    if (a > setup.alpha_from && a < setup.alpha_to) want.push_back(a);
  REQUIRE_FALSE(want.empty());
  check_matches(values_of(r, BifurcationKind::SaddleNode), want, 1e-5);
  check_bifurcation_invariants(r);
}

TEST_CASE("PORD F scan against the analytic trace") {
  const auto setup = fig12_setup();
  const auto& p = setup.params;
  const oracle::Pord ref{p.k1, p.k2, p.k3, p.mu, p.beta};
  // Along the (unique) equilibrium the trace changes sign where the Hopf sits.
  auto trace_at = [&](double F) {
    const auto eq = ref.equilibria(F);
    return eq.size() == 1 ? ref.trace(eq[0], F) : std::nan("");
  };
  std::vector<double> want;
  double prev = trace_at(setup.F_to);
  const int n = 400;
  for (int i = 1; i <= n; ++i) {
    const double a = setup.F_to + (setup.F_from - setup.F_to) * (i - 1) / n;
    const double b = setup.F_to + (setup.F_from - setup.F_to) * i / n;
    const double cur = trace_at(b);
    if ((prev < 0.0) != (cur < 0.0)) want.push_back(oracle::bisect(trace_at, a, b));
    prev = cur;
  }
  REQUIRE_FALSE(want.empty());

  ScanOptions opt;
  opt.window = setup.window;
  const auto r = scan_one_param(planar_family(p, Frozen{}, "F"), "F", setup.F_from, setup.F_to, setup.F_steps, opt);
  check_matches(values_of(r, BifurcationKind::Hopf), want, 1e-5);
  check_bifurcation_invariants(r);
}

TEST_CASE("cusp normal form") {
  const PlanarFamily2 family = [](double a, double b) {
    return PlanarSystem{[a, b](double p, double q) { return Vec2{b + a * p - p * p * p, -q}; }};
  };
  ScanOptions opt;
  opt.window = {-2, 2, -1, 1};
  const auto trace = cusp_trace(family, "a", -0.2, 1.0, 25, "b", -1.0, 1.0, 60, opt);
  REQUIRE(trace.lower.size() >= 5);
  REQUIRE(trace.upper.size() >= 5);
  for (const auto& pt : trace.upper) CHECK(std::abs(pt[1] - 2.0 * std::pow(pt[0] / 3.0, 1.5)) < 1e-5);
  for (const auto& pt : trace.lower) CHECK(std::abs(pt[1] + 2.0 * std::pow(pt[0] / 3.0, 1.5)) < 1e-5);
  // Equivalent form a = 3 (b/2)^(2/3) on the upper branch.
  for (const auto& pt : trace.upper)
    if (pt[1] > 0.0) CHECK(std::abs(pt[0] - 3.0 * std::pow(pt[1] / 2.0, 2.0 / 3.0)) < 1e-3);
  REQUIRE(trace.cusp.has_value());
  CHECK(std::abs(trace.cusp->a) < 1e-3);
  CHECK(std::abs(trace.cusp->b) < 1e-3);

  const auto none = cusp_trace(family, "a", -1.0, -0.5, 10, "b", -0.1, 0.1, 20, opt);
  CHECK(none.lower.empty());
  CHECK(none.upper.empty());
  CHECK_FALSE(none.cusp.has_value());
}

TEST_CASE("limit cycle probe") {
  const auto stable = limit_cycle_probe(linear(-1.0, -2.0), {0.7, -0.3}, 100.0);
  REQUIRE(stable.converged_to.has_value());
  CHECK(std::abs(stable.converged_to->p) < 1e-6);
  CHECK_FALSE(stable.oscillatory());

  const PlanarSystem rot{[](double p, double q) { return Vec2{q, -p}; }};
  const auto circle = limit_cycle_probe(rot, {1.0, 0.0}, 200.0);
  REQUIRE(circle.cycle.has_value());
  CHECK(std::abs(circle.cycle->period - 2.0 * std::numbers::pi) < 0.01 * 2.0 * std::numbers::pi);
  CHECK(circle.cycle->amplitude == doctest::Approx(1.0).epsilon(0.01));

  const FHNProtoParams pp = fhn_proto_params();
  const auto exc = limit_cycle_probe(planar_system(pp, Frozen{}), {0.0, 0.0}, 400.0);
  CHECK(exc.p_range[1] > 1.0);
}

TEST_CASE("consistency of classifications with trajectories") {
  const auto setup = fig15_setup();
  for (double g : {0.1, 0.18, 0.3}) {
    Frozen f;
    f.gamma = g;
    const auto sys = planar_system(setup.params, f);
    const auto fps = find_fixed_points(sys, setup.window, 10);
    REQUIRE_FALSE(fps.empty());
    for (const auto& fp : fps) {
      CHECK(fp.residual < 1e-10);
      CHECK(stability_consistent(sys, fp));
    }
  }
}

TEST_CASE("excitability decreases with alpha and increases with beta") {
  const auto setup = fig15_setup();
  auto threshold = [&](double alpha, double beta) {
    FHNParams p = setup.params;
    p.alpha = alpha;
    p.beta = beta;
    Frozen f;
    f.gamma = 0.1;
    const auto sys = planar_system(p, f);
    const auto fps = find_fixed_points(sys, setup.window, 10);
    const FixedPoint* rest = nullptr;
    for (const auto& fp : fps)
      if (is_stable(fp.cls) && (!rest || fp.p < rest->p)) rest = &fp;
    REQUIRE(rest != nullptr);
    return excitation_threshold(sys, *rest);
  };
  CHECK(threshold(0.3, 0.0) < threshold(0.4, 0.0));
  CHECK(threshold(0.4, 0.0) < threshold(0.5, 0.0));
  CHECK(threshold(0.4, 0.02) < threshold(0.4, 0.0));
}
