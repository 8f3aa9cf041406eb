#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "somite/error.hpp"
#include "somite/grid.hpp"

using namespace somite;

TEST_CASE("grid coordinates and validation") {
  const Grid1D g(5, 0.25, -1.0);
  CHECK(g.n_cells() == 5);
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(4) == doctest::Approx(0.0));
  CHECK(g.coordinates().size() == 5);

  CHECK_THROWS_AS(Grid1D(1, 0.1), Error);
  CHECK_THROWS_AS(Grid1D(10, 0.0), Error);
  CHECK_THROWS_AS(Grid1D(10, -0.1), Error);

  const auto s = Grid1D::spanning(-5.0, 15.0, 0.05);
  CHECK(s.n_cells() == 401);
  CHECK(s.x_max() == doctest::Approx(15.0));
}

TEST_CASE("laplacian matches the hand stencil") {
  const Grid1D g3(3, 1.0);
  SUBCASE("constant under zero flux is zero") {
    const auto out = laplacian(std::vector<double>{3, 3, 3}, g3, BoundaryMode::ZeroFlux);
    for (double v : out) CHECK(v == 0.0);
  }
  SUBCASE("bump under zero flux") {
    const auto out = laplacian(std::vector<double>{0, 1, 0}, g3, BoundaryMode::ZeroFlux);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == -2.0);
    CHECK(out[2] == 1.0);
  }
  SUBCASE("constant under zero padding loses mass at the ends") {
    const Grid1D g(3, 0.01);
    const auto out = laplacian(std::vector<double>{1, 1, 1}, g, BoundaryMode::ZeroPadded);
    CHECK(out[0] == doctest::Approx(-10000.0));
    CHECK(out[1] == doctest::Approx(0.0));
    CHECK(out[2] == doctest::Approx(-10000.0));
  }
  SUBCASE("mismatched length") {
    CHECK_THROWS_AS(laplacian(std::vector<double>{1, 2}, g3, BoundaryMode::ZeroFlux), Error);
    try {
      laplacian(std::vector<double>{1, 2}, g3, BoundaryMode::ZeroFlux);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Dimension);
    }
  }
}

TEST_CASE("laplacian agrees with the ghost-vector oracle on random fields") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) * 7;
    std::vector<double> f(n);
    for (auto& v : f) v = u(rng);
    const Grid1D g(n, 0.03);
    for (bool zf : {true, false}) {
      const auto got = laplacian(f, g, zf ? BoundaryMode::ZeroFlux : BoundaryMode::ZeroPadded);
      const auto want = oracle::laplacian(f, 0.03, zf);
      for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero flux conserves mass and the stencil is linear") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid1D g(257, 0.01);
  std::vector<double> f(257), h(257);
  for (auto& v : f) v = u(rng);
  for (auto& v : h) v = u(rng);

  const auto lf = laplacian(f, g, BoundaryMode::ZeroFlux);
  const double mass = std::accumulate(lf.begin(), lf.end(), 0.0) * g.dx() * g.dx();
  CHECK(std::abs(mass) < 1e-12);

  const double a = 0.7, b = -1.3;
  std::vector<double> combo(257);
  for (std::size_t i = 0; i < 257; ++i) combo[i] = a * f[i] + b * h[i];
  for (auto mode : {BoundaryMode::ZeroFlux, BoundaryMode::ZeroPadded}) {
    const auto lc = laplacian(combo, g, mode);
    const auto l1 = laplacian(f, g, mode);
    const auto l2 = laplacian(h, g, mode);
    for (std::size_t i = 0; i < 257; ++i) {
      CHECK(std::abs(lc[i] - (a * l1[i] + b * l2[i])) * g.dx() * g.dx() < 1e-12);
    }
  }
}

TEST_CASE("heaviside") {
  CHECK(heaviside(0.0) == 1.0);
  CHECK(heaviside(-1.0) == 0.0);
  CHECK(heaviside(2.0) == 1.0);
  CHECK(heaviside(-1e-300) == 0.0);
  // Outputs lie in {0, 1}, and both are non-negative, so a second application always gives 1.
  for (double x : {-3.0, -1e-9, 0.0, 1e-9, 5.0}) {
    CHECK((heaviside(x) == 0.0 || heaviside(x) == 1.0));
    CHECK(heaviside(heaviside(x)) == 1.0);
  }
}
