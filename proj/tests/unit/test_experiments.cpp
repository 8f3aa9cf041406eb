#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "somite/config.hpp"
#include "somite/error.hpp"
#include "somite/measure.hpp"
#include "somite/output.hpp"
#include "somite/presets.hpp"

using namespace somite;

namespace {

// The fig9 run takes several seconds; share it between cases.
const SpaceTimeRaster& fig9_raster() {
  static const SpaceTimeRaster r = execute_run(fig9_run()).raster;
  return r;
}

// Largest movement (in cells) of any band edge between each of the last `rows` rows and the final row.
std::size_t edge_motion(const Matrix& u, std::size_t rows, double threshold) {
  const std::size_t last = u.rows - 1;
  std::size_t worst = 0;
  for (std::size_t r = last - rows; r < last; ++r) {
    std::size_t moved = 0;
    for (std::size_t c = 0; c < u.cols; ++c) moved += (u(r, c) >= threshold) != (u(last, c) >= threshold);
    worst = std::max(worst, moved);
  }
  return worst;
}

}  // namespace

TEST_CASE("preset registry") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"fig8_collier", "fig9_baker", "fig12_pord_phase", "fig14_fhn_proto",
                                          "fig15_fhn_bifurcations", "fig17_fhn_waves", "fig18_wave_failure"});
  for (const auto& n : names) CHECK(get_preset(n).name == n);
  try {
    get_preset("fig99");
    FAIL("unknown preset accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    for (const auto& n : names) CHECK(std::string(e.what()).find(n) != std::string::npos);
  }
}

TEST_CASE("fig18 preset sweeps three couplings") {
  const auto p = get_preset("fig18_wave_failure");
  REQUIRE(p.runs.size() == 3);
  const double want[3] = {1e-3, 1e-4, 1e-5};
  for (int i = 0; i < 3; ++i) {
    const auto& run = p.runs[i];
    CHECK(get_parameter(run.model, "D") == want[i]);
    CHECK(run.grid.n_cells() == 101);
    CHECK(run.grid.dx() == doctest::Approx(0.01));
    CHECK(run.sim.dt == 0.01);
    CHECK(run.sim.steps() == 50000);
    CHECK(run.sim.boundary == BoundaryMode::ZeroPadded);
    CHECK(run.init.kind == InitKind::UniformRandom);
    CHECK(run.init.hi == 0.2);
  }
}

TEST_CASE("fig9 domain and raster shape") {
  const auto spec = fig9_run();
  CHECK(spec.grid.x0() == -5.0);
  CHECK(spec.grid.x_max() == doctest::Approx(15.0));
  CHECK(spec.sim.t_end == 25.0);
  const auto& r = fig9_raster();
  CHECK(r.species == std::vector<std::string>{"u", "v", "w"});
  CHECK(r.rows() == 501);
  CHECK(r.times.back() == doctest::Approx(25.0));
}

TEST_CASE("detect_stripes") {
  std::vector<double> xs(50);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 0.1 * i;
  CHECK(detect_stripes(std::vector<double>(50, 0.0), xs, 0.5).count() == 0);

  std::vector<double> row(50, 0.0);
  for (std::size_t i = 10; i < 20; ++i) row[i] = 1.0;
  const auto one = detect_stripes(row, xs, 0.5);
  REQUIRE(one.count() == 1);
  CHECK(one.stripes[0].width == doctest::Approx(10 * 0.1));
  CHECK(one.stripes[0].left == doctest::Approx(0.95));

  // Threshold monotonicity on a rough row.
  std::vector<double> rough(50);
  for (std::size_t i = 0; i < 50; ++i) rough[i] = 0.5 + 0.5 * std::sin(0.7 * i) * std::cos(0.13 * i);
  double prev = 1e300;
  for (double th = 0.05; th < 1.0; th += 0.05) {
    const auto rep = detect_stripes(rough, xs, th);
    CHECK(rep.total_length() <= prev + 1e-12);
    CHECK(rep.count() == oracle::count_runs(rough, th));
    for (std::size_t k = 1; k < rep.count(); ++k) CHECK(rep.stripes[k].left > rep.stripes[k - 1].right);
    prev = rep.total_length();
  }
}

TEST_CASE("fig9 final row stripe count matches a brute-force scan") {
  const auto& r = fig9_raster();
  const auto last = r["u"].row(r.rows() - 1);
  CHECK(detect_stripes(last, r.xs, 0.5).count() == oracle::count_runs(last, 0.5));
}

TEST_CASE("track_front") {
  SUBCASE("static profile") {
    Matrix m{30, 40, {}};
    std::vector<double> ts(30), xs(40);
    for (std::size_t c = 0; c < 40; ++c) xs[c] = 0.25 * c;
    for (std::size_t r = 0; r < 30; ++r) {
      ts[r] = r;
      for (std::size_t c = 0; c < 40; ++c) m.values.push_back(std::tanh(xs[c] - 4.0));
    }
    CHECK(std::abs(track_front(m, ts, xs, 0.0).speed) < 1e-9);
  }
  SUBCASE("smoothed travelling step") {
    const Grid1D g(401, 0.05);
    std::vector<double> ts, xs = g.coordinates();
    Matrix m{0, g.n_cells(), {}};
    for (double t = 0.0; t <= 40.0; t += 0.5) {
      ts.push_back(t);
      for (double x : xs) m.values.push_back(0.5 * (1.0 + std::tanh((x - 3.0 - 0.3 * t) / 0.2)));
      ++m.rows;
    }
    const auto tr = track_front(m, ts, xs, 0.5);
    CHECK(tr.rows_used == ts.size());
    CHECK(std::abs(tr.speed - 0.3) < 0.003);
  }
  SUBCASE("rows without a crossing are skipped") {
    Matrix m{2, 3, {0, 0, 0, 0, 1, 1}};
    const std::vector<double> ts{0, 1}, xs{0, 1, 2};
    const auto tr = track_front(m, ts, xs, 0.5);
    CHECK(std::isnan(tr.positions[0]));
    CHECK(tr.positions[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("fig9 front moves at the determination-front speed") {
  const auto& r = fig9_raster();
  CHECK(std::abs(fig9_front(r).speed - 0.5) <= 0.05);
}

TEST_CASE("clock-and-wavefront signal stays bounded") {
  const auto check = [](const SpaceTimeRaster& r, double eps) {
    const auto& v = r["v"];
    double v0 = 0.0;
    for (std::size_t c = 0; c < v.cols; ++c) v0 = std::max(v0, v(0, c));
    const double cap = std::max(v0, 1.0 / eps) + 1e-9;
    for (double x : v.values) CHECK_MESSAGE(x <= cap, "v exceeds its cap");
  };
  check(fig9_raster(), std::get<CW3Params>(fig9_run().model).epsilon);
  const auto fig8 = fig8_run();
  check(execute_run(fig8).raster, std::get<CW2Params>(fig8.model).epsilon);
}

TEST_CASE("pulse experiment null cases") {
  CW3Pulse zero{0.0, 7.5, 1.0};
  const auto z = pulse_perturbation_experiment(zero);
  CHECK(z.baseline.count() == z.perturbed.count());
  CHECK(z.mean_width_delta == 0.0);

  CW3Pulse outside{2.0, 100.0, 1.0};
  const auto o = pulse_perturbation_experiment(outside);
  REQUIRE(o.baseline.count() == o.perturbed.count());
  for (std::size_t i = 0; i < o.baseline.count(); ++i) {
    CHECK(o.baseline.stripes[i].left == o.perturbed.stripes[i].left);
    CHECK(o.baseline.stripes[i].right == o.perturbed.stripes[i].right);
  }
  CHECK_THROWS_AS(pulse_perturbation_experiment(CW3Pulse{-1.0, 7.5, 1.0}), Error);
}

TEST_CASE("PORD spatial run stays non-negative") {
  const auto spec = pord_spatial_run();
  CHECK(stability_guard(spec.model, spec.grid, spec.sim).ok);
  const auto r = execute_run(spec).raster;
  for (const auto& m : r.data)
    for (double x : m.values) CHECK_MESSAGE(x >= 0.0, "negative concentration");
}

TEST_CASE("fig17 band properties") {
  const double th = get_preset("fig17_fhn_waves").stripe_threshold;
  auto final_bands = [&](char which, std::size_t* motion) {
    const auto r = execute_run(fig17_run(which)).raster;
    const auto& u = r["u"];
    *motion = edge_motion(u, u.rows / 10, th);
    return detect_stripes(u.row(u.rows - 1), r.xs, th);
  };
  std::size_t ma = 0, mb = 0, mc = 0;
  const auto a = final_bands('a', &ma);
  const auto b = final_bands('b', &mb);
  const auto c = final_bands('c', &mc);
  CHECK(a.count() == 1);
  CHECK(ma == 0);
  CHECK(b.count() >= 1);
  CHECK(c.count() >= 1);
  CHECK(c.mean_width() > b.mean_width());
  CHECK_THROWS_AS(fig17_run('z'), Error);
}

TEST_CASE("preset manifests reproduce their artifacts") {
  const auto dir = oracle::scratch_dir("manifest");
  const auto res = run_preset("fig18_wave_failure", dir.string());
  CHECK(res.rasters.size() == 3);
  CHECK(std::count_if(res.files.begin(), res.files.end(), [](const std::string& f) { return f.ends_with(".csv"); }) == 3);
  CHECK(std::count_if(res.files.begin(), res.files.end(), [](const std::string& f) { return f.ends_with(".pgm"); }) == 3);
  REQUIRE(std::filesystem::exists(dir / "manifest.txt"));

  const auto doc = ConfigDocument::load((dir / "manifest.txt").string());
  const auto labels = doc.run_labels();
  REQUIRE(labels.size() == 3);
  const auto again = oracle::scratch_dir("manifest_rerun");
  for (const auto& label : labels) {
    const auto spec = run_spec_from_config(doc.section(label));
    const auto rerun = execute_run(spec, again.string());
    for (const auto& f : rerun.files) {
      const auto name = std::filesystem::path(f).filename().string();
      if (name == "manifest.txt") continue;
      const auto want = doc.get("manifest.checksum." + name);
      REQUIRE(want.has_value());
      CHECK(file_checksum(f) == *want);
    }
  }
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(again);
}
