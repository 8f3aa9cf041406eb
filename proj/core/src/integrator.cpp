#include "somite/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace somite {

std::string to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "rk4"; }

std::string to_string(BoundaryMode m) { return m == BoundaryMode::ZeroFlux ? "zero-flux" : "zero-padded"; }

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Validation, "sim.dt must be positive and finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(ErrorKind::Validation, "sim.t_end must be >= 0 and finite");
  if (record_stride < 1) fail(ErrorKind::Validation, "sim.record_stride must be >= 1");
}

std::vector<double> Matrix::row(std::size_t r) const {
  return {values.begin() + static_cast<std::ptrdiff_t>(r * cols),
          values.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)};
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
  return out;
}

std::size_t SpaceTimeRaster::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i] == name) return i;
  fail(ErrorKind::Validation, "raster has no species '" + name + "'");
}

const Matrix& SpaceTimeRaster::operator[](const std::string& name) const { return data[index_of(name)]; }

StabilityReport stability_guard(const ModelSpec& model, const Grid1D& grid, const SimConfig& config) {
  StabilityReport report;
  const auto names = species_names(model);
  const auto ds = diffusivities(model);
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double ratio = ds[k] * config.dt / (grid.dx() * grid.dx());
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.species = names[k];
    }
  }
  if (report.max_ratio > 0.5) {
    report.ok = false;
    std::ostringstream msg;
    msg << "diffusion ratio D*dt/dx^2 = " << report.max_ratio << " for species " << report.species
        << " exceeds 0.5";
    report.message = msg.str();
  }
  return report;
}

std::size_t substep_count(const ModelSpec& model, const Grid1D& grid, const SimConfig& config) {
  const auto report = stability_guard(model, grid, config);
  if (report.ok || !config.auto_substep) return 1;
  return static_cast<std::size_t>(std::ceil(report.max_ratio / 0.4));
}

namespace {

ModelState like(const ModelState& s) {
  ModelState out;
  out.names = s.names;
  out.fields.assign(s.fields.size(), Field(s.n_cells(), 0.0));
  return out;
}

// Owns the stage buffers so that run() allocates once.
class Stepper {
public:
  Stepper(const ModelSpec& model, const Grid1D& grid, const SimConfig& config, const ModelState& shape)
      : model_(model), grid_(grid), config_(config), k1_(like(shape)), k2_(like(shape)), k3_(like(shape)),
        k4_(like(shape)), tmp_(like(shape)) {}

  // Advances `from` by h into `to`. `to` must not alias `from`.
  void advance(const ModelState& from, double t, double h, ModelState& to) {
    const BoundaryMode mode = config_.boundary;
    if (config_.scheme == Scheme::Euler) {
      rhs_into(model_, from, t, grid_, mode, k1_);
      axpy(from, h, k1_, to);
      return;
    }
    rhs_into(model_, from, t, grid_, mode, k1_);
    axpy(from, 0.5 * h, k1_, tmp_);
    rhs_into(model_, tmp_, t + 0.5 * h, grid_, mode, k2_);
    axpy(from, 0.5 * h, k2_, tmp_);
    rhs_into(model_, tmp_, t + 0.5 * h, grid_, mode, k3_);
    axpy(from, h, k3_, tmp_);
    rhs_into(model_, tmp_, t + h, grid_, mode, k4_);
    const double w = h / 6.0;
    for (std::size_t s = 0; s < from.fields.size(); ++s) {
      const double* y = from.fields[s].data();
      const double* a = k1_.fields[s].data();
      const double* b = k2_.fields[s].data();
      const double* c = k3_.fields[s].data();
      const double* d = k4_.fields[s].data();
      double* out = to.fields[s].data();
      const std::size_t n = from.fields[s].size();
      for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
    }
  }

private:
  static void axpy(const ModelState& y, double h, const ModelState& k, ModelState& out) {
    for (std::size_t s = 0; s < y.fields.size(); ++s) {
      const double* a = y.fields[s].data();
      const double* b = k.fields[s].data();
      double* o = out.fields[s].data();
      const std::size_t n = y.fields[s].size();
      for (std::size_t i = 0; i < n; ++i) o[i] = a[i] + h * b[i];
    }
  }

  const ModelSpec& model_;
  const Grid1D& grid_;
  const SimConfig& config_;
  ModelState k1_, k2_, k3_, k4_, tmp_;
};

// Empty string when the state is bounded; otherwise a description of the first bad cell.
std::string divergence_site(const ModelState& s) {
  for (std::size_t k = 0; k < s.fields.size(); ++k) {
    const Field& f = s.fields[k];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!std::isfinite(f[i]) || std::abs(f[i]) > kDivergenceLimit) {
        std::ostringstream msg;
        msg << "species " << s.names[k] << " at cell " << i << " reached " << f[i];
        return msg.str();
      }
    }
  }
  return {};
}

void check_init(const ModelSpec& model, const Grid1D& grid, const ModelState& init) {
  const auto names = species_names(model);
  if (init.fields.size() != names.size()) {
    fail(ErrorKind::Dimension, model_id(model) + " expects " + std::to_string(names.size()) +
                                   " species, initial state has " + std::to_string(init.fields.size()));
  }
  for (std::size_t k = 0; k < init.fields.size(); ++k) {
    if (init.fields[k].size() != grid.n_cells()) {
      fail(ErrorKind::Dimension, "initial species " + names[k] + " has " + std::to_string(init.fields[k].size()) +
                                     " cells but grid has " + std::to_string(grid.n_cells()));
    }
  }
}

void record(SpaceTimeRaster& raster, const ModelState& s, std::size_t row, double t) {
  raster.times.push_back(t);
  for (std::size_t k = 0; k < s.fields.size(); ++k) {
    Matrix& m = raster.data[k];
    std::copy(s.fields[k].begin(), s.fields[k].end(), m.values.begin() + static_cast<std::ptrdiff_t>(row * m.cols));
  }
}

SpaceTimeRaster truncated(const SpaceTimeRaster& r) {
  SpaceTimeRaster out = r;
  for (auto& m : out.data) {
    m.rows = out.times.size();
    m.values.resize(m.rows * m.cols);
  }
  return out;
}

}  // namespace

ModelState step(const ModelState& state, double t, double h, const ModelSpec& model, const Grid1D& grid,
                const SimConfig& config) {
  check_init(model, grid, state);
  ModelState out = like(state);
  Stepper stepper(model, grid, config, state);
  stepper.advance(state, t, h, out);
  if (const auto site = divergence_site(out); !site.empty()) {
    std::ostringstream msg;
    msg << "divergence at t=" << t + h << ": " << site;
    throw DivergenceError(msg.str(), SpaceTimeRaster{}, t + h);
  }
  return out;
}

ModelState step(const ModelState& state, double t, const ModelSpec& model, const Grid1D& grid,
                const SimConfig& config) {
  return step(state, t, config.dt, model, grid, config);
}

SpaceTimeRaster run(const ModelSpec& model, const Grid1D& grid, const ModelState& init, const SimConfig& config) {
  config.validate();
  validate(model);
  check_init(model, grid, init);

  const std::size_t steps = config.steps();
  const std::size_t rows = steps / config.record_stride + 1;
  const std::size_t sub = substep_count(model, grid, config);
  const double h = config.dt / static_cast<double>(sub);

  SpaceTimeRaster raster;
  raster.species = species_names(model);
  raster.xs = grid.coordinates();
  raster.times.reserve(rows);
  raster.data.assign(raster.species.size(), Matrix{rows, grid.n_cells(), std::vector<double>(rows * grid.n_cells())});

  ModelState cur = init;
  ModelState next = like(init);
  Stepper stepper(model, grid, config, init);
  record(raster, cur, 0, 0.0);

  std::size_t row = 1;
  for (std::size_t n = 0; n < steps && row < rows; ++n) {
    const double t0 = static_cast<double>(n) * config.dt;
    for (std::size_t s = 0; s < sub; ++s) {
      const double t = t0 + static_cast<double>(s) * h;
      try {
        stepper.advance(cur, t, h, next);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Numeric) {
          throw DivergenceError(std::string("divergence at t=") + std::to_string(t) + ": " + e.what(),
                                truncated(raster), t);
        }
        throw;
      }
      std::swap(cur, next);
      if (const auto site = divergence_site(cur); !site.empty()) {
        std::ostringstream msg;
        msg << "divergence at t=" << t + h << ": " << site;
        throw DivergenceError(msg.str(), truncated(raster), t + h);
      }
    }
    if ((n + 1) % config.record_stride == 0) {
      record(raster, cur, row, static_cast<double>(row * config.record_stride) * config.dt);
      ++row;
    }
  }
  return raster;
}

}  // namespace somite
