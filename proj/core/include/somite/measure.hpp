#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "somite/integrator.hpp"

namespace somite {

struct Stripe {
  double left = 0.0;
  double right = 0.0;
  double width = 0.0;
};

struct StripeReport {
  std::vector<Stripe> stripes;  ///< disjoint, ordered by position
  double threshold = 0.5;

  std::size_t count() const noexcept { return stripes.size(); }
  double mean_width() const noexcept;
  double total_length() const noexcept;
};

/// Maximal runs of samples >= threshold. Interior edges are placed by linear interpolation
/// between the bracketing samples; a run touching the end of the row ends at that coordinate.
StripeReport detect_stripes(std::span<const double> row, std::span<const double> xs, double threshold);

struct SegmentOptions {
  double threshold = 0.5;
  double gap = 0.45;         ///< activation-time jump between neighbouring cells that starts a new block
  std::size_t min_cells = 3;  ///< blocks narrower than this merge into the neighbour closest in activation time
};

/// Time at which each cell first reaches `threshold`, linearly interpolated between recorded
/// rows; +inf for cells that never do.
std::vector<double> activation_times(const Matrix& m, std::span<const double> times, double threshold);

/// Somites of a clock-and-wavefront run as blocks of cells that switch on together.
/// Cells already above threshold at t=0 and a block still bordering unswitched cells are
/// excluded. Block edges sit half a cell outside the first and last member.
StripeReport segment_somites(const Matrix& m, std::span<const double> times, std::span<const double> xs,
                             const SegmentOptions& options = {});

struct Pulse {
  double time = 0.0;
  double value = 0.0;
};

struct PulseReport {
  double baseline = 0.0;  ///< median of the series
  double threshold = 0.0;  ///< factor * baseline
  std::vector<Pulse> pulses;
};

/// Maximal runs of the series above factor * median; each contributes its peak.
PulseReport detect_pulses(std::span<const double> times, std::span<const double> values, double factor = 5.0);

struct FrontTrack {
  std::vector<double> positions;  ///< NaN where the row was skipped
  std::vector<bool> interior;     ///< crossing found away from the first and last cell
  double speed = 0.0;
  double intercept = 0.0;
  std::size_t rows_used = 0;
};

/// Per-row position of the first crossing of `level` from the left by linear interpolation,
/// and a least-squares line through the interior crossings that lie in [fit_lo, fit_hi].
FrontTrack track_front(const Matrix& m, std::span<const double> times, std::span<const double> xs, double level,
                       double fit_lo = -std::numeric_limits<double>::infinity(),
                       double fit_hi = std::numeric_limits<double>::infinity());

/// Least-squares slope and intercept of y on x.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace somite
