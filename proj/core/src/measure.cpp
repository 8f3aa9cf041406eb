#include "somite/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "somite/error.hpp"

namespace somite {

double StripeReport::mean_width() const noexcept {
  if (stripes.empty()) return 0.0;
  return total_length() / static_cast<double>(stripes.size());
}

double StripeReport::total_length() const noexcept {
  double s = 0.0;
  for (const auto& st : stripes) s += st.width;
  return s;
}

StripeReport detect_stripes(std::span<const double> row, std::span<const double> xs, double threshold) {
  if (row.size() != xs.size()) fail(ErrorKind::Dimension, "row and coordinate lengths differ");
  StripeReport report;
  report.threshold = threshold;
  const std::size_t n = row.size();
  auto cross = [&](std::size_t lo, std::size_t hi) {
    const double t = (threshold - row[lo]) / (row[hi] - row[lo]);
    return xs[lo] + t * (xs[hi] - xs[lo]);
  };
  std::size_t i = 0;
  while (i < n) {
    if (row[i] < threshold) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n && row[i] >= threshold) ++i;
    const std::size_t end = i - 1;
    Stripe s;
    s.left = start == 0 ? xs[0] : cross(start - 1, start);
    s.right = end + 1 == n ? xs[n - 1] : cross(end, end + 1);
    s.width = s.right - s.left;
    if (s.width > 0.0) report.stripes.push_back(s);
  }
  return report;
}

std::vector<double> activation_times(const Matrix& m, std::span<const double> times, double threshold) {
  if (times.size() != m.rows) fail(ErrorKind::Dimension, "time axis does not match raster rows");
  std::vector<double> act(m.cols, std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (m(0, c) >= threshold) {
      act[c] = times[0];
      continue;
    }
    for (std::size_t r = 1; r < m.rows; ++r) {
      if (m(r, c) >= threshold) {
        const double a = m(r - 1, c), b = m(r, c);
        act[c] = times[r - 1] + (threshold - a) / (b - a) * (times[r] - times[r - 1]);
        break;
      }
    }
  }
  return act;
}

StripeReport segment_somites(const Matrix& m, std::span<const double> times, std::span<const double> xs,
                             const SegmentOptions& options) {
  if (xs.size() != m.cols) fail(ErrorKind::Dimension, "coordinate axis does not match raster columns");
  const auto act = activation_times(m, times, options.threshold);
  const double t0 = times.empty() ? 0.0 : times[0];
  auto usable = [&](std::size_t c) { return std::isfinite(act[c]) && act[c] > t0; };

  struct Block {
    std::size_t first, last;
    double mean_act;
  };
  std::vector<Block> blocks;
  auto close = [&](std::size_t first, std::size_t last) {
    double s = 0.0;
    for (std::size_t c = first; c <= last; ++c) s += act[c];
    blocks.push_back({first, last, s / static_cast<double>(last - first + 1)});
  };
  std::size_t c = 0;
  while (c < m.cols) {
    if (!usable(c)) {
      ++c;
      continue;
    }
    std::size_t first = c;
    while (c + 1 < m.cols && usable(c + 1)) {
      if (std::abs(act[c + 1] - act[c]) > options.gap) {
        close(first, c);
        first = c + 1;
      }
      ++c;
    }
    close(first, c);
    ++c;
  }

  // Merge slivers into the adjacent block (touching cells only) closest in activation time.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].last - blocks[b].first + 1 >= options.min_cells) continue;
      const bool has_left = b > 0 && blocks[b - 1].last + 1 == blocks[b].first;
      const bool has_right = b + 1 < blocks.size() && blocks[b + 1].first == blocks[b].last + 1;
      if (!has_left && !has_right) continue;
      std::size_t into;
      if (has_left && has_right) {
        into = std::abs(blocks[b - 1].mean_act - blocks[b].mean_act) <=
                       std::abs(blocks[b + 1].mean_act - blocks[b].mean_act)
                   ? b - 1
                   : b + 1;
      } else {
        into = has_left ? b - 1 : b + 1;
      }
      const std::size_t first = std::min(blocks[into].first, blocks[b].first);
      const std::size_t last = std::max(blocks[into].last, blocks[b].last);
      const std::size_t lo = std::min(into, b);
      blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(std::max(into, b)));
      blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(lo));
      double s = 0.0;
      for (std::size_t k = first; k <= last; ++k) s += act[k];
      blocks.insert(blocks.begin() + static_cast<std::ptrdiff_t>(lo),
                    Block{first, last, s / static_cast<double>(last - first + 1)});
      merged = true;
      break;
    }
  }

  StripeReport report;
  report.threshold = options.threshold;
  const double dx = xs.size() > 1 ? xs[1] - xs[0] : 0.0;
  for (const auto& b : blocks) {
    // A block that borders cells which never switched on may still be growing.
    if (b.last + 1 < m.cols && !std::isfinite(act[b.last + 1])) continue;
    if (b.last + 1 == m.cols) continue;
    Stripe s;
    s.left = xs[b.first] - 0.5 * dx;
    s.right = xs[b.last] + 0.5 * dx;
    s.width = s.right - s.left;
    report.stripes.push_back(s);
  }
  return report;
}

PulseReport detect_pulses(std::span<const double> times, std::span<const double> values, double factor) {
  if (times.size() != values.size()) fail(ErrorKind::Dimension, "time and value lengths differ");
  PulseReport report;
  if (values.empty()) return report;
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  report.baseline = sorted[sorted.size() / 2];
  report.threshold = factor * report.baseline;
  std::size_t i = 0;
  while (i < values.size()) {
    if (!(values[i] > report.threshold)) {
      ++i;
      continue;
    }
    Pulse p{times[i], values[i]};
    while (i < values.size() && values[i] > report.threshold) {
      if (values[i] > p.value) p = {times[i], values[i]};
      ++i;
    }
    report.pulses.push_back(p);
  }
  return report;
}

std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return {0.0, n == 1 ? y[0] : 0.0};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return {0.0, my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

FrontTrack track_front(const Matrix& m, std::span<const double> times, std::span<const double> xs, double level,
                       double fit_lo, double fit_hi) {
  if (times.size() != m.rows || xs.size() != m.cols) fail(ErrorKind::Dimension, "axes do not match raster");
  FrontTrack track;
  track.positions.assign(m.rows, std::numeric_limits<double>::quiet_NaN());
  track.interior.assign(m.rows, false);
  std::vector<double> ts, ps;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c + 1 < m.cols; ++c) {
      const double a = m(r, c) - level, b = m(r, c + 1) - level;
      if ((a < 0.0) == (b < 0.0)) continue;
      const double x = xs[c] + a / (a - b) * (xs[c + 1] - xs[c]);
      track.positions[r] = x;
      track.interior[r] = c >= 1 && c + 2 < m.cols;
      if (track.interior[r] && x >= fit_lo && x <= fit_hi) {
        ts.push_back(times[r]);
        ps.push_back(x);
      }
      break;
    }
  }
  track.rows_used = ts.size();
  const auto [slope, intercept] = fit_line(ts, ps);
  track.speed = slope;
  track.intercept = intercept;
  return track;
}

}  // namespace somite
