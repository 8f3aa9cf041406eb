#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "somite/integrator.hpp"

namespace somite {

/// CSV layout: header "t,<x_0>,<x_1>,..."; each row "<t>,<value_0>,...". Numbers use the
/// shortest text that reads back to the same double.
void write_csv(const Matrix& m, const std::vector<double>& times, const std::vector<double>& xs,
               const std::string& path);

/// Writes every species of the raster. A single species goes to `path`; several go to
/// "<stem>_<species><ext>". Returns the written paths. Throws Validation on an empty raster.
std::vector<std::string> write_csv(const SpaceTimeRaster& raster, const std::string& path);

struct CsvRaster {
  std::vector<double> times;
  std::vector<double> xs;
  Matrix values;
};

CsvRaster read_csv(const std::string& path);

/// Binary 8-bit PGM (P5). Row 0 (earliest time) is the top line. Values map affinely from
/// [lo, hi] onto [0, 255] with round-half-up and clamping; NaN maps to 0.
void write_pgm(const Matrix& m, const std::string& path, double lo, double hi);

/// Pixel value of v under the write_pgm mapping.
std::uint8_t pgm_level(double v, double lo, double hi) noexcept;

/// Plain numeric table written as CSV with a header line.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_table(const Table& table, const std::string& path);

using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const Manifest& manifest, const std::string& path);

/// 64-bit FNV-1a of a byte string / of a file's contents, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string file_checksum(const std::string& path);

/// Creates the directory (and parents). Throws Io on failure.
void ensure_directory(const std::string& dir);

}  // namespace somite
