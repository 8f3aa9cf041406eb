#include "somite/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "somite/config.hpp"
#include "somite/error.hpp"

namespace somite {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_csv(const Matrix& m, const std::vector<double>& times, const std::vector<double>& xs,
               const std::string& path) {
  if (times.size() != m.rows || xs.size() != m.cols) fail(ErrorKind::Dimension, "raster axes do not match its data");
  std::string text = "t";
  for (double x : xs) text += "," + format_double(x);
  text += "\n";
  for (std::size_t r = 0; r < m.rows; ++r) {
    text += format_double(times[r]);
    for (std::size_t c = 0; c < m.cols; ++c) {
      text += ',';
      text += format_double(m(r, c));
    }
    text += '\n';
  }
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::vector<std::string> write_csv(const SpaceTimeRaster& raster, const std::string& path) {
  if (raster.species.empty() || raster.data.empty()) fail(ErrorKind::Validation, "raster has no species to write");
  if (raster.species.size() == 1) {
    write_csv(raster.data[0], raster.times, raster.xs, path);
    return {path};
  }
  const std::filesystem::path p(path);
  std::vector<std::string> written;
  for (std::size_t k = 0; k < raster.species.size(); ++k) {
    const auto file = (p.parent_path() / (p.stem().string() + "_" + raster.species[k] + p.extension().string())).string();
    write_csv(raster.data[k], raster.times, raster.xs, file);
    written.push_back(file);
  }
  return written;
}

CsvRaster read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  CsvRaster out;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Validation, path + ": empty CSV");
  const auto head = split(line, ',');
  if (head.empty() || head[0] != "t") fail(ErrorKind::Validation, path + ": header must start with 't'");
  for (std::size_t i = 1; i < head.size(); ++i) out.xs.push_back(parse_double(head[i], path + " header"));
  out.values.cols = out.xs.size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != out.xs.size() + 1) {
      fail(ErrorKind::Validation, path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                      " fields, expected " + std::to_string(out.xs.size() + 1));
    }
    out.times.push_back(parse_double(cells[0], path));
    for (std::size_t i = 1; i < cells.size(); ++i) out.values.values.push_back(parse_double(cells[i], path));
  }
  out.values.rows = out.times.size();
  return out;
}

std::uint8_t pgm_level(double v, double lo, double hi) noexcept {
  if (std::isnan(v)) return 0;
  const double scaled = std::floor((v - lo) / (hi - lo) * 255.0 + 0.5);
  if (scaled <= 0.0) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(scaled);
}

void write_pgm(const Matrix& m, const std::string& path, double lo, double hi) {
  if (!(lo < hi)) fail(ErrorKind::Validation, "PGM range needs min < max");
  if (m.rows == 0 || m.cols == 0) fail(ErrorKind::Validation, "cannot write an empty PGM");
  auto out = open_out(path);
  out << "P5\n" << m.cols << ' ' << m.rows << "\n255\n";
  std::string pixels(m.rows * m.cols, '\0');
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<char>(pgm_level(m.values[i], lo, hi));
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  finish(out, path);
}

void write_table(const Table& table, const std::string& path) {
  std::string text;
  for (std::size_t i = 0; i < table.header.size(); ++i) text += (i ? "," : "") + table.header[i];
  text += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
    text += "\n";
  }
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  auto out = open_out(path);
  for (const auto& [k, v] : manifest) out << k << '=' << v << '\n';
  finish(out, path);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) fail(ErrorKind::Io, "cannot create directory " + dir);
}

}  // namespace somite
