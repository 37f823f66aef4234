#pragma once

// CSV ingestion. Comma separated, UTF-8, optional trailing newline, surrounding
// whitespace in cells ignored, blank lines skipped. Numbers must parse in full
// and be finite.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/matrix.hpp"
#include "qnn/polyfit.hpp"

namespace qnn::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Non-blank lines paired with their 1-based line number in the file.
inline std::vector<std::pair<std::size_t, std::string_view>> lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0, number = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++number;
    if (!trim(line).empty()) out.emplace_back(number, line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace detail

/// Samples from text with header `x1,...,xn,y`. Data rows are numbered from 1
/// in error messages.
inline polyfit::SampleSet parse_csv_samples_text(std::string_view text) {
  const auto ls = detail::lines(text);
  if (ls.empty()) throw ParseError("samples file is empty");
  const auto header = detail::split(ls.front().second);
  if (header.size() < 2) throw ParseError("header must be x1,...,xn,y");
  const std::size_t n = header.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[i] != "x" + std::to_string(i + 1)) {
      throw ParseError("malformed header: expected column " + std::to_string(i + 1) + " to be 'x" +
                       std::to_string(i + 1) + "', found '" + std::string(header[i]) + "'");
    }
  }
  if (header.back() != "y") throw ParseError("malformed header: last column must be 'y'");
  if (ls.size() == 1) throw ParseError("samples file has a header but no data rows");

  std::vector<Vector> xs;
  Vector ys;
  for (std::size_t r = 1; r < ls.size(); ++r) {
    const auto cells = detail::split(ls[r].second);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(cells.size()) + " fields, expected " +
                           std::to_string(header.size()),
                       r);
    }
    Vector x(n);
    double y = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v)) {
        throw ParseError("row " + std::to_string(r) + ", column " + std::string(header[c]) + ": '" +
                             std::string(cells[c]) + "' is not a finite number",
                         r, std::string(header[c]));
      }
      (c < n ? x[c] : y) = v;
    }
    xs.push_back(std::move(x));
    ys.push_back(y);
  }
  return polyfit::SampleSet::make(std::move(xs), std::move(ys));
}

inline polyfit::SampleSet parse_csv_samples(const std::filesystem::path& path) {
  return parse_csv_samples_text(read_file(path));
}

/// Headerless rectangular numeric CSV.
inline Matrix parse_csv_matrix_text(std::string_view text) {
  const auto ls = detail::lines(text);
  if (ls.empty()) throw ParseError("matrix file is empty");
  std::size_t cols = 0;
  std::vector<double> data;
  for (std::size_t r = 0; r < ls.size(); ++r) {
    const auto cells = detail::split(ls[r].second);
    if (r == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw ParseError("shape error: row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                           " fields, expected " + std::to_string(cols),
                       r + 1);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v)) {
        throw ParseError("row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) + ": '" +
                             std::string(cells[c]) + "' is not a finite number",
                         r + 1, std::to_string(c + 1));
      }
      data.push_back(v);
    }
  }
  return Matrix(ls.size(), cols, std::move(data));
}

inline Matrix parse_csv_matrix(const std::filesystem::path& path) { return parse_csv_matrix_text(read_file(path)); }

}  // namespace qnn::io
