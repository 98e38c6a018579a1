#pragma once

// CSV wire format for complex samples:
//
//   re_0,im_0,re_1,im_1,...
//   0.25,-1,3.5e-2,0
//
// One observation per line. Values are written in shortest round-trip form,
// so write followed by read reproduces the samples exactly.

#include "circica/core.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace circica::csv {

namespace detail {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] inline void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

inline std::string_view strip_eol(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline bool blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace detail

inline std::string header(Eigen::Index p) {
  std::string h;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k > 0) h += ',';
    h += "re_" + std::to_string(k) + ",im_" + std::to_string(k);
  }
  return h;
}

/// Reads a p x N sample matrix. Errors name the offending line (1-based).
inline SampleMatrix read(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::string_view head;
  while (std::getline(in, raw)) {
    ++line_no;
    head = detail::strip_eol(raw);
    if (!detail::blank(head)) break;
  }
  if (line_no == 0 || detail::blank(head)) fail(ErrorKind::parse, "empty CSV input");
  const auto names = detail::split(head);
  if (names.size() % 2 != 0) {
    detail::parse_error(line_no, "header has an odd number of columns (" +
                                     std::to_string(names.size()) + ")");
  }
  const auto p = static_cast<Eigen::Index>(names.size() / 2);
  for (Eigen::Index k = 0; k < p; ++k) {
    const std::string re = "re_" + std::to_string(k);
    const std::string im = "im_" + std::to_string(k);
    if (names[static_cast<std::size_t>(2 * k)] != re ||
        names[static_cast<std::size_t>(2 * k + 1)] != im) {
      detail::parse_error(line_no, "expected header columns " + re + "," + im);
    }
  }

  std::vector<double> values;
  Eigen::Index n = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_eol(raw);
    if (detail::blank(line)) continue;
    const auto fields = detail::split(line);
    if (fields.size() != names.size()) {
      detail::parse_error(line_no, "expected " + std::to_string(names.size()) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::string_view field = fields[f];
      double v = 0.0;
      const auto* first = field.data();
      const auto* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        detail::parse_error(line_no, "field " + std::to_string(f + 1) + " ('" +
                                         std::string(field) + "') is not a finite number");
      }
      values.push_back(v);
    }
    ++n;
  }
  SampleMatrix x(p, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto base = static_cast<std::size_t>(i * 2 * p + 2 * k);
      x(k, i) = Complex(values[base], values[base + 1]);
    }
  }
  return x;
}

inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void write(std::ostream& out, const SampleMatrix& x) {
  std::string line = header(x.rows());
  line += '\n';
  out << line;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    line.clear();
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      if (k > 0) line += ',';
      append_number(line, x(k, i).real());
      line += ',';
      append_number(line, x(k, i).imag());
    }
    line += '\n';
    out << line;
  }
}

}  // namespace circica::csv
