#pragma once

// JSON encoding of library types. Complex numbers are [re, im] pairs and
// matrices are row-major nested arrays of them.

#include "circica/circica.hpp"

#include <json.hpp>

#include <string>

namespace circica::json_io {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::parse, where + ": " + what);
}

inline json encode(Complex z) { return json::array({z.real(), z.imag()}); }

inline json encode(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode(v(i)));
  return out;
}

inline json encode(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
    out.push_back(row);
  }
  return out;
}

inline json encode_real(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json encode_real(const RealMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline json encode(const SecondOrderStats& s) {
  return {{"mean", encode(s.mean)},
          {"cov", encode(s.cov)},
          {"pcov", encode(s.pcov)},
          {"sample_count", s.sample_count}};
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where, "number is not finite");
  return v;
}

/// A number (real) or an [re, im] pair.
inline Complex decode_complex(const json& j, const std::string& where) {
  if (j.is_number()) return number(j, where);
  if (j.is_array() && j.size() == 2) return {number(j[0], where), number(j[1], where)};
  bad(where, "expected a number or an [re, im] pair");
}

inline ComplexVector decode_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = decode_complex(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline RealVector decode_real_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline ComplexMatrix decode_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    bad(where, "expected a nonempty array of rows");
  }
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      bad(row_where, "expected a row of " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          decode_complex(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace circica::json_io
