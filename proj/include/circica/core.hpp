#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace circica {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Observations stored column-wise: a p x N matrix holds N samples of a
/// p-dimensional complex random vector.
using SampleMatrix = Eigen::MatrixXcd;

inline constexpr Complex kJ{0.0, 1.0};

enum class ErrorKind {
  dimension,
  contract,
  insufficient_data,
  degenerate,
  not_full_rank,
  numeric,
  model,
  entropy_undefined,
  ambiguity_violation,
  parse,
  io,
  usage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::contract: return "contract";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::not_full_rank: return "not_full_rank";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::model: return "model";
    case ErrorKind::entropy_undefined: return "entropy_undefined";
    case ErrorKind::ambiguity_violation: return "ambiguity_violation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so front ends can map
/// it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a covariance matrix is singular; carries the offending
/// eigenvalue.
class NotFullRankError : public Error {
 public:
  NotFullRankError(const std::string& what, double eigenvalue)
      : Error(ErrorKind::not_full_rank, what), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Raised when a post-condition residual is out of bounds.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(ErrorKind::numeric, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const auto v = m(r, c);
      if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
  }
  return true;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, std::string_view what) {
  if (!all_finite(m)) {
    fail(ErrorKind::contract, std::string(what) + ": non-finite entry");
  }
}

/// Largest entry magnitude. This is the matrix norm used for every residual in
/// the library.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

inline std::string dims(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace circica
