#pragma once

// Takagi factorization B = U diag(lambda) U^T of a complex symmetric matrix,
// U unitary and lambda the (nonnegative) singular values of B.
//
// Takagi vectors solve B conj(u) = sigma u. Writing u = x + j y and
// B = R + j I, this is the real symmetric eigenproblem
//
//     [ R   I ] [x]         [x]
//     [ I  -R ] [y] = sigma [y]
//
// whose spectrum is {+sigma_k, -sigma_k}. The eigenvectors of the p largest
// eigenvalues give U directly: eigenvectors for +sigma and -sigma' are
// orthogonal whenever sigma, sigma' > 0, so repeated positive singular values
// need no special treatment. Columns for zero singular values are completed
// from the orthogonal complement of the range of B.

#include "circica/core.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace circica {

struct TakagiFactorization {
  ComplexMatrix u;
  RealVector lambda;  // nonincreasing, >= 0
  double unitarity_residual = 0.0;
  double reconstruction_residual = 0.0;
};

struct TakagiOptions {
  double symmetry_tol = 1e-8;
  /// Singular values at or below zero_tol * sigma_max are treated as zero.
  double zero_tol = 1e-12;
  double unitarity_limit = 1e-10;
  double reconstruction_limit = 1e-9;
};

namespace detail {

/// Fixes the sign freedom of a Takagi vector for a nonzero singular value:
/// the largest-magnitude entry gets a nonnegative real part.
inline void orient_nonzero_column(Eigen::Ref<ComplexVector> col) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > best * (1.0 + 1e-12)) {
      best = a;
      arg = i;
    }
  }
  if (col(arg).real() < 0.0) col = -col;
}

/// Zero singular values leave a full phase freedom: make the first
/// non-negligible entry real and nonnegative.
inline void orient_zero_column(Eigen::Ref<ComplexVector> col) {
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > 1e-10) {
      col *= std::conj(col(i)) / a;
      col(i) = Complex(std::abs(col(i)), 0.0);
      return;
    }
  }
}

/// Symmetric (Loewdin) orthonormalization U (U^H U)^{-1/2}; the closest
/// matrix with orthonormal columns.
inline ComplexMatrix orthonormalize(const ComplexMatrix& u) {
  if (u.cols() == 0) return u;
  const ComplexMatrix g = u.adjoint() * u;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (g + g.adjoint()));
  const RealVector inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return u * (eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint());
}

}  // namespace detail

inline TakagiFactorization takagi(const ComplexMatrix& b_in, const TakagiOptions& opt = {}) {
  if (b_in.rows() != b_in.cols() || b_in.rows() == 0) {
    fail(ErrorKind::dimension, "takagi: expected a nonempty square matrix, got " +
                                   dims(b_in.rows(), b_in.cols()));
  }
  require_finite(b_in, "takagi");
  const Eigen::Index p = b_in.rows();
  const double scale = max_abs(b_in);
  const double asym = max_abs(b_in - b_in.transpose());
  if (asym > opt.symmetry_tol * (1.0 + scale)) {
    fail(ErrorKind::contract, "takagi: input is not symmetric (|B - B^T| = " +
                                  std::to_string(asym) + ")");
  }
  const ComplexMatrix b = 0.5 * (b_in + b_in.transpose());

  TakagiFactorization out;
  out.u = ComplexMatrix::Identity(p, p);
  out.lambda = RealVector::Zero(p);
  if (scale == 0.0) return out;

  RealMatrix m(2 * p, 2 * p);
  m.topLeftCorner(p, p) = b.real();
  m.topRightCorner(p, p) = b.imag();
  m.bottomLeftCorner(p, p) = b.imag();
  m.bottomRightCorner(p, p) = -b.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericError("takagi: eigensolver did not converge", 0.0);
  }
  const RealVector& ev = eig.eigenvalues();  // ascending
  const double sigma_max = std::max(ev(2 * p - 1), 0.0);
  const double zero_cut = opt.zero_tol * sigma_max;

  // Largest p eigenvalues, descending; ties keep the solver's order.
  std::vector<Eigen::Index> positive;
  std::vector<double> values;
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index idx = 2 * p - 1 - k;
    const double s = ev(idx);
    if (s > zero_cut) {
      positive.push_back(idx);
      values.push_back(s);
    }
  }
  const auto r = static_cast<Eigen::Index>(positive.size());

  ComplexMatrix u_pos(p, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    const auto v = eig.eigenvectors().col(positive[static_cast<std::size_t>(c)]);
    for (Eigen::Index i = 0; i < p; ++i) u_pos(i, c) = Complex(v(i), v(p + i));
  }
  u_pos = detail::orthonormalize(u_pos);
  for (Eigen::Index c = 0; c < r; ++c) {
    detail::orient_nonzero_column(u_pos.col(c));
    out.lambda(c) = values[static_cast<std::size_t>(c)];
  }
  out.u.leftCols(r) = u_pos;

  if (r < p) {
    // Orthonormal complement of span(u_pos). Full QR of [u_pos | I] is
    // deterministic and well defined for r = 0.
    ComplexMatrix basis(p, r + p);
    basis.leftCols(r) = u_pos;
    basis.rightCols(p) = ComplexMatrix::Identity(p, p);
    Eigen::HouseholderQR<ComplexMatrix> hqr(basis);
    const ComplexMatrix q = hqr.householderQ() * ComplexMatrix::Identity(p, p);
    ComplexMatrix comp = q.rightCols(p - r);
    // Re-project against u_pos to suppress rounding drift, then normalize.
    comp -= u_pos * (u_pos.adjoint() * comp);
    comp = detail::orthonormalize(comp);
    for (Eigen::Index c = 0; c < p - r; ++c) {
      detail::orient_zero_column(comp.col(c));
      out.lambda(r + c) = 0.0;
    }
    out.u.rightCols(p - r) = comp;
  }

  out.unitarity_residual = max_abs(out.u.adjoint() * out.u - ComplexMatrix::Identity(p, p));
  out.reconstruction_residual =
      max_abs(b - out.u * out.lambda.cast<Complex>().asDiagonal() * out.u.transpose());
  if (out.unitarity_residual > opt.unitarity_limit) {
    throw NumericError("takagi: factor is not unitary (residual " +
                           std::to_string(out.unitarity_residual) + ")",
                       out.unitarity_residual);
  }
  if (out.reconstruction_residual > opt.reconstruction_limit * (1.0 + scale)) {
    throw NumericError("takagi: reconstruction residual " +
                           std::to_string(out.reconstruction_residual) + " out of bounds",
                       out.reconstruction_residual);
  }
  return out;
}

}  // namespace circica
