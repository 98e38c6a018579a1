#pragma once

// Strong-uncorrelating transform.
//
// For a full complex random vector x there is a nonsingular C with
//   cov(Cx)  = I
//   pcov(Cx) = diag(lambda),  1 >= lambda_1 >= ... >= lambda_p >= 0.
// lambda (the circularity spectrum) is unique; C is built as U^H D where
// D = cov^{-1/2} and D pcov D^T = U diag(lambda) U^T is a Takagi factorization.
// With a distinct spectrum the rows of C are unique up to sign (nonzero
// lambda) or a unit-modulus factor (zero lambda).

#include "circica/moments.hpp"
#include "circica/takagi.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace circica {

/// Sorted (nonincreasing) circularity coefficients of a random vector.
struct CircularitySpectrum {
  RealVector values;

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index k) const { return values(k); }
};

/// Throws unless values lie in [0, 1] and are nonincreasing.
inline void validate(const CircularitySpectrum& s, double tol = 0.0) {
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double v = s.values(k);
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
      fail(ErrorKind::model, "circularity coefficient " + std::to_string(v) +
                                 " outside [0, 1] at index " + std::to_string(k));
    }
    if (k > 0 && v > s.values(k - 1) + tol) {
      fail(ErrorKind::model, "circularity spectrum is not sorted nonincreasing");
    }
  }
}

enum class Whitening {
  /// D = cov^{-1/2} (Hermitian square root)
  symmetric,
  /// D = L^{-1} with cov = L L^H
  cholesky,
};

struct SutOptions {
  Whitening whitening = Whitening::symmetric;
  double rank_tol = 1e-12;
  /// Diagonalization residuals above this raise NumericError.
  double residual_limit = 1e-6;
};

struct SutResult {
  ComplexMatrix transform;
  CircularitySpectrum spectrum;
  double cov_residual = 0.0;   // |C cov C^H - I|
  double pcov_residual = 0.0;  // |C pcov C^T - diag(spectrum)|
};

namespace detail {

inline double clamp_coefficient(double v) {
  if (v > 1.0) {
    if (v <= 1.0 + 1e-8) return 1.0;
    throw NumericError("circularity coefficient " + std::to_string(v) + " exceeds 1", v - 1.0);
  }
  if (v < 0.0) {
    if (v >= -1e-12) return 0.0;
    throw NumericError("circularity coefficient " + std::to_string(v) + " is negative", -v);
  }
  return v;
}

inline ComplexMatrix cholesky_whitener(const ComplexMatrix& cov, double rank_tol) {
  // Rank check and error message shared with the symmetric route.
  (void)covariance_eigen(cov, rank_tol);
  Eigen::LLT<ComplexMatrix> llt(0.5 * (cov + cov.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw NotFullRankError("covariance is not positive definite (Cholesky failed)", 0.0);
  }
  const Eigen::Index p = cov.rows();
  return llt.matrixL().solve(ComplexMatrix::Identity(p, p));
}

}  // namespace detail

inline SutResult strong_uncorrelating_transform(const SecondOrderStats& stats,
                                                const SutOptions& opt = {}) {
  validate(stats);
  const Eigen::Index p = stats.dimension();
  const ComplexMatrix d = opt.whitening == Whitening::symmetric
                              ? whiten(stats, opt.rank_tol)
                              : detail::cholesky_whitener(stats.cov, opt.rank_tol);
  ComplexMatrix white_pcov = d * stats.pcov * d.transpose();
  white_pcov = 0.5 * (white_pcov + white_pcov.transpose()).eval();

  TakagiOptions topt;
  topt.reconstruction_limit = 1e-8;
  const TakagiFactorization tf = takagi(white_pcov, topt);

  SutResult out;
  out.transform = tf.u.adjoint() * d;
  out.spectrum.values.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    out.spectrum.values(k) = detail::clamp_coefficient(tf.lambda(k));
  }

  out.cov_residual = max_abs(out.transform * stats.cov * out.transform.adjoint() -
                             ComplexMatrix::Identity(p, p));
  const ComplexMatrix diag = out.spectrum.values.cast<Complex>().asDiagonal();
  out.pcov_residual =
      max_abs(out.transform * stats.pcov * out.transform.transpose() - diag);
  const double worst = std::max(out.cov_residual, out.pcov_residual);
  if (worst > opt.residual_limit) {
    throw NumericError("strong-uncorrelating transform residual " + std::to_string(worst) +
                           " exceeds limit",
                       worst);
  }
  return out;
}

/// Gap tolerance used when deciding whether a spectrum is distinct:
/// 1e-6 for model-level moments, 5/sqrt(N) for estimates.
inline double default_gap_tolerance(std::size_t sample_count) {
  if (sample_count == 0) return 1e-6;
  return 5.0 / std::sqrt(static_cast<double>(sample_count));
}

/// True iff consecutive sorted coefficients differ by more than gap_tol.
inline bool spectrum_distinct(const CircularitySpectrum& s, double gap_tol = 1e-6) {
  for (Eigen::Index k = 1; k < s.size(); ++k) {
    if (!(std::abs(s.values(k - 1) - s.values(k)) > gap_tol)) return false;
  }
  return true;
}

struct RowAlignment {
  std::vector<Complex> scalars;     // row_k(C1) = scalar_k * row_k(C2)
  std::vector<double> residuals;    // relative misfit of that relation
  std::vector<bool> zero_coefficient;
};

struct AlignmentOptions {
  double tol = 1e-6;
  /// Coefficients at or below this are treated as zero (unit-modulus freedom).
  double zero_tol = 1e-6;
};

/// Relates the rows of two strong-uncorrelating transforms of the same
/// moments. With a distinct spectrum each scalar is +-1 for nonzero
/// coefficients and unit modulus for a zero coefficient; anything else raises
/// an ambiguity_violation error.
inline RowAlignment sut_row_ambiguity(const SutResult& r1, const SutResult& r2,
                                      const AlignmentOptions& opt = {}) {
  const ComplexMatrix& c1 = r1.transform;
  const ComplexMatrix& c2 = r2.transform;
  if (c1.rows() != c2.rows() || c1.cols() != c2.cols() ||
      r1.spectrum.size() != c1.rows()) {
    fail(ErrorKind::dimension, "sut_row_ambiguity: transforms have different shapes");
  }
  RowAlignment out;
  for (Eigen::Index k = 0; k < c1.rows(); ++k) {
    const auto a = c1.row(k);
    const auto b = c2.row(k);
    const double nb = b.squaredNorm();
    if (!(nb > 0.0)) fail(ErrorKind::ambiguity_violation, "sut_row_ambiguity: zero row");
    const Complex c = (b.conjugate().cwiseProduct(a)).sum() / nb;  // least-squares a ~ c b
    const double res = (a - c * b).norm() / std::max(a.norm(), 1e-300);
    const bool zero = r1.spectrum.values(k) <= opt.zero_tol;
    out.scalars.push_back(c);
    out.residuals.push_back(res);
    out.zero_coefficient.push_back(zero);
    if (res > opt.tol) {
      fail(ErrorKind::ambiguity_violation,
           "row " + std::to_string(k) + " of the two transforms is not related by a scalar "
           "(relative misfit " + std::to_string(res) + ")");
    }
    const bool ok = zero ? std::abs(std::abs(c) - 1.0) <= opt.tol
                         : std::min(std::abs(c - 1.0), std::abs(c + 1.0)) <= opt.tol;
    if (!ok) {
      fail(ErrorKind::ambiguity_violation,
           "row " + std::to_string(k) + " scalar (" + std::to_string(c.real()) + ", " +
               std::to_string(c.imag()) + ") is outside the admissible class");
    }
  }
  return out;
}

}  // namespace circica
