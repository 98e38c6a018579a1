#pragma once

// Covariance and pseudo-covariance of complex random vectors.
//
//   cov  = E[(x - m)(x - m)^H]
//   pcov = E[(x - m)(x - m)^T]
//
// Sample estimates use the unbiased 1/(N-1) normalization and are symmetrized
// afterwards so that cov is exactly Hermitian and pcov exactly symmetric.

#include "circica/core.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace circica {

struct SecondOrderStats {
  ComplexVector mean;
  ComplexMatrix cov;
  ComplexMatrix pcov;
  /// Number of observations behind an estimate; 0 marks exact model-level
  /// moments.
  std::size_t sample_count = 0;

  Eigen::Index dimension() const { return cov.rows(); }
  bool is_estimate() const { return sample_count > 0; }
};

/// Scalar (p = 1) moments, handy for the circularity-coefficient algebra.
inline SecondOrderStats scalar_stats(double variance, Complex pseudo_variance,
                                     Complex mean = 0.0) {
  SecondOrderStats s;
  s.mean = ComplexVector::Constant(1, mean);
  s.cov = ComplexMatrix::Constant(1, 1, Complex(variance, 0.0));
  s.pcov = ComplexMatrix::Constant(1, 1, pseudo_variance);
  return s;
}

/// Throws unless the moments are dimensionally consistent, finite, and carry
/// the Hermitian/symmetric structure (to tol relative to the largest entry).
inline void validate(const SecondOrderStats& s, double tol = 1e-8) {
  const Eigen::Index p = s.cov.rows();
  if (p < 1 || s.cov.cols() != p || s.pcov.rows() != p || s.pcov.cols() != p ||
      s.mean.size() != p) {
    fail(ErrorKind::dimension, "second-order stats: inconsistent shapes (cov " +
                                   dims(s.cov.rows(), s.cov.cols()) + ", pcov " +
                                   dims(s.pcov.rows(), s.pcov.cols()) + ", mean " +
                                   std::to_string(s.mean.size()) + ")");
  }
  require_finite(s.cov, "covariance");
  require_finite(s.pcov, "pseudo-covariance");
  require_finite(s.mean, "mean");
  const double scale = 1.0 + std::max(max_abs(s.cov), max_abs(s.pcov));
  if (max_abs(s.cov - s.cov.adjoint()) > tol * scale) {
    fail(ErrorKind::contract, "covariance is not Hermitian");
  }
  if (max_abs(s.pcov - s.pcov.transpose()) > tol * scale) {
    fail(ErrorKind::contract, "pseudo-covariance is not symmetric");
  }
}

/// Moments of M x given the moments of x.
inline SecondOrderStats transform(const SecondOrderStats& s, const ComplexMatrix& m) {
  if (m.cols() != s.dimension()) {
    fail(ErrorKind::dimension, "transform: matrix " + dims(m.rows(), m.cols()) +
                                   " does not act on dimension " +
                                   std::to_string(s.dimension()));
  }
  SecondOrderStats out;
  out.mean = m * s.mean;
  out.cov = m * s.cov * m.adjoint();
  out.pcov = m * s.pcov * m.transpose();
  out.cov = 0.5 * (out.cov + out.cov.adjoint()).eval();
  out.pcov = 0.5 * (out.pcov + out.pcov.transpose()).eval();
  out.sample_count = s.sample_count;
  return out;
}

/// Partial sums for a block of observations: count, mean, and centered
/// sums of outer products. Blocks merge deterministically in the order given.
struct MomentAccumulator {
  std::size_t count = 0;
  ComplexVector mean;
  ComplexMatrix outer;       // sum (x - m)(x - m)^H
  ComplexMatrix outer_t;     // sum (x - m)(x - m)^T

  static MomentAccumulator from_block(const SampleMatrix& x, Eigen::Index begin,
                                      Eigen::Index end) {
    const Eigen::Index p = x.rows();
    MomentAccumulator acc;
    acc.count = static_cast<std::size_t>(end - begin);
    acc.mean = ComplexVector::Zero(p);
    acc.outer = ComplexMatrix::Zero(p, p);
    acc.outer_t = ComplexMatrix::Zero(p, p);
    if (acc.count == 0) return acc;
    for (Eigen::Index n = begin; n < end; ++n) acc.mean += x.col(n);
    acc.mean /= static_cast<double>(acc.count);
    ComplexVector d(p);
    for (Eigen::Index n = begin; n < end; ++n) {
      d = x.col(n) - acc.mean;
      for (Eigen::Index j = 0; j < p; ++j) {
        const Complex dj = d(j);
        const Complex dj_conj = std::conj(dj);
        for (Eigen::Index i = 0; i < p; ++i) {
          acc.outer(i, j) += d(i) * dj_conj;
          acc.outer_t(i, j) += d(i) * dj;
        }
      }
    }
    return acc;
  }

  void merge(const MomentAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const ComplexVector delta = other.mean - mean;
    const double w = na * nb / n;
    outer += other.outer + w * delta * delta.adjoint();
    outer_t += other.outer_t + w * delta * delta.transpose();
    mean += delta * (nb / n);
    count += other.count;
  }

  SecondOrderStats finalize() const {
    if (count < 2) {
      fail(ErrorKind::insufficient_data,
           "estimate_stats: need at least 2 observations, got " + std::to_string(count));
    }
    const double norm = 1.0 / static_cast<double>(count - 1);
    SecondOrderStats s;
    s.mean = mean;
    s.cov = norm * outer;
    s.pcov = norm * outer_t;
    s.cov = 0.5 * (s.cov + s.cov.adjoint()).eval();
    s.pcov = 0.5 * (s.pcov + s.pcov.transpose()).eval();
    s.sample_count = count;
    return s;
  }
};

inline SecondOrderStats estimate_stats(const SampleMatrix& x) {
  if (x.cols() < 2) {
    fail(ErrorKind::insufficient_data,
         "estimate_stats: need at least 2 observations, got " + std::to_string(x.cols()));
  }
  if (x.rows() < 1) fail(ErrorKind::dimension, "estimate_stats: zero-dimensional sample");
  require_finite(x, "estimate_stats");
  return MomentAccumulator::from_block(x, 0, x.cols()).finalize();
}

/// Same moments, computed block by block (blocks of block_size consecutive
/// observations, merged in increasing block order). Blocks are independent and
/// may be produced concurrently; the merge order fixes the result.
inline SecondOrderStats estimate_stats_partitioned(const SampleMatrix& x,
                                                   Eigen::Index block_size) {
  if (block_size < 1) fail(ErrorKind::contract, "estimate_stats_partitioned: block_size < 1");
  if (x.cols() < 2) {
    fail(ErrorKind::insufficient_data,
         "estimate_stats: need at least 2 observations, got " + std::to_string(x.cols()));
  }
  require_finite(x, "estimate_stats");
  std::vector<MomentAccumulator> blocks;
  for (Eigen::Index b = 0; b < x.cols(); b += block_size) {
    blocks.push_back(MomentAccumulator::from_block(x, b, std::min(x.cols(), b + block_size)));
  }
  MomentAccumulator total;
  for (const auto& blk : blocks) total.merge(blk);
  return total.finalize();
}

inline double degenerate_variance_threshold(double variance, Complex mean) {
  return 1e-12 * (variance + std::norm(mean));
}

/// |pcov| / cov for a scalar random variable; 0 for circular, 1 for
/// variables confined to a line through their mean.
inline double circularity_coefficient(const SecondOrderStats& s) {
  if (s.dimension() != 1) {
    fail(ErrorKind::dimension, "circularity_coefficient: expected scalar stats, got dimension " +
                                   std::to_string(s.dimension()));
  }
  const double var = s.cov(0, 0).real();
  const Complex mean = s.mean.size() == 1 ? s.mean(0) : Complex{};
  if (!(var > 0.0) || var <= degenerate_variance_threshold(var, mean)) {
    fail(ErrorKind::degenerate, "circularity_coefficient: degenerate variance " +
                                    std::to_string(var));
  }
  return std::min(1.0, std::abs(s.pcov(0, 0)) / var);
}

/// Marginal coefficient |pcov_kk| / cov_kk of every component.
inline RealVector circularity_coefficients(const SecondOrderStats& s) {
  const Eigen::Index p = s.dimension();
  RealVector out(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    SecondOrderStats marginal = scalar_stats(s.cov(k, k).real(), s.pcov(k, k), s.mean(k));
    out(k) = circularity_coefficient(marginal);
  }
  return out;
}

/// Coefficient of x + y for uncorrelated scalars x and y:
/// |pcov_x + pcov_y| / (cov_x + cov_y). Never exceeds the larger input
/// coefficient. Uncorrelatedness is the caller's responsibility.
inline double combine_coefficients(const SecondOrderStats& x, const SecondOrderStats& y) {
  if (x.dimension() != 1 || y.dimension() != 1) {
    fail(ErrorKind::dimension, "combine_coefficients: expected scalar stats");
  }
  const double vx = x.cov(0, 0).real();
  const double vy = y.cov(0, 0).real();
  if (!(vx > 0.0) || !(vy > 0.0)) {
    fail(ErrorKind::degenerate, "combine_coefficients: nonpositive variance");
  }
  const double total = vx + vy;
  if (!(total > 0.0)) fail(ErrorKind::degenerate, "combine_coefficients: zero total variance");
  return std::min(1.0, std::abs(x.pcov(0, 0) + y.pcov(0, 0)) / total);
}

/// Cross moments between two random vectors x (p) and y (q).
struct CrossStats {
  ComplexMatrix cross_cov;   // E[(x - mx)(y - my)^H]
  ComplexMatrix cross_pcov;  // E[(x - mx)(y - my)^T]
  RealVector var_x;
  RealVector var_y;
  std::size_t sample_count = 0;
};

inline CrossStats cross_stats(const SampleMatrix& x, const SampleMatrix& y) {
  if (x.cols() != y.cols()) {
    fail(ErrorKind::dimension, "cross_stats: observation counts differ (" +
                                   std::to_string(x.cols()) + " vs " +
                                   std::to_string(y.cols()) + ")");
  }
  if (x.cols() < 2) {
    fail(ErrorKind::insufficient_data, "cross_stats: need at least 2 observations");
  }
  const double norm = 1.0 / static_cast<double>(x.cols() - 1);
  const ComplexVector mx = x.rowwise().mean();
  const ComplexVector my = y.rowwise().mean();
  const ComplexMatrix dx = x.colwise() - mx;
  const ComplexMatrix dy = y.colwise() - my;
  CrossStats c;
  c.cross_cov = norm * dx * dy.adjoint();
  c.cross_pcov = norm * dx * dy.transpose();
  c.var_x = norm * dx.cwiseAbs2().rowwise().sum();
  c.var_y = norm * dy.cwiseAbs2().rowwise().sum();
  c.sample_count = static_cast<std::size_t>(x.cols());
  return c;
}

/// Per-entry threshold for deciding that a normalized sample correlation is
/// zero: 3/sqrt(N) for estimates, 1e-8 for model-level moments.
inline double default_uncorrelated_tolerance(std::size_t sample_count) {
  if (sample_count == 0) return 1e-8;
  return 3.0 / std::sqrt(static_cast<double>(sample_count));
}

struct UncorrelationReport {
  bool uncorrelated = false;
  double cov_residual = 0.0;
  double pcov_residual = 0.0;
  double threshold = 0.0;
};

namespace detail {

inline double normalized_max(const ComplexMatrix& m, const RealVector& vr, const RealVector& vc,
                             bool skip_diagonal) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (skip_diagonal && i == j) continue;
      const double s = std::sqrt(vr(i) * vc(j));
      const double v = s > 0.0 ? std::abs(m(i, j)) / s : std::abs(m(i, j));
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace detail

/// x and y are uncorrelated iff both the cross-covariance and the cross
/// pseudo-covariance vanish. Entries are normalized by sqrt(var_x var_y).
inline UncorrelationReport is_uncorrelated(const CrossStats& c,
                                           std::optional<double> tolerance = {}) {
  if (c.cross_cov.rows() != c.cross_pcov.rows() || c.cross_cov.cols() != c.cross_pcov.cols() ||
      c.var_x.size() != c.cross_cov.rows() || c.var_y.size() != c.cross_cov.cols()) {
    fail(ErrorKind::dimension, "is_uncorrelated: mismatched cross-moment shapes");
  }
  UncorrelationReport r;
  r.threshold = tolerance.value_or(default_uncorrelated_tolerance(c.sample_count));
  r.cov_residual = detail::normalized_max(c.cross_cov, c.var_x, c.var_y, false);
  r.pcov_residual = detail::normalized_max(c.cross_pcov, c.var_x, c.var_y, false);
  r.uncorrelated = r.cov_residual <= r.threshold && r.pcov_residual <= r.threshold;
  return r;
}

/// Components are mutually uncorrelated iff cov and pcov are both diagonal.
inline UncorrelationReport has_uncorrelated_components(const SecondOrderStats& s,
                                                       std::optional<double> tolerance = {}) {
  const RealVector var = s.cov.diagonal().real();
  UncorrelationReport r;
  r.threshold = tolerance.value_or(default_uncorrelated_tolerance(s.sample_count));
  r.cov_residual = detail::normalized_max(s.cov, var, var, true);
  r.pcov_residual = detail::normalized_max(s.pcov, var, var, true);
  r.uncorrelated = r.cov_residual <= r.threshold && r.pcov_residual <= r.threshold;
  return r;
}

/// Hermitian eigendecomposition of cov, eigenvalues ascending. Throws
/// NotFullRankError when the smallest eigenvalue is not safely positive.
struct CovarianceEigen {
  RealVector values;
  ComplexMatrix vectors;
};

inline CovarianceEigen covariance_eigen(const ComplexMatrix& cov, double rank_tol = 1e-12) {
  require_finite(cov, "covariance");
  const ComplexMatrix h = 0.5 * (cov + cov.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  if (eig.info() != Eigen::Success) {
    throw NumericError("covariance eigendecomposition did not converge", 0.0);
  }
  const RealVector& ev = eig.eigenvalues();
  const double top = ev(ev.size() - 1);
  const double bound = rank_tol * std::max(top, 0.0);
  if (!(top > 0.0) || !(ev(0) > bound)) {
    throw NotFullRankError("covariance is not full rank: smallest eigenvalue " +
                               std::to_string(ev(0)) + " (largest " + std::to_string(top) + ")",
                           ev(0));
  }
  return {ev, eig.eigenvectors()};
}

/// Inverse Hermitian square root cov^{-1/2}; D cov D^H = I.
inline ComplexMatrix whiten(const SecondOrderStats& s, double rank_tol = 1e-12) {
  const CovarianceEigen e = covariance_eigen(s.cov, rank_tol);
  const RealVector inv_sqrt = e.values.cwiseSqrt().cwiseInverse();
  ComplexMatrix d = e.vectors * inv_sqrt.asDiagonal() * e.vectors.adjoint();
  return 0.5 * (d + d.adjoint());
}

}  // namespace circica
