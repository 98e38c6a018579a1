#pragma once

// Real embedding of complex vectors and matrices.
//
//   z = z_R + j z_I      ->  (z_R; z_I)
//   C = C_R + j C_I      ->  [[C_R, -C_I], [C_I, C_R]]
//
// The embedding is a homomorphism: embed(C z) == embed(C) embed(z). It is used
// throughout the tests as an independent route to complex identities.

#include "circica/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace circica::isoreal {

inline RealVector embed_vector(const ComplexVector& z) {
  const Eigen::Index p = z.size();
  RealVector out(2 * p);
  out.head(p) = z.real();
  out.tail(p) = z.imag();
  return out;
}

inline RealMatrix embed_matrix(const ComplexMatrix& c) {
  const Eigen::Index m = c.rows();
  const Eigen::Index p = c.cols();
  RealMatrix out(2 * m, 2 * p);
  out.topLeftCorner(m, p) = c.real();
  out.topRightCorner(m, p) = -c.imag();
  out.bottomLeftCorner(m, p) = c.imag();
  out.bottomRightCorner(m, p) = c.real();
  return out;
}

inline ComplexVector lift_vector(const RealVector& r) {
  if (r.size() % 2 != 0) {
    fail(ErrorKind::dimension,
         "lift_vector: embedding length " + std::to_string(r.size()) + " is odd");
  }
  const Eigen::Index p = r.size() / 2;
  ComplexVector z(p);
  for (Eigen::Index k = 0; k < p; ++k) z(k) = Complex(r(k), r(p + k));
  return z;
}

/// Inverse of embed_matrix. Reads the left block column only; the right block
/// column is implied by the embedding pattern.
inline ComplexMatrix lift_matrix(const RealMatrix& r) {
  if (r.rows() % 2 != 0 || r.cols() % 2 != 0) {
    fail(ErrorKind::dimension, "lift_matrix: embedding " + dims(r.rows(), r.cols()) +
                                   " has an odd dimension");
  }
  const Eigen::Index m = r.rows() / 2;
  const Eigen::Index p = r.cols() / 2;
  ComplexMatrix c(m, p);
  c.real() = r.topLeftCorner(m, p);
  c.imag() = r.bottomLeftCorner(m, p);
  return c;
}

/// Deviation of a real 2m x 2p matrix from the block pattern produced by
/// embed_matrix. Zero for every embedded matrix.
inline double block_pattern_residual(const RealMatrix& r) {
  if (r.rows() % 2 != 0 || r.cols() % 2 != 0) return std::numeric_limits<double>::infinity();
  const Eigen::Index m = r.rows() / 2;
  const Eigen::Index p = r.cols() / 2;
  const double diag = max_abs(r.topLeftCorner(m, p) - r.bottomRightCorner(m, p));
  const double anti = max_abs(r.topRightCorner(m, p) + r.bottomLeftCorner(m, p));
  return std::max(diag, anti);
}

struct ClauseResult {
  std::string name;
  bool applicable = true;
  bool holds = true;
  double residual = 0.0;
  double threshold = 0.0;
};

struct IsomorphismTolerances {
  double determinant = 1e-9;
  double quadratic_form = 1e-10;
  double structure = 1e-10;
};

/// Per-clause report on how the complex matrix properties of C carry over to
/// its real embedding.
struct IsomorphismReport {
  std::vector<ClauseResult> clauses;

  bool all_hold() const {
    for (const auto& c : clauses) {
      if (c.applicable && !c.holds) return false;
    }
    return true;
  }

  const ClauseResult* find(std::string_view name) const {
    for (const auto& c : clauses) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline std::vector<ComplexVector> default_probes(Eigen::Index p) {
  std::vector<ComplexVector> probes;
  ComplexVector ones = ComplexVector::Ones(p);
  probes.push_back(ones);
  ComplexVector alt(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double t = 0.7 * static_cast<double>(k + 1);
    alt(k) = Complex(std::cos(t), std::sin(1.3 * t)) * (1.0 + 0.25 * static_cast<double>(k));
  }
  probes.push_back(alt);
  return probes;
}

}  // namespace detail

/// Evaluates each clause of the complex/real correspondence on C:
///   determinant   |det C|^2 == det embed(C)
///   hermitian     C Hermitian  <=> embed(C) symmetric (and, if so,
///                 det(C)^2 == det embed(C), 2 rank C == rank embed(C))
///   nonsingular   smallest singular values agree
///   unitary       C unitary <=> embed(C) orthogonal
///   quadratic     z^H C z == embed(z)^T embed(C) embed(z) (Hermitian C)
///   positive      Hermitian C positive definite <=> embed(C) positive definite
inline IsomorphismReport check_isomorphism(const ComplexMatrix& c,
                                           std::span<const ComplexVector> probes = {},
                                           const IsomorphismTolerances& tol = {}) {
  require_finite(c, "check_isomorphism");
  IsomorphismReport report;
  const RealMatrix e = embed_matrix(c);
  const bool square = c.rows() == c.cols();
  const Eigen::Index p = c.cols();

  if (!square) {
    for (const char* name : {"determinant", "hermitian", "nonsingular", "unitary",
                             "quadratic_form", "positive_definite"}) {
      report.clauses.push_back({name, false, true, 0.0, 0.0});
    }
    return report;
  }

  {
    const double det_c = std::norm(c.determinant());
    const double det_e = e.determinant();
    const double res = std::abs(det_c - det_e);
    const double thr = tol.determinant * (1.0 + det_c);
    report.clauses.push_back({"determinant", true, res <= thr, res, thr});
  }

  const double herm_res = max_abs(c - c.adjoint());
  const double sym_res = max_abs(e - e.transpose());
  const double scale = 1.0 + max_abs(c);
  const bool hermitian = herm_res <= tol.structure * scale;
  {
    const bool symmetric = sym_res <= tol.structure * scale;
    double res = std::abs(herm_res - sym_res);
    bool holds = hermitian == symmetric;
    if (hermitian) {
      const Complex det_c = c.determinant();
      const double det_e = e.determinant();
      const double det_res = std::abs(det_c * det_c - det_e);
      res = std::max(res, det_res / (1.0 + std::norm(det_c)));
      Eigen::JacobiSVD<ComplexMatrix> svd_c(c);
      Eigen::JacobiSVD<RealMatrix> svd_e(e);
      svd_c.setThreshold(1e-10);
      svd_e.setThreshold(1e-10);
      holds = holds && det_res <= tol.determinant * (1.0 + std::norm(det_c)) &&
              2 * svd_c.rank() == svd_e.rank();
    }
    report.clauses.push_back({"hermitian", true, holds, res, tol.structure * scale});
  }

  {
    Eigen::JacobiSVD<ComplexMatrix> svd_c(c);
    Eigen::JacobiSVD<RealMatrix> svd_e(e);
    const double smin_c = svd_c.singularValues()(p - 1);
    const double smin_e = svd_e.singularValues()(2 * p - 1);
    const double smax = svd_c.singularValues()(0);
    const double res = std::abs(smin_c - smin_e);
    const double thr = tol.structure * (1.0 + smax);
    const bool sing_c = smin_c <= thr;
    const bool sing_e = smin_e <= thr;
    report.clauses.push_back({"nonsingular", true, sing_c == sing_e && res <= thr, res, thr});
  }

  {
    const double uni = max_abs(c.adjoint() * c - ComplexMatrix::Identity(p, p));
    const double orth = max_abs(e.transpose() * e - RealMatrix::Identity(2 * p, 2 * p));
    const double thr = tol.structure * scale * scale;
    report.clauses.push_back(
        {"unitary", true, (uni <= thr) == (orth <= thr), std::abs(uni - orth), thr});
  }

  {
    ClauseResult clause{"quadratic_form", hermitian, true, 0.0, 0.0};
    if (hermitian) {
      std::vector<ComplexVector> owned;
      if (probes.empty()) {
        owned = detail::default_probes(p);
        probes = owned;
      }
      for (const auto& z : probes) {
        if (z.size() != p) {
          fail(ErrorKind::dimension, "check_isomorphism: probe length " +
                                         std::to_string(z.size()) + " does not match " +
                                         std::to_string(p));
        }
        const Complex q = z.dot(c * z);  // z^H C z
        const RealVector ez = embed_vector(z);
        const double r = ez.dot(e * ez);
        const double res = std::abs(q - Complex(r, 0.0));
        const double thr = tol.quadratic_form * (1.0 + std::abs(q));
        // keep the probe closest to violating its bound
        if (clause.threshold == 0.0 || res * clause.threshold > clause.residual * thr) {
          clause.residual = res;
          clause.threshold = thr;
        }
        clause.holds = clause.holds && res <= thr;
      }
    }
    report.clauses.push_back(clause);
  }

  {
    ClauseResult clause{"positive_definite", hermitian, true, 0.0, 0.0};
    if (hermitian) {
      const ComplexMatrix h = 0.5 * (c + c.adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig_c(h, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<RealMatrix> eig_e(embed_matrix(h), Eigen::EigenvaluesOnly);
      const double min_c = eig_c.eigenvalues()(0);
      const double min_e = eig_e.eigenvalues()(0);
      clause.residual = std::abs(min_c - min_e);
      clause.threshold = tol.structure * scale;
      clause.holds = ((min_c > clause.threshold) == (min_e > clause.threshold)) &&
                     clause.residual <= clause.threshold;
    }
    report.clauses.push_back(clause);
  }

  return report;
}

}  // namespace circica::isoreal
