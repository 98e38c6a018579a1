#pragma once

// Two constructive lemmas behind the characterization of linear mixtures:
//
//  * find_nonorthogonal: a vector not orthogonal to any of finitely many
//    nonzero vectors, built incrementally as b <- b + c a_k with c chosen off a
//    finite forbidden set.
//  * collinearity_reduce: a 2 x p matrix C such that C a_k is collinear with
//    no other C a_j, given that a_k itself is collinear with no other a_j.

#include "circica/core.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace circica {

/// sin of the angle between a and b as complex lines: 0 iff collinear.
inline double collinearity_residual(const ComplexVector& a, const ComplexVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  const ComplexVector r = b - a * (a.dot(b) / (na * na));
  return r.norm() / nb;
}

inline bool collinear(const ComplexVector& a, const ComplexVector& b, double tol = 1e-10) {
  return collinearity_residual(a, b) < tol;
}

namespace detail {

inline void require_family(std::span<const ComplexVector> family, const char* who) {
  if (family.empty()) fail(ErrorKind::contract, std::string(who) + ": empty vector family");
  const Eigen::Index p = family.front().size();
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].size() != p) {
      fail(ErrorKind::dimension, std::string(who) + ": vector " + std::to_string(i) +
                                     " has length " + std::to_string(family[i].size()) +
                                     ", expected " + std::to_string(p));
    }
    require_finite(family[i], who);
    if (!(family[i].norm() > 0.0)) {
      fail(ErrorKind::contract, std::string(who) + ": vector " + std::to_string(i) + " is zero");
    }
  }
}

/// min_i |<b, a_i>| / (|b| |a_i|) over the first `count` vectors.
inline double min_overlap(const ComplexVector& b, std::span<const ComplexVector> family,
                          std::size_t count) {
  const double nb = b.norm();
  if (!(nb > 0.0)) return 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    worst = std::min(worst, std::abs(family[i].dot(b)) / (nb * family[i].norm()));
  }
  return worst;
}

}  // namespace detail

struct NonorthogonalOptions {
  /// Relative clearance |<b, a_i>| / (|b||a_i|) each step must keep.
  double margin = 1e-6;
  int max_multiplier = 256;
};

/// Returns b with <b, a_k> != 0 for every a_k in the family.
inline ComplexVector find_nonorthogonal(std::span<const ComplexVector> family,
                                        const NonorthogonalOptions& opt = {}) {
  detail::require_family(family, "find_nonorthogonal");
  ComplexVector beta = family.front();
  static constexpr std::array<Complex, 4> kTurns{Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                                 Complex(0, -1)};
  for (std::size_t k = 1; k < family.size(); ++k) {
    const ComplexVector& a = family[k];
    ComplexVector best = beta + a;
    double best_overlap = -1.0;
    bool accepted = false;
    for (int n = 1; n <= opt.max_multiplier && !accepted; ++n) {
      for (const Complex turn : kTurns) {
        const ComplexVector cand = beta + (static_cast<double>(n) * turn) * a;
        const double ov = detail::min_overlap(cand, family, k + 1);
        if (ov > best_overlap) {
          best_overlap = ov;
          best = cand;
        }
        if (ov > opt.margin) {
          accepted = true;
          break;
        }
      }
    }
    if (!(best_overlap > 0.0)) {
      throw NumericError("find_nonorthogonal: no admissible multiplier found", best_overlap);
    }
    beta = best;
  }
  return beta;
}

struct CollinearityReduction {
  Eigen::Index selected = 0;       // coordinate picked by the first row
  ComplexMatrix c;                 // 2 x p
  double min_separation = 0.0;     // min_j |det[C a_k, C a_j]| / (|C a_k||C a_j|)
};

/// Builds C (2 x p) whose first row selects the largest coordinate of a_k and
/// whose second row w satisfies w d_j != 0 for every
///   d_j = a_k[i] a_j - a_j[i] a_k,
/// which is exactly det[C a_k, C a_j] != 0.
inline CollinearityReduction collinearity_reduce(std::span<const ComplexVector> columns,
                                                 std::size_t k, double collinear_tol = 1e-10) {
  detail::require_family(columns, "collinearity_reduce");
  if (k >= columns.size()) {
    fail(ErrorKind::dimension, "collinearity_reduce: index " + std::to_string(k) +
                                   " out of range for " + std::to_string(columns.size()) +
                                   " columns");
  }
  const ComplexVector& ak = columns[k];
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j != k && collinear(ak, columns[j], collinear_tol)) {
      fail(ErrorKind::contract, "collinearity_reduce: column " + std::to_string(k) +
                                    " is collinear with column " + std::to_string(j));
    }
  }
  CollinearityReduction out;
  const Eigen::Index p = ak.size();
  ak.cwiseAbs().maxCoeff(&out.selected);
  const Complex pivot = ak(out.selected);

  std::vector<ComplexVector> diffs;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j == k) continue;
    diffs.push_back((pivot * columns[j] - columns[j](out.selected) * ak).conjugate());
  }

  out.c = ComplexMatrix::Zero(2, p);
  out.c(0, out.selected) = 1.0;
  if (diffs.empty()) {
    out.c(1, (out.selected + 1) % p) = 1.0;
    out.min_separation = std::numeric_limits<double>::infinity();
    return out;
  }
  out.c.row(1) = find_nonorthogonal(diffs).transpose();

  out.min_separation = std::numeric_limits<double>::infinity();
  const ComplexVector ik = out.c * ak;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j == k) continue;
    const ComplexVector ij = out.c * columns[j];
    const double det = std::abs(ik(0) * ij(1) - ik(1) * ij(0));
    const double sep = det / (ik.norm() * ij.norm());
    out.min_separation = std::min(out.min_separation, sep);
    if (!(sep > 1e-10)) {
      throw NumericError("collinearity_reduce: image of column " + std::to_string(j) +
                             " is collinear with the image of column " + std::to_string(k),
                         sep);
    }
  }
  return out;
}

}  // namespace circica
