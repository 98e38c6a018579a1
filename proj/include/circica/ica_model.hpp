#pragma once

// Complex linear ICA model x = A s with independent sources.
//
// Verdicts follow the separability / identifiability / uniqueness conditions:
//   separable    iff A has full column rank and no two complex normal sources
//                share a circularity coefficient;
//   identifiable if no source is complex normal, or the model is separable;
//   unique       if the model is separable, or no source is normal and every
//                source c.f. is analytic without a Gaussian-type exponential
//                factor (declared, never inferred).
// Identifiability and uniqueness are sufficient conditions: false means "not
// established", not "fails".

#include "circica/charutil.hpp"
#include "circica/cnormal.hpp"
#include "circica/moments.hpp"
#include "circica/random.hpp"
#include "circica/sources.hpp"
#include "circica/sut.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace circica {

enum class SourceKind { complex_normal, non_normal };

inline std::string_view to_string(SourceKind k) {
  return k == SourceKind::complex_normal ? "complex_normal" : "non_normal";
}

struct SourceDeclaration {
  SourceKind kind = SourceKind::non_normal;
  /// Required for complex_normal sources.
  double circularity = 0.0;
  bool cf_analytic_without_poly_factor = false;
  /// How to simulate the source; optional for verdicts.
  SourceSpec sampler;
};

/// Declaration derived from a sampler: normal iff every atom is normal, with
/// the circularity coefficient |pvar| / var.
inline SourceDeclaration declare(SourceSpec sampler, bool analytic = false) {
  SourceDeclaration d;
  const double var = variance(sampler);
  if (!(var > 0.0)) fail(ErrorKind::model, "source has zero variance");
  d.kind = is_normal(sampler) ? SourceKind::complex_normal : SourceKind::non_normal;
  d.circularity = std::min(1.0, std::abs(pseudo_variance(sampler)) / var);
  d.cf_analytic_without_poly_factor = analytic;
  d.sampler = std::move(sampler);
  return d;
}

struct Representation {
  ComplexMatrix mixing;  // p x m
  std::vector<SourceDeclaration> sources;
};

inline void validate(const Representation& rep) {
  if (rep.mixing.rows() < 1 || rep.mixing.cols() < 1) {
    fail(ErrorKind::dimension, "representation: empty mixing matrix");
  }
  if (static_cast<std::size_t>(rep.mixing.cols()) != rep.sources.size()) {
    fail(ErrorKind::dimension, "representation: mixing has " + std::to_string(rep.mixing.cols()) +
                                   " columns but " + std::to_string(rep.sources.size()) +
                                   " sources are declared");
  }
  require_finite(rep.mixing, "mixing matrix");
  for (std::size_t k = 0; k < rep.sources.size(); ++k) {
    const auto& s = rep.sources[k];
    if (s.kind == SourceKind::complex_normal && !(s.circularity >= 0.0 && s.circularity <= 1.0)) {
      fail(ErrorKind::model, "source " + std::to_string(k) + ": circularity " +
                                 std::to_string(s.circularity) + " outside [0, 1]");
    }
  }
}

struct ReductionCheck {
  bool reduced = true;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> pair;  // first collinear pair
  double min_residual = std::numeric_limits<double>::infinity();
};

/// Pairwise linear independence of the columns of A. A zero column is a
/// contract error.
inline ReductionCheck check_reduced(const ComplexMatrix& a, double tol = 1e-10) {
  require_finite(a, "check_reduced");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (!(a.col(j).norm() > 0.0)) {
      fail(ErrorKind::contract, "check_reduced: column " + std::to_string(j) + " is zero");
    }
  }
  ReductionCheck out;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double r = collinearity_residual(a.col(i), a.col(j));
      out.min_residual = std::min(out.min_residual, r);
      if (r < tol && out.reduced) {
        out.reduced = false;
        out.pair = {i, j};
      }
    }
  }
  return out;
}

struct VerdictReason {
  std::string code;
  std::string text;
};

struct ModelVerdict {
  bool separable = false;
  bool identifiable = false;
  bool unique = false;
  Eigen::Index rank = 0;
  std::vector<VerdictReason> reasons;
};

struct VerdictOptions {
  double gap_tol = 1e-6;
  double rank_tol = 1e-10;
  double collinear_tol = 1e-10;
};

inline Eigen::Index column_rank(const ComplexMatrix& a, double rank_tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > rank_tol * s(0)) ++r;
  }
  return r;
}

inline ModelVerdict verdict(const Representation& rep, const VerdictOptions& opt = {}) {
  validate(rep);
  const ReductionCheck red = check_reduced(rep.mixing, opt.collinear_tol);
  if (!red.reduced) {
    fail(ErrorKind::contract, "representation is not reduced: columns " +
                                  std::to_string(red.pair->first) + " and " +
                                  std::to_string(red.pair->second) + " are collinear");
  }
  const Eigen::Index m = rep.mixing.cols();
  const Eigen::Index p = rep.mixing.rows();
  ModelVerdict v;
  v.rank = column_rank(rep.mixing, opt.rank_tol);
  const bool full_rank = v.rank == m;
  if (full_rank) {
    v.reasons.push_back({"full_column_rank", "mixing matrix has full column rank " +
                                                 std::to_string(m)});
  } else {
    v.reasons.push_back(
        {"rank_deficient", "mixing matrix has rank " + std::to_string(v.rank) + " < " +
                               std::to_string(m) + " sources" +
                               (p < m ? " (more sources than mixtures)" : "") +
                               "; no separating matrix exists"});
  }

  std::vector<std::size_t> normals;
  for (std::size_t k = 0; k < rep.sources.size(); ++k) {
    if (rep.sources[k].kind == SourceKind::complex_normal) normals.push_back(k);
  }
  std::optional<std::pair<std::size_t, std::size_t>> clash;
  for (std::size_t a = 0; a < normals.size() && !clash; ++a) {
    for (std::size_t b = a + 1; b < normals.size(); ++b) {
      const double ga = rep.sources[normals[a]].circularity;
      const double gb = rep.sources[normals[b]].circularity;
      if (std::abs(ga - gb) <= opt.gap_tol) {
        clash = {normals[a], normals[b]};
        break;
      }
    }
  }
  if (clash) {
    v.reasons.push_back(
        {"equal_normal_circularity",
         "complex normal sources " + std::to_string(clash->first) + " and " +
             std::to_string(clash->second) +
             " have equal circularity coefficients (within " + std::to_string(opt.gap_tol) +
             "); any real orthogonal mixing of the pair keeps them independent"});
  } else if (!normals.empty()) {
    v.reasons.push_back({"distinct_normal_circularity",
                         "complex normal sources have pairwise distinct circularity coefficients"});
  }

  v.separable = full_rank && !clash;
  if (v.separable) {
    v.reasons.push_back({"separable", "full column rank and no two normal sources share a "
                                      "circularity coefficient"});
  }

  const bool no_normals = normals.empty();
  if (no_normals) {
    v.identifiable = true;
    v.reasons.push_back({"identifiable_no_normal_sources",
                         "no source is complex normal, so mixing columns are determined up to "
                         "collinearity"});
  } else if (v.separable) {
    v.identifiable = true;
    v.reasons.push_back({"identifiable_separable", "separable models are identifiable"});
  } else {
    std::string text = "identifiability not established: normal sources present and the model is "
                       "not separable";
    if (p < m) {
      text += "; with more sources than mixtures a single normal source already allows "
              "non-collinear alternative columns (see demo nonidentifiable)";
    }
    v.reasons.push_back({"identifiability_not_established", text});
  }

  bool all_analytic = !rep.sources.empty();
  for (const auto& s : rep.sources) all_analytic = all_analytic && s.cf_analytic_without_poly_factor;
  if (v.separable) {
    v.unique = true;
    v.reasons.push_back({"unique_separable", "separable models are unique"});
  } else if (no_normals && all_analytic) {
    v.unique = true;
    v.reasons.push_back({"unique_analytic",
                         "no normal sources and every source c.f. is declared analytic without an "
                         "exponential factor of degree two or more"});
  } else {
    v.reasons.push_back({"uniqueness_not_established",
                         no_normals ? "uniqueness not established: not separable and not every "
                                      "source c.f. is declared analytic"
                                    : "uniqueness not established: normal sources present and "
                                      "the model is not separable"});
  }
  return v;
}

/// Model-level moments of the mixture: cov = A diag(var) A^H,
/// pcov = A diag(pvar) A^T. Needs a sampler for every source.
inline SecondOrderStats mixture_stats(const Representation& rep) {
  validate(rep);
  const Eigen::Index m = rep.mixing.cols();
  ComplexVector var(m), pvar(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& s = rep.sources[static_cast<std::size_t>(k)];
    if (s.sampler.empty()) {
      fail(ErrorKind::model, "mixture_stats: source " + std::to_string(k) + " has no sampler");
    }
    var(k) = variance(s.sampler);
    pvar(k) = pseudo_variance(s.sampler);
  }
  SecondOrderStats out;
  out.mean = ComplexVector::Zero(rep.mixing.rows());
  out.cov = rep.mixing * var.asDiagonal() * rep.mixing.adjoint();
  out.pcov = rep.mixing * pvar.asDiagonal() * rep.mixing.transpose();
  return out;
}

inline SampleMatrix sample_mixture(const Representation& rep, Eigen::Index n,
                                   std::uint64_t seed) {
  validate(rep);
  std::vector<SourceSpec> specs;
  for (const auto& s : rep.sources) specs.push_back(s.sampler);
  return rep.mixing * sample_sources(specs, n, seed);
}

/// p x m matrix with independent circular standard normal entries, redrawn
/// until its condition number is below max_condition.
inline ComplexMatrix random_mixing(Eigen::Index p, Eigen::Index m, std::uint64_t seed,
                                   double max_condition = 1e3) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    ComplexMatrix a(p, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        a(i, j) = Complex(re, im) * std::sqrt(0.5);
      }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const RealVector& s = svd.singularValues();
    if (s(s.size() - 1) > 0.0 && s(0) / s(s.size() - 1) < max_condition) return a;
  }
}

struct SeparationQuality {
  double index = 0.0;
  std::vector<Eigen::Index> permutation;  // row r recovers source permutation[r]
  std::vector<Complex> row_scalars;       // gain(r, permutation[r])
  bool degenerate_permutation = false;    // two rows picked the same source
};

/// Permutation- and scale-invariant distance of a gain matrix from the class
/// of diagonal-times-permutation matrices. Rows are first normalized by their
/// largest magnitude; then
///   index = [sum_rows (sum_k |g_rk| - 1) + sum_cols (sum_r |g_rk| / max_r |g_rk| - 1)]
///           / (m (n - 1) + n (m - 1))
/// which lies in [0, 1] and is 0 exactly for diagonal-times-permutation gains.
inline SeparationQuality separation_quality(const ComplexMatrix& gain) {
  const Eigen::Index m = gain.rows();
  const Eigen::Index n = gain.cols();
  if (m < 1 || n < 1) fail(ErrorKind::dimension, "separation_quality: empty gain");
  require_finite(gain, "separation_quality");
  RealMatrix g = gain.cwiseAbs();
  SeparationQuality q;
  double rows = 0.0;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Eigen::Index r = 0; r < m; ++r) {
    Eigen::Index arg = 0;
    const double top = g.row(r).maxCoeff(&arg);
    q.permutation.push_back(arg);
    q.row_scalars.push_back(gain(r, arg));
    const auto slot = static_cast<std::size_t>(arg);
    if (taken[slot]) q.degenerate_permutation = true;
    taken[slot] = true;
    if (top > 0.0) {
      g.row(r) /= top;
      rows += g.row(r).sum() - 1.0;
    } else {
      q.degenerate_permutation = true;
      rows += static_cast<double>(n - 1);
    }
  }
  double cols = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const double top = g.col(c).maxCoeff();
    cols += top > 0.0 ? g.col(c).sum() / top - 1.0 : static_cast<double>(m - 1);
  }
  const auto denom = static_cast<double>(m * (n - 1) + n * (m - 1));
  q.index = denom > 0.0 ? (rows + cols) / denom : 0.0;
  return q;
}

struct SeparationOptions {
  /// Defaults to default_gap_tolerance(sample_count).
  std::optional<double> gap_tol;
  SutOptions sut;
};

struct SeparationReport {
  ComplexMatrix demixing;  // m x p
  ComplexVector center;    // subtracted before demixing
  CircularitySpectrum spectrum;
  bool spectrum_distinct = false;
  double gap_tol = 0.0;
  bool subspace_reduced = false;
  double cov_residual = 0.0;
  double pcov_residual = 0.0;
  std::vector<std::string> warnings;
  std::optional<ComplexMatrix> gain;
  std::optional<SeparationQuality> quality;
};

/// Separation by the strong-uncorrelating transform of the mixture moments.
/// With p > m the moments are first projected on the m-dimensional principal
/// subspace of cov. A non-distinct spectrum is reported as a warning.
inline SeparationReport separate_sut_stats(const SecondOrderStats& stats, Eigen::Index m,
                                           const SeparationOptions& opt = {},
                                           const std::optional<ComplexMatrix>& true_mixing = {}) {
  validate(stats);
  const Eigen::Index p = stats.dimension();
  if (m < 1 || m > p) {
    fail(ErrorKind::contract, "separate_sut: need 1 <= m <= p sources, got m = " +
                                  std::to_string(m) + " for p = " + std::to_string(p));
  }
  SeparationReport rep;
  rep.center = stats.mean;
  ComplexMatrix projection = ComplexMatrix::Identity(p, p);
  SecondOrderStats reduced = stats;
  if (m < p) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (stats.cov + stats.cov.adjoint()));
    const RealVector& ev = eig.eigenvalues();
    const double top = ev(p - 1);
    const double kept = ev(p - m);
    if (!(top > 0.0) || !(kept > opt.sut.rank_tol * top)) {
      throw NotFullRankError("separate_sut: covariance has rank below " + std::to_string(m) +
                                 " (eigenvalue " + std::to_string(kept) + ")",
                             kept);
    }
    projection = eig.eigenvectors().rightCols(m).adjoint();
    reduced = transform(stats, projection);
    rep.subspace_reduced = true;
  }
  const SutResult sut = strong_uncorrelating_transform(reduced, opt.sut);
  rep.demixing = sut.transform * projection;
  rep.spectrum = sut.spectrum;
  rep.cov_residual = sut.cov_residual;
  rep.pcov_residual = sut.pcov_residual;
  rep.gap_tol = opt.gap_tol.value_or(default_gap_tolerance(stats.sample_count));
  rep.spectrum_distinct = spectrum_distinct(rep.spectrum, rep.gap_tol);
  if (!rep.spectrum_distinct) {
    rep.warnings.push_back("circularity spectrum is not distinct at gap tolerance " +
                           std::to_string(rep.gap_tol) + "; separation is not guaranteed");
  }
  if (true_mixing) {
    if (true_mixing->rows() != p || true_mixing->cols() != m) {
      fail(ErrorKind::dimension, "separate_sut: true mixing is " +
                                     dims(true_mixing->rows(), true_mixing->cols()) +
                                     ", expected " + dims(p, m));
    }
    rep.gain = rep.demixing * *true_mixing;
    rep.quality = separation_quality(*rep.gain);
  }
  return rep;
}

inline SeparationReport separate_sut(const SampleMatrix& x, Eigen::Index m,
                                     const SeparationOptions& opt = {},
                                     const std::optional<ComplexMatrix>& true_mixing = {}) {
  return separate_sut_stats(estimate_stats(x), m, opt, true_mixing);
}

/// Recovered sources W (x - center), one column per observation.
inline SampleMatrix demix(const SeparationReport& rep, const SampleMatrix& x) {
  if (x.rows() != rep.demixing.cols()) {
    fail(ErrorKind::dimension, "demix: data dimension " + std::to_string(x.rows()) +
                                   " does not match demixing matrix " +
                                   dims(rep.demixing.rows(), rep.demixing.cols()));
  }
  return rep.demixing * (x.colwise() - rep.center);
}

// ---------------------------------------------------------------------------
// Demonstrations

namespace detail {

__extension__ using Wide = __int128;

/// Fraction-free (Bareiss) determinant of a small integer matrix.
inline Wide bareiss_det(std::vector<Wide> a, std::size_t n) {
  if (n == 0) return 1;
  Wide sign = 1;
  Wide prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a[swap * n + k] == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[swap * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
      }
    }
    prev = a[k * n + k];
  }
  return sign * a[(n - 1) * n + (n - 1)];
}

struct IntegerOrthogonal {
  std::vector<Wide> numerators;  // n x n, row-major
  Wide denominator = 1;
};

/// Cayley transform O = (I - S)(I + S)^{-1} of a random integer skew-symmetric
/// S, kept as an exact integer numerator over det(I + S). Rational orthogonal
/// matrices are dense in SO(n); a random row sign reaches the other component.
inline IntegerOrthogonal random_integer_orthogonal(std::size_t n, Rng& rng) {
  std::vector<Wide> s(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // entries in {-3, -2, 2, 3}: S = 0 gives O = I and |s| = 1 a
      // signed permutation when n = 2
      const Wide mag = 2 + static_cast<Wide>(rng.index(2));
      const Wide v = rng.index(2) == 0 ? mag : -mag;
      s[i * n + j] = v;
      s[j * n + i] = -v;
    }
  }
  std::vector<Wide> plus(n * n), minus(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    plus[i] = s[i];
    minus[i] = -s[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    plus[i * n + i] += 1;
    minus[i * n + i] += 1;
  }
  const Wide det = bareiss_det(plus, n);
  // adj(I + S)(i, j) = (-1)^{i+j} minor(j, i)
  std::vector<Wide> adj(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Wide> minor;
      minor.reserve((n - 1) * (n - 1));
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        for (std::size_t c = 0; c < n; ++c) {
          if (c != i) minor.push_back(plus[r * n + c]);
        }
      }
      const Wide m = bareiss_det(minor, n - 1);
      adj[i * n + j] = ((i + j) % 2 == 0) ? m : -m;
    }
  }
  IntegerOrthogonal out;
  out.denominator = det;
  out.numerators.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Wide acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += minus[i * n + k] * adj[k * n + j];
      out.numerators[i * n + j] = acc;
    }
  }
  if (rng.index(2) == 1) {
    for (std::size_t j = 0; j < n; ++j) out.numerators[j] = -out.numerators[j];
  }
  return out;
}

}  // namespace detail

struct OrthogonalInvarianceReport {
  ComplexNormalModel standard;  // C = I, spectrum (l, ..., l)
  ComplexNormalModel rotated;   // C = O
  RealMatrix rotation;
  /// Moments of both models evaluated in exact integer arithmetic.
  SecondOrderStats standard_stats;
  SecondOrderStats rotated_stats;
  bool stats_equal_exact = false;
  /// Same moments evaluated in floating point, for reference.
  double float_cov_residual = 0.0;
  double float_pcov_residual = 0.0;
  double ecf_deviation = 0.0;
};

/// Equal-coefficient normal vectors are invariant under real orthogonal
/// mixing: O (l I) O^T = l I and O O^T = I, so both models have identical
/// moments and hence identical distributions.
inline OrthogonalInvarianceReport demo_orthogonal_invariance(Eigen::Index p, double lambda,
                                                             std::uint64_t seed,
                                                             Eigen::Index samples = 100000) {
  if (p < 1 || p > 8) fail(ErrorKind::contract, "demo_orthogonal_invariance: need 1 <= p <= 8");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    fail(ErrorKind::model, "demo_orthogonal_invariance: lambda outside [0, 1]");
  }
  const auto n = static_cast<std::size_t>(p);
  Rng rng(derive_seed(seed, 0));
  const detail::IntegerOrthogonal o = detail::random_integer_orthogonal(n, rng);

  OrthogonalInvarianceReport rep;
  rep.rotation.resize(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rep.rotation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(o.numerators[i * n + j]) / static_cast<double>(o.denominator);
    }
  }
  const RealVector spectrum = RealVector::Constant(p, lambda);
  rep.standard = standard_model(spectrum);
  rep.rotated = {ComplexVector::Zero(p), rep.rotation.cast<Complex>(), spectrum};
  rep.standard_stats = model_stats(rep.standard);

  // cov = O O^T = N N^T / d^2 and pcov = l O O^T, evaluated exactly.
  const detail::Wide d2 = o.denominator * o.denominator;
  rep.rotated_stats.mean = ComplexVector::Zero(p);
  rep.rotated_stats.cov.resize(p, p);
  rep.rotated_stats.pcov.resize(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      detail::Wide acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += o.numerators[i * n + k] * o.numerators[j * n + k];
      }
      // acc / d2 is an exact rational; it is representable iff it is an
      // integer, which orthogonality makes it (0 or 1).
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      const double v = acc % d2 == 0 ? static_cast<double>(acc / d2)
                                     : static_cast<double>(acc) / static_cast<double>(d2);
      rep.rotated_stats.cov(r, c) = v;
      rep.rotated_stats.pcov(r, c) = lambda * v;
    }
  }
  rep.stats_equal_exact = rep.rotated_stats.cov == rep.standard_stats.cov &&
                          rep.rotated_stats.pcov == rep.standard_stats.pcov;

  const SecondOrderStats fl = model_stats(rep.rotated);
  rep.float_cov_residual = max_abs(fl.cov - rep.standard_stats.cov);
  rep.float_pcov_residual = max_abs(fl.pcov - rep.standard_stats.pcov);

  const auto points = default_grid_points(p);
  const SampleMatrix xa = sample(rep.standard, samples, derive_seed(seed, 1));
  const SampleMatrix xb = sample(rep.rotated, samples, derive_seed(seed, 2));
  rep.ecf_deviation = max_deviation(cf_grid_empirical(xa, points), cf_grid_empirical(xb, points));
  return rep;
}

struct RepresentationPairReport {
  Representation first;
  Representation second;
  SecondOrderStats first_stats;  // model level
  SecondOrderStats second_stats;
  bool stats_equal_exact = false;
  double ecf_deviation = 0.0;  // independent samples of each representation
  bool first_reduced = false;
  bool second_reduced = false;
  ModelVerdict first_verdict;
  ModelVerdict second_verdict;
};

namespace detail {

inline RepresentationPairReport compare_representations(Representation a, Representation b,
                                                        std::uint64_t seed,
                                                        Eigen::Index samples) {
  RepresentationPairReport rep;
  rep.first = std::move(a);
  rep.second = std::move(b);
  rep.first_stats = mixture_stats(rep.first);
  rep.second_stats = mixture_stats(rep.second);
  rep.stats_equal_exact = rep.first_stats.cov == rep.second_stats.cov &&
                          rep.first_stats.pcov == rep.second_stats.pcov;
  rep.first_reduced = check_reduced(rep.first.mixing).reduced;
  rep.second_reduced = check_reduced(rep.second.mixing).reduced;
  rep.first_verdict = verdict(rep.first);
  rep.second_verdict = verdict(rep.second);
  const auto points = default_grid_points(rep.first.mixing.rows());
  const SampleMatrix xa = sample_mixture(rep.first, samples, derive_seed(seed, 1));
  const SampleMatrix xb = sample_mixture(rep.second, samples, derive_seed(seed, 2));
  rep.ecf_deviation = max_deviation(cf_grid_empirical(xa, points), cf_grid_empirical(xb, points));
  return rep;
}

inline SourceAtom atom(Distribution d, double scale = 1.0, double circularity = 0.0) {
  return {d, circularity, scale};
}

}  // namespace detail

/// Circularity coefficient of the normal components in the counterexamples.
inline constexpr double kDemoNormalCircularity = 0.5;

/// Two representations of one mixture with mixing [[1,0,1,1],[0,1,1,-1]]:
///   (s1, s2, s3 + e1, s4 + e2)  and  (s1 + e1 + e2, s2 + e1 - e2, s3, s4)
/// with e1, e2 normal of equal circularity. The model is identifiable but the
/// source distributions are not unique.
inline RepresentationPairReport demo_nonunique(std::uint64_t seed,
                                               Eigen::Index samples = 100000) {
  using D = Distribution;
  const double l = kDemoNormalCircularity;
  ComplexMatrix a(2, 4);
  a << 1, 0, 1, 1, 0, 1, 1, -1;
  const SourceAtom s1 = detail::atom(D::qam4);
  const SourceAtom s2 = detail::atom(D::bpsk);
  const SourceAtom s3 = detail::atom(D::uniform_disc);
  const SourceAtom s4 = detail::atom(D::uniform_real);
  const SourceAtom e = detail::atom(D::complex_normal, 1.0, l);
  const SourceAtom e_neg = detail::atom(D::complex_normal, -1.0, l);

  Representation first{a, {declare({s1}), declare({s2}), declare({s3, e}), declare({s4, e})}};
  Representation second{a, {declare({s1, e, e}), declare({s2, e, e_neg}), declare({s3}),
                            declare({s4})}};
  return detail::compare_representations(std::move(first), std::move(second), seed, samples);
}

struct NonidentifiableReport : RepresentationPairReport {
  /// collinearity_residual of the last column of the second mixing against
  /// each column of the first; all are far from zero.
  std::vector<double> last_column_residuals;
  bool last_column_collinear_with_none = false;
};

/// x = (s1 + s2 + 2 e1, s1 + 2 e2) written with mixings [[1,1,0],[1,0,1]] and
/// [[1,1,1],[1,0,-1]]; the last column of the second is collinear with no
/// column of the first, so the model is not identifiable.
inline NonidentifiableReport demo_nonidentifiable(std::uint64_t seed,
                                                  Eigen::Index samples = 100000) {
  using D = Distribution;
  const double l = kDemoNormalCircularity;
  ComplexMatrix a1(2, 3);
  a1 << 1, 1, 0, 1, 0, 1;
  ComplexMatrix a2(2, 3);
  a2 << 1, 1, 1, 1, 0, -1;
  const SourceAtom s1 = detail::atom(D::qam16);
  const SourceAtom s2 = detail::atom(D::uniform_real);
  const SourceAtom e = detail::atom(D::complex_normal, 1.0, l);
  const SourceAtom e2 = detail::atom(D::complex_normal, 2.0, l);
  const SourceAtom e_neg = detail::atom(D::complex_normal, -1.0, l);

  Representation first{a1, {declare({s1}), declare({s2, e2}), declare({e2})}};
  Representation second{a2, {declare({s1, e, e}), declare({s2}), declare({e, e_neg})}};
  NonidentifiableReport rep;
  static_cast<RepresentationPairReport&>(rep) =
      detail::compare_representations(std::move(first), std::move(second), seed, samples);
  const ComplexVector last = rep.second.mixing.col(2);
  rep.last_column_collinear_with_none = true;
  for (Eigen::Index j = 0; j < rep.first.mixing.cols(); ++j) {
    const double r = collinearity_residual(rep.first.mixing.col(j), last);
    rep.last_column_residuals.push_back(r);
    if (r < 1e-10) rep.last_column_collinear_with_none = false;
  }
  return rep;
}

/// Spectrum (m-k)/(m-k+2), k = 1..m: distinct, from (m-1)/(m+1) down to 0.
inline RealVector gaussian_example_spectrum(Eigen::Index m) {
  RealVector l(m);
  for (Eigen::Index k = 1; k <= m; ++k) {
    l(k - 1) = static_cast<double>(m - k) / static_cast<double>(m - k + 2);
  }
  return l;
}

struct RealEmbeddingGapReport {
  RealVector expected_spectrum;
  ComplexMatrix mixing;
  SeparationReport separation;
  /// Real orthogonal 2m x 2m matrix acting on the embedded real Gaussian
  /// sources; it preserves their covariance, so the real model cannot tell
  /// the sources apart from their rotated mixtures.
  RealMatrix real_rotation;
  double real_cov_residual = 0.0;  // |R R^T - I|, exact
  bool rotation_is_signed_permutation = true;
};

/// All-Gaussian sources with distinct circularity coefficients: separable as
/// a complex model by the strong-uncorrelating transform, while the same
/// sources viewed as 2m real Gaussians admit nontrivial rotations.
inline RealEmbeddingGapReport demo_real_embedding_gap(Eigen::Index m, std::uint64_t seed,
                                                      Eigen::Index samples = 100000) {
  if (m < 2) fail(ErrorKind::contract, "demo_real_embedding_gap: need m >= 2");
  RealEmbeddingGapReport rep;
  rep.expected_spectrum = gaussian_example_spectrum(m);
  rep.mixing = random_mixing(m, m, derive_seed(seed, 0));
  const ComplexNormalModel sources = standard_model(rep.expected_spectrum);
  const SampleMatrix x = rep.mixing * sample(sources, samples, derive_seed(seed, 1));
  rep.separation = separate_sut(x, m, {}, rep.mixing);

  // Real sources (Re s; Im s) scaled to unit variance are i.i.d. N(0, 1); a
  // 4 x 4 Hadamard rotation on the first four is exact in floating point.
  const Eigen::Index q = 2 * m;
  rep.real_rotation = RealMatrix::Identity(q, q);
  RealMatrix h(4, 4);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  rep.real_rotation.topLeftCorner(4, 4) = 0.5 * h;
  rep.real_cov_residual =
      max_abs(rep.real_rotation * rep.real_rotation.transpose() - RealMatrix::Identity(q, q));
  for (Eigen::Index r = 0; r < q; ++r) {
    Eigen::Index nonzero = 0;
    for (Eigen::Index c = 0; c < q; ++c) nonzero += rep.real_rotation(r, c) != 0.0 ? 1 : 0;
    if (nonzero != 1) rep.rotation_is_signed_permutation = false;
  }
  return rep;
}

}  // namespace circica
