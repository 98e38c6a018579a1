#pragma once

// Complex normal random vectors.
//
// Every (wide-sense) complex normal vector can be written
//
//   n = C (u_R + j u_I) + mu,   u_R ~ N(0, (I + diag l)/2),  u_I ~ N(0, (I - diag l)/2)
//
// with independent real parts, so it is fully described by (mu, C, l). Its
// moments are cov = C C^H and pcov = C diag(l) C^T.

#include "circica/moments.hpp"
#include "circica/random.hpp"
#include "circica/sut.hpp"

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace circica {

struct ComplexNormalModel {
  ComplexVector mean;
  ComplexMatrix mixing;  // C
  RealVector spectrum;   // l, entries in [0, 1]

  Eigen::Index dimension() const { return mixing.rows(); }
};

inline void validate(const ComplexNormalModel& m) {
  const Eigen::Index p = m.mixing.rows();
  if (p < 1 || m.mixing.cols() != p || m.mean.size() != p || m.spectrum.size() != p) {
    fail(ErrorKind::dimension, "complex normal model: inconsistent shapes (mixing " +
                                   dims(m.mixing.rows(), m.mixing.cols()) + ", mean " +
                                   std::to_string(m.mean.size()) + ", spectrum " +
                                   std::to_string(m.spectrum.size()) + ")");
  }
  require_finite(m.mixing, "mixing factor");
  require_finite(m.mean, "mean");
  for (Eigen::Index k = 0; k < p; ++k) {
    const double l = m.spectrum(k);
    if (!(l >= 0.0 && l <= 1.0)) {
      fail(ErrorKind::model, "circularity coefficient " + std::to_string(l) + " at index " +
                                 std::to_string(k) + " outside [0, 1]");
    }
  }
}

/// Standard model with the given spectrum: mean 0, C = I.
inline ComplexNormalModel standard_model(const RealVector& spectrum) {
  const Eigen::Index p = spectrum.size();
  return {ComplexVector::Zero(p), ComplexMatrix::Identity(p, p), spectrum};
}

inline SecondOrderStats model_stats(const ComplexNormalModel& m) {
  validate(m);
  SecondOrderStats s;
  s.mean = m.mean;
  s.cov = m.mixing * m.mixing.adjoint();
  s.cov = 0.5 * (s.cov + s.cov.adjoint()).eval();
  s.pcov = m.mixing * m.spectrum.cast<Complex>().asDiagonal() * m.mixing.transpose();
  s.pcov = 0.5 * (s.pcov + s.pcov.transpose()).eval();
  return s;
}

/// 2p x 2p covariance of the real embedding (Re n; Im n).
inline RealMatrix embedded_covariance(const ComplexNormalModel& m) {
  validate(m);
  const Eigen::Index p = m.dimension();
  RealMatrix e(2 * p, 2 * p);
  e.topLeftCorner(p, p) = m.mixing.real();
  e.topRightCorner(p, p) = -m.mixing.imag();
  e.bottomLeftCorner(p, p) = m.mixing.imag();
  e.bottomRightCorner(p, p) = m.mixing.real();
  RealVector d(2 * p);
  d.head(p) = 0.5 * (RealVector::Ones(p) + m.spectrum);
  d.tail(p) = 0.5 * (RealVector::Ones(p) - m.spectrum);
  return e * d.asDiagonal() * e.transpose();
}

/// Draws n observations (p x n). Block b of kSampleBlock columns uses the
/// stream derive_seed(seed, b); within a block, each observation draws u_R
/// then u_I for each component in order.
inline SampleMatrix sample(const ComplexNormalModel& m, Eigen::Index n, std::uint64_t seed) {
  validate(m);
  if (n < 1) fail(ErrorKind::contract, "sample: sample count must be positive");
  const Eigen::Index p = m.dimension();
  RealVector sd_re(p), sd_im(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    sd_re(k) = std::sqrt(0.5 * (1.0 + m.spectrum(k)));
    sd_im(k) = std::sqrt(0.5 * (1.0 - m.spectrum(k)));
  }
  SampleMatrix out(p, n);
  for (Eigen::Index b0 = 0; b0 < n; b0 += kSampleBlock) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b0 / kSampleBlock)));
    const Eigen::Index len = std::min<Eigen::Index>(n - b0, kSampleBlock);
    ComplexMatrix u(p, len);
    for (Eigen::Index i = 0; i < len; ++i) {
      for (Eigen::Index k = 0; k < p; ++k) {
        const double re = sd_re(k) * rng.normal();
        const double im = sd_im(k) * rng.normal();
        u(k, i) = Complex(re, im);
      }
    }
    out.middleCols(b0, len) = m.mixing * u;
    out.middleCols(b0, len).colwise() += m.mean;
  }
  return out;
}

struct ModelFit {
  ComplexNormalModel model;
  double cov_residual = 0.0;
  double pcov_residual = 0.0;
};

/// The complex normal model with the given moments: C is the inverse of the
/// strong-uncorrelating transform and l its spectrum.
inline ModelFit model_from_stats(const SecondOrderStats& stats, const SutOptions& opt = {}) {
  const SutResult sut = strong_uncorrelating_transform(stats, opt);
  const Eigen::Index p = stats.dimension();
  ModelFit fit;
  fit.model.mean = stats.mean;
  fit.model.mixing = sut.transform.partialPivLu().solve(ComplexMatrix::Identity(p, p));
  fit.model.spectrum = sut.spectrum.values;
  const SecondOrderStats back = model_stats(fit.model);
  const double scale = 1.0 + std::max(max_abs(stats.cov), max_abs(stats.pcov));
  fit.cov_residual = max_abs(back.cov - stats.cov) / scale;
  fit.pcov_residual = max_abs(back.pcov - stats.pcov) / scale;
  const double worst = std::max(fit.cov_residual, fit.pcov_residual);
  if (worst > 1e-8) {
    throw NumericError("model_from_stats: reconstructed moments differ by " +
                           std::to_string(worst),
                       worst);
  }
  return fit;
}

struct EntropyBreakdown {
  double total = 0.0;             // nats
  double log_det_term = 0.0;      // log det(pi e cov)
  double circularity_term = 0.0;  // 1/2 sum log(1 - l_k^2), <= 0
};

/// Differential entropy (nats) of a complex normal vector. Undefined when
/// some l_k = 1, since the distribution is then supported on a subspace.
inline EntropyBreakdown entropy(const ComplexNormalModel& m) {
  validate(m);
  const Eigen::Index p = m.dimension();
  EntropyBreakdown out;
  for (Eigen::Index k = 0; k < p; ++k) {
    const double l = m.spectrum(k);
    if (l >= 1.0 - 1e-12) {
      fail(ErrorKind::entropy_undefined,
           "entropy undefined: circularity coefficient " + std::to_string(l) + " at index " +
               std::to_string(k) + " is 1 (degenerate support)");
    }
    out.circularity_term += 0.5 * std::log1p(-l * l);
  }
  // log det(C C^H) = 2 log |det C|
  const Eigen::PartialPivLU<ComplexMatrix> lu(m.mixing);
  double log_abs_det = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    const double d = std::abs(lu.matrixLU()(k, k));
    if (!(d > 0.0)) throw NotFullRankError("entropy: mixing factor is singular", 0.0);
    log_abs_det += std::log(d);
  }
  out.log_det_term =
      static_cast<double>(p) * std::log(std::numbers::pi * std::numbers::e) + 2.0 * log_abs_det;
  out.total = out.log_det_term + out.circularity_term;
  return out;
}

/// Closed-form characteristic function E[exp(j Re(z^H n))]
///   = exp(-1/4 z^H cov z - 1/4 Re(z^H pcov conj z) + j Re(z^H mu)).
inline Complex cf_closed_form(const ComplexNormalModel& m, const ComplexVector& z) {
  const SecondOrderStats s = model_stats(m);
  if (z.size() != s.dimension()) {
    fail(ErrorKind::dimension, "cf_closed_form: argument length " + std::to_string(z.size()) +
                                   " does not match " + std::to_string(s.dimension()));
  }
  const double quad = z.dot(s.cov * z).real();
  const double pquad = z.dot(s.pcov * z.conjugate()).real();
  const double phase = z.dot(s.mean).real();
  return std::exp(Complex(-0.25 * quad - 0.25 * pquad, phase));
}

namespace detail {

/// Re(conj(z) x) summed over components, in index order.
template <typename ZVec, typename XVec>
double re_inner(const ZVec& z, const XVec& x) {
  double t = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    t += z(k).real() * x(k).real() + z(k).imag() * x(k).imag();
  }
  return t;
}

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline std::uint64_t nth_prime(std::size_t n) {
  std::uint64_t candidate = 1;
  std::size_t found = 0;
  while (found <= n) {
    ++candidate;
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ++found;
  }
  return candidate;
}

}  // namespace detail

/// Empirical characteristic function (1/N) sum_i exp(j Re(z^H x_i)).
inline Complex cf_empirical(const SampleMatrix& x, const ComplexVector& z) {
  if (x.cols() < 1) fail(ErrorKind::insufficient_data, "cf_empirical: no observations");
  if (z.size() != x.rows()) {
    fail(ErrorKind::dimension, "cf_empirical: argument length " + std::to_string(z.size()) +
                                   " does not match " + std::to_string(x.rows()));
  }
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double t = detail::re_inner(z, x.col(i));
    re += std::cos(t);
    im += std::sin(t);
  }
  const auto n = static_cast<double>(x.cols());
  return {re / n, im / n};
}

/// Probe points and c.f. values on them.
struct CfGrid {
  std::vector<ComplexVector> points;
  std::vector<Complex> values;
};

/// Deterministic quasi-random points (Halton sequence) spread uniformly over
/// the polydisc |z_k| <= radius.
inline std::vector<ComplexVector> default_grid_points(Eigen::Index p, std::size_t count = 20,
                                                      double radius = 2.0) {
  std::vector<ComplexVector> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ComplexVector z(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto d = static_cast<std::size_t>(2 * k);
      const double r = radius * std::sqrt(detail::radical_inverse(i + 1, detail::nth_prime(d)));
      const double t =
          2.0 * std::numbers::pi * detail::radical_inverse(i + 1, detail::nth_prime(d + 1));
      z(k) = std::polar(r, t);
    }
    points.push_back(z);
  }
  return points;
}

inline CfGrid cf_grid_closed_form(const ComplexNormalModel& m,
                                  std::span<const ComplexVector> points) {
  CfGrid g;
  g.points.assign(points.begin(), points.end());
  for (const auto& z : points) g.values.push_back(cf_closed_form(m, z));
  return g;
}

inline CfGrid cf_grid_empirical(const SampleMatrix& x, std::span<const ComplexVector> points) {
  CfGrid g;
  g.points.assign(points.begin(), points.end());
  for (const auto& z : points) g.values.push_back(cf_empirical(x, z));
  return g;
}

/// Largest |a_i - b_i| over two grids evaluated on the same points.
inline double max_deviation(const CfGrid& a, const CfGrid& b) {
  if (a.values.size() != b.values.size()) {
    fail(ErrorKind::dimension, "max_deviation: grids have different sizes");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  return worst;
}

struct FactorizationReport {
  double max_deviation = 0.0;
  std::size_t worst_point = 0;
  std::vector<double> deviations;
};

/// Compares the joint empirical c.f. with the product of the marginal
/// empirical c.f.s at each grid point. Independence forces the two to agree;
/// agreement alone does not prove independence.
inline FactorizationReport independence_factorization_check(
    const SampleMatrix& x, std::span<const ComplexVector> points) {
  FactorizationReport rep;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ComplexVector& z = points[i];
    const Complex joint = cf_empirical(x, z);
    Complex product = 1.0;
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      product *= cf_empirical(x.row(k), z.segment(k, 1));
    }
    const double dev = std::abs(joint - product);
    rep.deviations.push_back(dev);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_point = i;
    }
  }
  return rep;
}

}  // namespace circica
