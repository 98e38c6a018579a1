#pragma once

// Scalar source distributions for simulation. Every distribution has zero mean
// and unit variance; the pseudo-variance is what tells them apart at second
// order.
//
//   complex_normal(l)  l in [0, 1]       pvar l
//   qam4               (+-1 +- j)/sqrt2  pvar 0
//   qam16              16-point grid      pvar 0
//   bpsk               +-1               pvar 1
//   uniform_disc       |x| <= sqrt2      pvar 0
//   uniform_real       [-sqrt3, sqrt3]   pvar 1
//
// A source is a sum of independent scaled atoms, which is enough to express
// sums such as s + eta used by the counterexample constructions.

#include "circica/core.hpp"
#include "circica/random.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace circica {

enum class Distribution {
  complex_normal,
  qam4,
  qam16,
  bpsk,
  uniform_disc,
  uniform_real,
};

inline std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::complex_normal: return "complex_normal";
    case Distribution::qam4: return "qam4";
    case Distribution::qam16: return "qam16";
    case Distribution::bpsk: return "bpsk";
    case Distribution::uniform_disc: return "uniform_disc";
    case Distribution::uniform_real: return "uniform_real";
  }
  return "unknown";
}

inline std::optional<Distribution> parse_distribution(std::string_view name) {
  for (Distribution d : {Distribution::complex_normal, Distribution::qam4, Distribution::qam16,
                         Distribution::bpsk, Distribution::uniform_disc,
                         Distribution::uniform_real}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

struct SourceAtom {
  Distribution dist = Distribution::complex_normal;
  /// Circularity coefficient; used by complex_normal only.
  double circularity = 0.0;
  Complex scale = 1.0;
};

using SourceSpec = std::vector<SourceAtom>;

inline Complex unit_pseudo_variance(const SourceAtom& a) {
  switch (a.dist) {
    case Distribution::complex_normal: return a.circularity;
    case Distribution::bpsk:
    case Distribution::uniform_real: return 1.0;
    default: return 0.0;
  }
}

inline double variance(const SourceSpec& s) {
  double v = 0.0;
  for (const auto& a : s) v += std::norm(a.scale);
  return v;
}

inline Complex pseudo_variance(const SourceSpec& s) {
  Complex v = 0.0;
  for (const auto& a : s) v += a.scale * a.scale * unit_pseudo_variance(a);
  return v;
}

/// True iff every atom is complex normal, i.e. the source itself is normal.
inline bool is_normal(const SourceSpec& s) {
  for (const auto& a : s) {
    if (a.dist != Distribution::complex_normal) return false;
  }
  return !s.empty();
}

inline Complex draw(const SourceAtom& a, Rng& rng) {
  switch (a.dist) {
    case Distribution::complex_normal: {
      if (!(a.circularity >= 0.0 && a.circularity <= 1.0)) {
        fail(ErrorKind::model, "complex_normal circularity " + std::to_string(a.circularity) +
                                   " outside [0, 1]");
      }
      const double re = std::sqrt(0.5 * (1.0 + a.circularity)) * rng.normal();
      const double im = std::sqrt(0.5 * (1.0 - a.circularity)) * rng.normal();
      return a.scale * Complex(re, im);
    }
    case Distribution::qam4: {
      const auto k = rng.index(4);
      const double s = std::numbers::sqrt2 / 2.0;
      return a.scale * Complex((k & 1U) ? s : -s, (k & 2U) ? s : -s);
    }
    case Distribution::qam16: {
      const auto k = rng.index(16);
      const double s = 1.0 / std::sqrt(10.0);
      const auto re = static_cast<double>(2 * static_cast<int>(k & 3U) - 3);
      const auto im = static_cast<double>(2 * static_cast<int>(k >> 2U) - 3);
      return a.scale * Complex(s * re, s * im);
    }
    case Distribution::bpsk: return a.scale * (rng.index(2) == 0 ? -1.0 : 1.0);
    case Distribution::uniform_disc: {
      const double r = std::numbers::sqrt2 * std::sqrt(rng.uniform());
      const double t = 2.0 * std::numbers::pi * rng.uniform();
      return a.scale * std::polar(r, t);
    }
    case Distribution::uniform_real:
      return a.scale * (std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0));
  }
  return 0.0;
}

/// Draws n independent observations of m independent sources (m x n). Source
/// k uses the stream derive_seed(seed, k), split into blocks as described in
/// random.hpp.
inline SampleMatrix sample_sources(const std::vector<SourceSpec>& sources, Eigen::Index n,
                                   std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::contract, "sample_sources: sample count must be positive");
  const auto m = static_cast<Eigen::Index>(sources.size());
  SampleMatrix out(m, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const SourceSpec& spec = sources[static_cast<std::size_t>(k)];
    if (spec.empty()) fail(ErrorKind::model, "sample_sources: source with no atoms");
    const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(k));
    for (Eigen::Index b0 = 0; b0 < n; b0 += kSampleBlock) {
      Rng rng(derive_seed(stream, static_cast<std::uint64_t>(b0 / kSampleBlock)));
      const Eigen::Index b1 = std::min<Eigen::Index>(n, b0 + kSampleBlock);
      for (Eigen::Index i = b0; i < b1; ++i) {
        Complex v = 0.0;
        for (const auto& atom : spec) v += draw(atom, rng);
        out(k, i) = v;
      }
    }
  }
  return out;
}

}  // namespace circica
