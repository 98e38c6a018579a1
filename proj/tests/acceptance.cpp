// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace circica;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

ComplexNormalModel random_model(Eigen::Index p, double max_l, Rng& rng) {
  return {testkit::random_vector(p, rng),
          testkit::random_complex(p, p, rng) + 0.5 * ComplexMatrix::Identity(p, p),
          testkit::random_spectrum(p, max_l, rng)};
}

Outcome three_to_two_mixing() {
  ComplexMatrix a(2, 3);
  a << 3, 5, 4, 3, -5, 4;
  a /= 5.0 * std::numbers::sqrt2;
  Representation rep{a, {}};
  for (double l : {1.0 / 3, 1.0 / 5, 1.0 / 8}) {
    rep.sources.push_back(declare({detail::atom(Distribution::complex_normal, 1.0, l)}));
  }
  const SecondOrderStats s = mixture_stats(rep);
  const SutResult r = strong_uncorrelating_transform(s);
  const double cov_err = max_abs(s.cov - ComplexMatrix::Identity(2, 2));
  const double spec_err = max_abs(r.spectrum.values - RealVector::Constant(2, 0.2));
  return {cov_err < 1e-10 && spec_err < 1e-10,
          fmt("|cov - I| = %.2e, |spectrum - (1/5, 1/5)| = %.2e", cov_err, spec_err)};
}

Outcome gaussian_separation() {
  const RealVector l = (RealVector(3) << 0.5, 1.0 / 3, 0.0).finished();
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix a = random_mixing(3, 3, derive_seed(2000, seed));
    const SampleMatrix x = a * sample(standard_model(l), 100000, derive_seed(3000, seed));
    const SeparationReport rep = separate_sut(x, 3, {}, a);
    worst = std::max(worst, rep.quality->index);
    if (rep.quality->index < 0.1) ++good;
  }
  return {good >= 19, fmt("%.0f/20 seeds below 0.1, worst index %.4f", good, worst)};
}

Outcome entropy_identity() {
  Rng rng(4000);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(8));
    const ComplexNormalModel m = random_model(p, 0.99, rng);
    const RealMatrix sigma = embedded_covariance(m);
    Eigen::LLT<RealMatrix> llt(sigma);
    const double oracle = static_cast<double>(p) * std::log(2.0 * std::numbers::pi * std::numbers::e) +
                          RealMatrix(llt.matrixL()).diagonal().array().log().sum();
    worst = std::max(worst, std::abs(entropy(m).total - oracle));
  }
  return {worst < 1e-9, fmt("max |H - 1/2 log det(2 pi e Sigma)| = %.2e", worst)};
}

Outcome sut_properties() {
  Rng rng(5000);
  double diag = 0.0;
  double inv = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(8));
    const SecondOrderStats s = testkit::random_valid_stats(p, rng);
    const ComplexMatrix b = testkit::random_complex(p, p, rng) + 0.5 * ComplexMatrix::Identity(p, p);
    const SutResult r1 = strong_uncorrelating_transform(s);
    const SutResult r2 = strong_uncorrelating_transform(transform(s, b));
    diag = std::max({diag, r1.cov_residual, r1.pcov_residual, r2.cov_residual, r2.pcov_residual});
    inv = std::max(inv, max_abs(r1.spectrum.values - r2.spectrum.values));
  }
  return {diag < 1e-8 && inv < 1e-8,
          fmt("max diagonalization residual %.2e, max spectrum change %.2e", diag, inv)};
}

Outcome takagi_suite() {
  Rng rng(6000);
  double recon = 0.0;
  double sv_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(8));
    const ComplexMatrix b = testkit::random_symmetric(p, rng);
    const TakagiFactorization t = takagi(b);
    const Eigen::JacobiSVD<ComplexMatrix> svd(b);
    const RealVector& sv = svd.singularValues();
    recon = std::max(recon, max_abs(t.u * t.lambda.cast<Complex>().asDiagonal() * t.u.transpose() - b));
    sv_rel = std::max(sv_rel, max_abs(t.lambda - sv) / sv(0));
  }
  return {recon < 1e-9 && sv_rel < 1e-10,
          fmt("max reconstruction residual %.2e, max relative singular value gap %.2e", recon,
              sv_rel)};
}

Outcome row_ambiguity() {
  Rng rng(7000);
  int aligned = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(6));
    ComplexNormalModel m = testkit::random_distinct_model(p, 0.02, rng);
    if (trial % 4 == 0) m.spectrum(0) = 0.0;
    const SecondOrderStats s = model_stats(m);
    const SutResult r1 = strong_uncorrelating_transform(s, {Whitening::symmetric});
    const SutResult r2 = strong_uncorrelating_transform(s, {Whitening::cholesky});
    try {
      const RowAlignment al = sut_row_ambiguity(r1, r2);
      for (std::size_t k = 0; k < al.scalars.size(); ++k) {
        const Complex c = al.scalars[k];
        const double d = al.zero_coefficient[k]
                             ? std::abs(std::abs(c) - 1.0)
                             : std::min(std::abs(c - 1.0), std::abs(c + 1.0));
        worst = std::max({worst, d, al.residuals[k]});
      }
      ++aligned;
    } catch (const Error&) {
    }
  }
  return {aligned == 100 && worst < 1e-6,
          fmt("%.0f/100 cases aligned, worst deviation %.2e", aligned, worst)};
}

Outcome counterexamples() {
  const auto nu = demo_nonunique(8000, 100000);
  const auto ni = demo_nonidentifiable(8001, 100000);
  bool orth_exact = true;
  Rng rng(8002);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(8));
    const double l = trial < 2 ? static_cast<double>(trial) : rng.uniform();
    orth_exact = orth_exact && demo_orthogonal_invariance(p, l, derive_seed(8003, trial), 200)
                                   .stats_equal_exact;
  }
  const bool pass = nu.stats_equal_exact && ni.stats_equal_exact && nu.ecf_deviation < 0.03 &&
                    ni.ecf_deviation < 0.03 && orth_exact;
  return {pass, fmt("nonunique ecf dev %.4f, nonidentifiable ecf dev %.4f", nu.ecf_deviation,
                    ni.ecf_deviation) +
                    (nu.stats_equal_exact && ni.stats_equal_exact ? ", moments equal" : ", moments differ") +
                    (orth_exact ? ", orthogonal invariance exact" : ", orthogonal invariance inexact")};
}

Outcome cf_agreement() {
  Rng rng(9000);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(4));
    const ComplexNormalModel m = random_model(p, 1.0, rng);
    const auto points = default_grid_points(p);
    const SampleMatrix x = sample(m, 100000, derive_seed(9001, trial));
    worst = std::max(worst, max_deviation(cf_grid_closed_form(m, points),
                                          cf_grid_empirical(x, points)));
  }
  return {worst < 0.02, fmt("max grid deviation %.4f", worst)};
}

Outcome coefficient_algebra() {
  Rng rng(10000);
  double scale_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = 0.01 + 5 * rng.uniform();
    const SecondOrderStats x = scalar_stats(v, std::polar(v * rng.uniform(), 6.3 * rng.uniform()));
    const Complex c(rng.normal(), rng.normal());
    const SecondOrderStats y = transform(x, ComplexMatrix::Constant(1, 1, c));
    scale_err = std::max(scale_err, std::abs(circularity_coefficient(y) - circularity_coefficient(x)));
  }
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double vx = 0.01 + 5 * rng.uniform();
    const double vy = 0.01 + 5 * rng.uniform();
    const auto x = scalar_stats(vx, std::polar(vx * rng.uniform(), 6.3 * rng.uniform()));
    const auto y = scalar_stats(vy, std::polar(vy * rng.uniform(), 6.3 * rng.uniform()));
    const double bound = std::max(circularity_coefficient(x), circularity_coefficient(y));
    if (combine_coefficients(x, y) > bound + 1e-12) ++violations;
  }
  double eq_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double g = rng.uniform();
    const Complex phase = std::polar(1.0, 6.3 * rng.uniform());
    const double vx = 0.01 + 5 * rng.uniform();
    const double vy = 0.01 + 5 * rng.uniform();
    const double c = combine_coefficients(scalar_stats(vx, g * vx * phase), scalar_stats(vy, g * vy * phase));
    eq_err = std::max(eq_err, std::abs(c - g));
  }
  return {scale_err < 1e-12 && violations == 0 && eq_err < 1e-12,
          fmt("scale invariance error %.2e, equality case error %.2e", scale_err, eq_err) +
              ", " + std::to_string(violations) + " inequality violations"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "three-into-two mixing: cov = I, spectrum (1/5, 1/5)", 1.0, three_to_two_mixing},
      {2, "Gaussian separation, spectrum (1/2, 1/3, 0), 20 seeds", 30.0, gaussian_separation},
      {3, "entropy equals real-embedding entropy, 200 models", 5.0, entropy_identity},
      {4, "SUT diagonalization and spectrum invariance, 500 pairs", 30.0, sut_properties},
      {5, "Takagi reconstruction and singular values, 1000 matrices", 30.0, takagi_suite},
      {6, "SUT row ambiguity is +-1 or unit modulus, 100 cases", 0.0, row_ambiguity},
      {7, "counterexample demos: equal moments, matching c.f.", 0.0, counterexamples},
      {8, "closed-form vs empirical c.f., 20 models", 0.0, cf_agreement},
      {9, "circularity coefficient algebra", 0.0, coefficient_algebra},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = out.pass;
    if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      pass = false;
      out.detail += fmt("; runtime %.2f s exceeds %.0f s", secs, c.time_limit_s);
    }
    if (!pass) ++failed;
    std::printf("%s  criterion %d  %s  [%.2f s]  %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
