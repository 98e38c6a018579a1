#include "circica/ica_model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace circica;

namespace {

using D = Distribution;

SourceDeclaration normal(double l) { return declare({detail::atom(D::complex_normal, 1.0, l)}); }
SourceDeclaration nonnormal(D d = D::qam4, bool analytic = false) {
  return declare({detail::atom(d)}, analytic);
}

bool has_reason(const ModelVerdict& v, const std::string& code) {
  return std::any_of(v.reasons.begin(), v.reasons.end(),
                     [&](const VerdictReason& r) { return r.code == code; });
}

}  // namespace

TEST(IcaModel, CheckReducedExamples) {
  ComplexMatrix a(2, 3);
  a << 1, 2, 0, 0, 0, 1;
  const auto r = check_reduced(a);
  EXPECT_FALSE(r.reduced);
  ASSERT_TRUE(r.pair.has_value());
  EXPECT_EQ(r.pair->first, 0);
  EXPECT_EQ(r.pair->second, 1);

  ComplexMatrix b(2, 3);
  b << 1, 0, 1, 0, 1, 1;
  EXPECT_TRUE(check_reduced(b).reduced);

  ComplexMatrix z = b;
  z.col(1).setZero();
  try {
    check_reduced(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
  }
}

TEST(IcaModel, DeclarationFromSampler) {
  const auto n = normal(0.5);
  EXPECT_EQ(n.kind, SourceKind::complex_normal);
  EXPECT_DOUBLE_EQ(n.circularity, 0.5);
  const auto b = nonnormal(D::bpsk);
  EXPECT_EQ(b.kind, SourceKind::non_normal);
  EXPECT_DOUBLE_EQ(b.circularity, 1.0);
  EXPECT_THROW(declare({detail::atom(D::qam4, 0.0)}), Error);
}

TEST(IcaModel, VerdictSeparable) {
  Representation rep{ComplexMatrix::Identity(2, 2), {normal(0.5), normal(0.2)}};
  const auto v = verdict(rep);
  EXPECT_TRUE(v.separable);
  EXPECT_TRUE(v.identifiable);
  EXPECT_TRUE(v.unique);
  EXPECT_EQ(v.rank, 2);
  EXPECT_TRUE(has_reason(v, "distinct_normal_circularity"));
  EXPECT_TRUE(has_reason(v, "unique_separable"));
}

TEST(IcaModel, VerdictEqualNormalCoefficients) {
  Representation rep{ComplexMatrix::Identity(2, 2), {normal(0.5), normal(0.5)}};
  const auto v = verdict(rep);
  EXPECT_FALSE(v.separable);
  EXPECT_FALSE(v.identifiable);
  EXPECT_FALSE(v.unique);
  EXPECT_TRUE(has_reason(v, "equal_normal_circularity"));
  EXPECT_TRUE(has_reason(v, "identifiability_not_established"));
}

TEST(IcaModel, VerdictOneNormalIsSeparable) {
  Representation rep{ComplexMatrix::Identity(3, 3), {normal(0.0), nonnormal(), nonnormal()}};
  EXPECT_TRUE(verdict(rep).separable);
}

TEST(IcaModel, VerdictOvercompleteWithoutNormals) {
  ComplexMatrix a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  Representation rep{a, {nonnormal(), nonnormal(D::bpsk), nonnormal(D::uniform_disc)}};
  auto v = verdict(rep);
  EXPECT_FALSE(v.separable);
  EXPECT_TRUE(v.identifiable);
  EXPECT_FALSE(v.unique);
  EXPECT_TRUE(has_reason(v, "rank_deficient"));
  EXPECT_TRUE(has_reason(v, "identifiable_no_normal_sources"));
  EXPECT_TRUE(has_reason(v, "uniqueness_not_established"));

  for (auto& s : rep.sources) s.cf_analytic_without_poly_factor = true;
  v = verdict(rep);
  EXPECT_TRUE(v.unique);
  EXPECT_TRUE(has_reason(v, "unique_analytic"));
}

TEST(IcaModel, VerdictOvercompleteWithNormalMentionsDemo) {
  ComplexMatrix a(2, 3);
  a << 1, 1, 0, 1, 0, 1;
  Representation rep{a, {nonnormal(), nonnormal(), normal(0.5)}};
  const auto v = verdict(rep);
  EXPECT_FALSE(v.identifiable);
  const auto it = std::find_if(v.reasons.begin(), v.reasons.end(), [](const VerdictReason& r) {
    return r.code == "identifiability_not_established";
  });
  ASSERT_NE(it, v.reasons.end());
  EXPECT_NE(it->text.find("nonidentifiable"), std::string::npos);
}

TEST(IcaModel, VerdictRejectsUnreducedAndMismatched) {
  ComplexMatrix a(2, 2);
  a << 1, 2, 1, 2;
  EXPECT_THROW(verdict({a, {nonnormal(), nonnormal()}}), Error);
  EXPECT_THROW(verdict({ComplexMatrix::Identity(2, 2), {nonnormal()}}), Error);
}

TEST(IcaModel, QualityIndexExamples) {
  EXPECT_EQ(separation_quality(ComplexMatrix::Identity(3, 3)).index, 0.0);
  ComplexMatrix perm = ComplexMatrix::Zero(3, 3);
  perm(0, 2) = Complex(0, 2);
  perm(1, 0) = -0.5;
  perm(2, 1) = 3.0;
  const auto q = separation_quality(perm);
  EXPECT_EQ(q.index, 0.0);
  EXPECT_EQ(q.permutation, (std::vector<Eigen::Index>{2, 0, 1}));
  EXPECT_FALSE(q.degenerate_permutation);

  const auto flat = separation_quality(ComplexMatrix::Ones(2, 2));
  EXPECT_EQ(flat.index, 1.0);
  EXPECT_TRUE(flat.degenerate_permutation);
  EXPECT_THROW(separation_quality(ComplexMatrix(0, 0)), Error);
}

TEST(IcaModel, QualityIndexInvariances) {
  Rng rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix g = testkit::random_complex(3, 3, rng);
    const double base = separation_quality(g).index;
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    ComplexMatrix scaled = g;
    for (Eigen::Index r = 0; r < 3; ++r) scaled.row(r) *= Complex(rng.normal(), rng.normal());
    EXPECT_NEAR(separation_quality(scaled).index, base, 1e-12);
    Eigen::PermutationMatrix<3> p;
    p.indices() << 2, 0, 1;
    const ComplexMatrix permuted = p * g;
    EXPECT_NEAR(separation_quality(permuted).index, base, 1e-12);
  }
}

TEST(IcaModel, SeparateIdentityMixing) {
  const RealVector l = gaussian_example_spectrum(3);
  const auto rep = separate_sut_stats(model_stats(standard_model(l)), 3, {},
                                      ComplexMatrix::Identity(3, 3));
  EXPECT_TRUE(rep.spectrum_distinct);
  EXPECT_LT(rep.quality->index, 1e-12);
  EXPECT_LT(max_abs(rep.spectrum.values - l), 1e-12);
}

TEST(IcaModel, SeparateGaussianExampleFromSamples) {
  const RealVector l = (RealVector(3) << 0.5, 1.0 / 3, 0.0).finished();
  const ComplexMatrix a = random_mixing(3, 3, 92);
  const SampleMatrix x = a * sample(standard_model(l), 100000, 93);
  const auto rep = separate_sut(x, 3, {}, a);
  EXPECT_TRUE(rep.spectrum_distinct);
  EXPECT_LT(rep.quality->index, 0.1);
  EXPECT_FALSE(rep.quality->degenerate_permutation);
  const SampleMatrix s = demix(rep, x);
  const auto st = estimate_stats(s);
  EXPECT_LT(max_abs(st.cov - ComplexMatrix::Identity(3, 3)), 1e-8);
}

TEST(IcaModel, SeparateWarnsOnTiedSpectrum) {
  const auto rep = separate_sut_stats(model_stats(standard_model(RealVector::Constant(2, 0.3))), 2);
  EXPECT_FALSE(rep.spectrum_distinct);
  ASSERT_EQ(rep.warnings.size(), 1u);
}

TEST(IcaModel, SeparateWideMixing) {
  // p = 4 mixtures of m = 2 sources; the demixing must invert A on its range.
  const RealVector l = (RealVector(2) << 0.8, 0.2).finished();
  const ComplexMatrix a = random_mixing(4, 2, 94);
  SecondOrderStats s;
  s.mean = ComplexVector::Zero(4);
  s.cov = a * a.adjoint();
  s.pcov = a * l.cast<Complex>().asDiagonal() * a.transpose();
  const auto rep = separate_sut_stats(s, 2, {}, a);
  EXPECT_TRUE(rep.subspace_reduced);
  EXPECT_LT(rep.quality->index, 1e-8);
  EXPECT_LT(max_abs(rep.spectrum.values - l), 1e-10);
  // W = G A^# with G = W A diagonal times permutation
  const ComplexMatrix pinv = a.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LT(max_abs(rep.demixing - *rep.gain * pinv), 1e-10);
  EXPECT_THROW(separate_sut_stats(s, 3), NotFullRankError);
  EXPECT_THROW(separate_sut_stats(s, 5), Error);
}

TEST(IcaModel, MixtureStatsAndSampling) {
  ComplexMatrix a(2, 2);
  a << 1, 1, 0, kJ;
  Representation rep{a, {nonnormal(D::bpsk), normal(0.4)}};
  const auto s = mixture_stats(rep);
  const auto est = estimate_stats(sample_mixture(rep, 100000, 95));
  EXPECT_LT(max_abs(est.cov - s.cov), 0.03);
  EXPECT_LT(max_abs(est.pcov - s.pcov), 0.03);
}

TEST(IcaModel, RandomMixingConditioning) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix a = random_mixing(3, 3, seed, 50.0);
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    EXPECT_LT(svd.singularValues()(0) / svd.singularValues()(2), 50.0);
    EXPECT_EQ(a, random_mixing(3, 3, seed, 50.0));
  }
}

TEST(IcaModel, IntegerOrthogonalIsExact) {
  Rng rng(96);
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto o = detail::random_integer_orthogonal(n, rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        detail::Wide acc = 0;
        for (std::size_t k = 0; k < n; ++k) acc += o.numerators[i * n + k] * o.numerators[j * n + k];
        EXPECT_TRUE(acc == (i == j ? o.denominator * o.denominator : 0)) << n;
      }
    }
  }
}

TEST(IcaModel, DemoOrthogonalInvariance) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rep = demo_orthogonal_invariance(3, 0.6, seed, 20000);
    EXPECT_TRUE(rep.stats_equal_exact);
    EXPECT_LT(rep.float_cov_residual, 1e-14);
    EXPECT_NE(rep.rotation, RealMatrix::Identity(3, 3));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rep = demo_orthogonal_invariance(2, 0.4, seed, 100);
    EXPECT_TRUE(rep.stats_equal_exact);
    EXPECT_GT(rep.rotation.cwiseAbs().minCoeff(), 0.1) << "rotation is a signed permutation";
  }
  EXPECT_THROW(demo_orthogonal_invariance(9, 0.5, 1), Error);
  EXPECT_THROW(demo_orthogonal_invariance(2, 1.5, 1), Error);
}

TEST(IcaModel, DemoNonunique) {
  const auto rep = demo_nonunique(97, 50000);
  EXPECT_TRUE(rep.stats_equal_exact);
  EXPECT_TRUE(rep.first_reduced);
  EXPECT_TRUE(rep.second_reduced);
  EXPECT_LT(rep.ecf_deviation, 0.03);
  EXPECT_FALSE(rep.first_verdict.unique);
}

TEST(IcaModel, DemoNonidentifiable) {
  const auto rep = demo_nonidentifiable(98, 50000);
  EXPECT_TRUE(rep.stats_equal_exact);
  EXPECT_TRUE(rep.last_column_collinear_with_none);
  EXPECT_LT(rep.ecf_deviation, 0.03);
  EXPECT_EQ(rep.first_stats.cov, (ComplexMatrix(2, 2) << 6, 1, 1, 5).finished());
  EXPECT_EQ(rep.first_stats.pcov, (ComplexMatrix(2, 2) << 3, 0, 0, 2).finished());
  EXPECT_FALSE(rep.first_verdict.identifiable);
}

TEST(IcaModel, DemoRealEmbeddingGap) {
  const auto rep = demo_real_embedding_gap(3, 99, 100000);
  EXPECT_EQ(rep.expected_spectrum, (RealVector(3) << 0.5, 1.0 / 3, 0.0).finished());
  EXPECT_TRUE(rep.separation.spectrum_distinct);
  EXPECT_LT(rep.separation.quality->index, 0.1);
  EXPECT_EQ(rep.real_cov_residual, 0.0);
  EXPECT_FALSE(rep.rotation_is_signed_permutation);
  EXPECT_THROW(demo_real_embedding_gap(1, 1), Error);
}
