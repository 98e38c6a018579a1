#include "circica/sources.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace circica;

TEST(Random, SeedDerivation) {
  EXPECT_EQ(derive_seed(7, 3), splitmix64(7 ^ splitmix64(4)));
  EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Sources, DistributionNames) {
  for (auto d : {Distribution::complex_normal, Distribution::qam4, Distribution::qam16,
                 Distribution::bpsk, Distribution::uniform_disc, Distribution::uniform_real}) {
    EXPECT_EQ(parse_distribution(to_string(d)), d);
  }
  EXPECT_FALSE(parse_distribution("laplace").has_value());
}

TEST(Sources, UnitVarianceAndPseudoVariance) {
  const std::pair<Distribution, double> cases[] = {
      {Distribution::qam4, 0.0},         {Distribution::qam16, 0.0},
      {Distribution::bpsk, 1.0},         {Distribution::uniform_disc, 0.0},
      {Distribution::uniform_real, 1.0}, {Distribution::complex_normal, 0.7}};
  for (const auto& [d, pv] : cases) {
    const SourceSpec s{{d, d == Distribution::complex_normal ? 0.7 : 0.0, 1.0}};
    EXPECT_EQ(variance(s), 1.0);
    EXPECT_NEAR(std::abs(pseudo_variance(s) - pv), 0.0, 1e-15);
    const auto st = estimate_stats(sample_sources({s}, 200000, 101));
    EXPECT_NEAR(st.cov(0, 0).real(), 1.0, 0.02) << to_string(d);
    EXPECT_NEAR(std::abs(st.pcov(0, 0) - pv), 0.0, 0.02) << to_string(d);
  }
}

TEST(Sources, ScaledSumMoments) {
  const SourceSpec s{{Distribution::bpsk, 0.0, Complex(0, 2)},
                     {Distribution::complex_normal, 0.5, -1.0}};
  EXPECT_EQ(variance(s), 5.0);
  EXPECT_NEAR(std::abs(pseudo_variance(s) - Complex(-3.5, 0)), 0.0, 1e-15);
  EXPECT_FALSE(is_normal(s));
  EXPECT_TRUE(is_normal({{Distribution::complex_normal, 0.1, 1.0}}));
}

TEST(Sources, ConstellationSupport) {
  Rng rng(102);
  for (int i = 0; i < 1000; ++i) {
    const Complex q = draw({Distribution::qam4, 0.0, 1.0}, rng);
    EXPECT_NEAR(std::abs(q), 1.0, 1e-15);
    const Complex b = draw({Distribution::bpsk, 0.0, 1.0}, rng);
    EXPECT_EQ(std::abs(b.real()), 1.0);
    EXPECT_EQ(b.imag(), 0.0);
    EXPECT_LE(std::abs(draw({Distribution::uniform_disc, 0.0, 1.0}, rng)), std::sqrt(2.0));
  }
}

TEST(Sources, SamplingIsDeterministic) {
  const std::vector<SourceSpec> specs{{{Distribution::qam16, 0.0, 1.0}},
                                      {{Distribution::complex_normal, 0.3, 1.0}}};
  EXPECT_EQ(sample_sources(specs, 100, 9), sample_sources(specs, 100, 9));
  EXPECT_NE(sample_sources(specs, 100, 9), sample_sources(specs, 100, 10));
}
