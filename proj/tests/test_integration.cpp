#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace circica;

// simulate -> CSV -> read -> estimate -> separate, all through the public API.
TEST(Pipeline, SimulateWriteReadSeparate) {
  using D = Distribution;
  const ComplexMatrix a = random_mixing(3, 3, 121);
  // circularity coefficients 1, 1/2, 0.3
  Representation rep{a,
                     {declare({detail::atom(D::bpsk)}),
                      declare({detail::atom(D::uniform_real), detail::atom(D::qam4)}),
                      declare({detail::atom(D::complex_normal, 1.0, 0.3)})}};
  const SampleMatrix x = sample_mixture(rep, 100000, 122);

  std::stringstream buf;
  csv::write(buf, x);
  const SampleMatrix y = csv::read(buf);
  ASSERT_EQ(y, x);

  const auto stats = estimate_stats(y);
  const auto partitioned = estimate_stats_partitioned(y, 4096);
  EXPECT_LT(max_abs(stats.cov - partitioned.cov), 1e-12);

  const auto sep = separate_sut(y, 3, {}, a);
  EXPECT_TRUE(sep.spectrum_distinct);
  EXPECT_LT(sep.quality->index, 0.1);
  EXPECT_NEAR(sep.spectrum.values(0), 1.0, 0.02);
  EXPECT_NEAR(sep.spectrum.values(1), 0.5, 0.02);
  EXPECT_NEAR(sep.spectrum.values(2), 0.3, 0.02);

  const auto v = verdict(rep);
  EXPECT_TRUE(v.separable);
}

TEST(Pipeline, GaussianModelFitAndEntropy) {
  Rng rng(123);
  const auto m = testkit::random_distinct_model(3, 0.1, rng);
  const auto fit = model_from_stats(estimate_stats(sample(m, 200000, 124)));
  EXPECT_LT(max_abs(fit.model.spectrum - RealVector(m.spectrum.reverse())), 0.03);
  EXPECT_NEAR(entropy(fit.model).total, entropy(m).total, 0.05);
}
