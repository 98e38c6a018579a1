#include "circica/isoreal.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace circica;
using namespace circica::isoreal;

TEST(Isoreal, EmbedVectorStacksRealThenImaginary) {
  ComplexVector z(2);
  z << Complex(3, -1), Complex(0, 2);
  RealVector expected(4);
  expected << 3, 0, -1, 2;
  EXPECT_EQ(embed_vector(z), expected);

  ComplexVector one(1);
  one << Complex(1, 2);
  EXPECT_EQ(embed_vector(one), (RealVector(2) << 1, 2).finished());
  EXPECT_EQ(embed_vector(ComplexVector::Zero(2)), RealVector::Zero(4));
}

TEST(Isoreal, EmbedMatrixOfImaginaryUnit) {
  ComplexMatrix c(1, 1);
  c << kJ;
  RealMatrix expected(2, 2);
  expected << 0, -1, 1, 0;
  EXPECT_EQ(embed_matrix(c), expected);
  EXPECT_EQ(embed_matrix(ComplexMatrix::Identity(3, 3)), RealMatrix::Identity(6, 6));
}

TEST(Isoreal, Homomorphism) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = 1 + static_cast<Eigen::Index>(rng.index(5));
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(5));
    const ComplexMatrix c = testkit::random_complex(m, p, rng);
    const ComplexVector z = testkit::random_vector(p, rng);
    const double res = max_abs(embed_vector(c * z) - embed_matrix(c) * embed_vector(z));
    EXPECT_LE(res, 1e-12 * (1.0 + c.norm() * z.norm()));
  }
}

TEST(Isoreal, RoundTripIsExact) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(8));
    const ComplexVector z = testkit::random_vector(p, rng);
    EXPECT_EQ(lift_vector(embed_vector(z)), z);
    const RealVector r = embed_vector(z);
    EXPECT_EQ(embed_vector(lift_vector(r)), r);
    const ComplexMatrix c = testkit::random_complex(p, p + 1, rng);
    EXPECT_EQ(lift_matrix(embed_matrix(c)), c);
    EXPECT_EQ(block_pattern_residual(embed_matrix(c)), 0.0);
  }
  EXPECT_EQ(lift_vector(RealVector::Zero(4)), ComplexVector::Zero(2));
  EXPECT_EQ(lift_vector((RealVector(2) << 1, 2).finished())(0), Complex(1, 2));
}

TEST(Isoreal, OddLengthIsDimensionError) {
  try {
    lift_vector(RealVector::Zero(3));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
  EXPECT_THROW(lift_matrix(RealMatrix::Zero(3, 2)), Error);
}

TEST(Isoreal, IsomorphismIdentity) {
  const auto rep = check_isomorphism(ComplexMatrix::Identity(2, 2));
  EXPECT_TRUE(rep.all_hold());
  ASSERT_NE(rep.find("determinant"), nullptr);
  EXPECT_EQ(rep.find("determinant")->residual, 0.0);
  EXPECT_TRUE(rep.find("unitary")->holds);
}

TEST(Isoreal, IsomorphismDeterminantOfDiag2j) {
  ComplexMatrix c(1, 1);
  c << Complex(0, 2);
  RealMatrix expected(2, 2);
  expected << 0, -2, 2, 0;
  EXPECT_EQ(embed_matrix(c), expected);
  const auto rep = check_isomorphism(c);
  EXPECT_TRUE(rep.find("determinant")->holds);
  EXPECT_NEAR(std::norm(c.determinant()), 4.0, 0.0);
  EXPECT_NEAR(expected.determinant(), 4.0, 1e-15);
  EXPECT_FALSE(rep.find("quadratic_form")->applicable);
}

TEST(Isoreal, IsomorphismRandomUnitaryEmbedsOrthogonal) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(6));
    const ComplexMatrix q = testkit::random_unitary(p, rng);
    const RealMatrix e = embed_matrix(q);
    EXPECT_LT(max_abs(e.transpose() * e - RealMatrix::Identity(2 * p, 2 * p)), 1e-10);
    const auto rep = check_isomorphism(q);
    EXPECT_TRUE(rep.all_hold());
  }
}

TEST(Isoreal, IsomorphismPropertiesOnRandomMatrices) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = 1 + static_cast<Eigen::Index>(rng.index(5));
    const ComplexMatrix c = testkit::random_complex(p, p, rng);
    const auto general = check_isomorphism(c);
    EXPECT_TRUE(general.all_hold()) << "trial " << trial;
    const double det_c = std::norm(c.determinant());
    EXPECT_LE(std::abs(det_c - embed_matrix(c).determinant()), 1e-9 * (1.0 + det_c));

    const ComplexMatrix h = testkit::random_hpd(p, rng);
    std::vector<ComplexVector> probes;
    for (int k = 0; k < 5; ++k) probes.push_back(testkit::random_vector(p, rng));
    const auto herm = check_isomorphism(h, probes);
    EXPECT_TRUE(herm.all_hold()) << "trial " << trial;
    EXPECT_TRUE(herm.find("quadratic_form")->applicable);
    for (const auto& z : probes) {
      const Complex q = z.dot(h * z);
      const RealVector ez = embed_vector(z);
      EXPECT_LE(std::abs(q - ez.dot(embed_matrix(h) * ez)), 1e-10 * (1.0 + std::abs(q)));
    }
  }
}

TEST(Isoreal, IsomorphismDetectsIndefiniteHermitian) {
  ComplexMatrix h(2, 2);
  h << 1, kJ, -kJ, -2;
  const auto rep = check_isomorphism(h);
  EXPECT_TRUE(rep.all_hold());
  EXPECT_TRUE(rep.find("positive_definite")->applicable);
}

TEST(Isoreal, IsomorphismNonSquareMarksClausesInapplicable) {
  const auto rep = check_isomorphism(ComplexMatrix::Ones(2, 3));
  for (const auto& c : rep.clauses) EXPECT_FALSE(c.applicable) << c.name;
}
