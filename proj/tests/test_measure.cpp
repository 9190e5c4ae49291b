#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "gcs/errors.hpp"
#include "gcs/measure.hpp"
#include "test_util.hpp"

using namespace gcs;
using gcs::testing::vec;

namespace {

Matrix upper_example() {
  Matrix a(2, 2);
  a << -2, 1, 0, -1;
  return a;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
  return a;
}

Vector random_diag(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = u(rng);
  return d;
}

}  // namespace

TEST(VectorNorm, PlainNorms) {
  Vector v(3);
  v << 1, -2, 3;
  EXPECT_DOUBLE_EQ(vector_norm(NormKind::l1(), v), 6.0);
  EXPECT_DOUBLE_EQ(vector_norm(NormKind::linf(), v), 3.0);
}

TEST(VectorNorm, ScaledL1) {
  const auto k = NormKind::diagonal(NormTag::L1, vec({2, 1}));
  EXPECT_DOUBLE_EQ(vector_norm(k, Vector::Ones(2)), 3.0);
}

TEST(VectorNorm, DimensionMismatchThrows) {
  const auto k = NormKind::diagonal(NormTag::L1, vec({2, 1}));
  EXPECT_THROW(vector_norm(k, Vector::Ones(3)), ConfigError);
}

TEST(VectorNorm, ZeroOnlyAtOrigin) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector v = random_matrix(rng, 4).col(0);
    for (const auto& k : {NormKind::l1(), NormKind::linf()}) EXPECT_GT(vector_norm(k, v), 0.0);
  }
  EXPECT_EQ(vector_norm(NormKind::l1(), Vector::Zero(4)), 0.0);
}

TEST(Coefficients, ColumnAndRowSums) {
  const Matrix a = upper_example();
  EXPECT_DOUBLE_EQ(coeff_c(a, 0), -2.0);
  EXPECT_DOUBLE_EQ(coeff_c(a, 1), 0.0);
  EXPECT_DOUBLE_EQ(coeff_d(a, 0), -1.0);
  EXPECT_DOUBLE_EQ(coeff_d(a, 1), -1.0);
  EXPECT_DOUBLE_EQ(coeff_c(Matrix::Zero(3, 3), 2), 0.0);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(coeff_d(-Matrix::Identity(3, 3), j), -1.0);
}

TEST(Coefficients, IndexOutOfRangeThrows) {
  EXPECT_THROW(coeff_c(upper_example(), 2), ConfigError);
  EXPECT_THROW(coeff_d(upper_example(), -1), ConfigError);
}

TEST(MatrixMeasure, Examples) {
  EXPECT_DOUBLE_EQ(matrix_measure(NormKind::l1(), upper_example()), 0.0);
  EXPECT_DOUBLE_EQ(matrix_measure(NormKind::linf(), upper_example()), -1.0);
  EXPECT_DOUBLE_EQ(matrix_measure(NormKind::linf(), -Matrix::Identity(3, 3)), -1.0);
}

TEST(MatrixMeasure, ProteinJacobianAtOriginWithDiagonalScaling) {
  // n = 2, alpha = (1, 1), k = 2: J(0) = [[-1, g'(0)], [1, -1]], g'(0) = 1/4.
  Matrix j(2, 2);
  j << -1, 0.25, 1, -1;
  const auto k = NormKind::diagonal(NormTag::L1, vec({1.0, 0.9}));
  const double expected = std::max(-0.1, (0.25 - 0.9) / 0.9);
  EXPECT_NEAR(matrix_measure(k, j), expected, 1e-14);
  EXPECT_NEAR(matrix_measure(k, j), -0.1, 1e-14);
}

TEST(MatrixMeasure, SingularScalingRejected) {
  Matrix p(2, 2);
  p << 1, 1, 1, 1;
  EXPECT_THROW(NormKind::scaled(NormTag::L1, p), ConfigError);
  Matrix q(2, 2);
  q << 1, 0, 0, 1e-14;
  EXPECT_THROW(NormKind::scaled(NormTag::LInf, q), ConfigError);
}

TEST(MatrixMeasure, NonSquareRejected) {
  EXPECT_THROW(matrix_measure(NormKind::l1(), Matrix::Zero(2, 3)), ConfigError);
}

TEST(LimitOracle, Examples) {
  for (const auto& k : {NormKind::l1(), NormKind::linf()})
    EXPECT_NEAR(mu_limit_oracle(k, -Matrix::Identity(3, 3)), -1.0, 1e-8);
  EXPECT_NEAR(mu_limit_oracle(NormKind::l1(), upper_example()), 0.0, 1e-6);
  EXPECT_NEAR(mu_limit_oracle(NormKind::linf(), upper_example()), -1.0, 1e-6);
}

TEST(LimitOracle, RejectsBadLadder) {
  const std::vector<double> up = {1e-3, 1e-2};
  EXPECT_THROW(mu_limit_oracle(NormKind::l1(), upper_example(), up), ConfigError);
  const std::vector<double> empty;
  EXPECT_THROW(mu_limit_oracle(NormKind::l1(), upper_example(), empty), ConfigError);
}

TEST(MeasureProperty, AgreesWithLimitOracle) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + rep % 8;
    const Matrix a = random_matrix(rng, n);
    const Vector d = random_diag(rng, n);
    for (const auto tag : {NormTag::L1, NormTag::LInf}) {
      const NormKind plain = tag == NormTag::L1 ? NormKind::l1() : NormKind::linf();
      EXPECT_NEAR(matrix_measure(plain, a), mu_limit_oracle(plain, a), 1e-6);
      const auto scaled = NormKind::diagonal(tag, d);
      EXPECT_NEAR(matrix_measure(scaled, a), mu_limit_oracle(scaled, a), 1e-6);
    }
  }
}

TEST(MeasureProperty, BoundsSpectralAbscissa) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + rep % 8;
    const Matrix a = random_matrix(rng, n);
    const double abscissa = Eigen::EigenSolver<Matrix>(a).eigenvalues().real().maxCoeff();
    for (const auto& k : {NormKind::l1(), NormKind::linf(), NormKind::diagonal(NormTag::L1, random_diag(rng, n))})
      EXPECT_GE(matrix_measure(k, a), abscissa - 1e-10);
  }
}

TEST(MeasureProperty, TranslationSubadditivityHomogeneity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-3.0, 3.0), alpha(0.0, 4.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + rep % 8;
    const Matrix a = random_matrix(rng, n), b = random_matrix(rng, n);
    const double s = c(rng), al = alpha(rng);
    const Matrix id = Matrix::Identity(n, n);
    for (const auto& k : {NormKind::l1(), NormKind::linf()}) {
      EXPECT_NEAR(matrix_measure(k, a + s * id), matrix_measure(k, a) + s, 1e-12);
      EXPECT_LE(matrix_measure(k, a + b), matrix_measure(k, a) + matrix_measure(k, b) + 1e-12);
      EXPECT_NEAR(matrix_measure(k, al * a), al * matrix_measure(k, a), 1e-11);
    }
  }
}

TEST(MeasureProperty, ScaledIdentity) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 1 + rep % 6;
    const Matrix a = random_matrix(rng, n);
    Matrix p = random_matrix(rng, n) * 0.1 + Matrix::Identity(n, n) * 2.0;
    for (const auto tag : {NormTag::L1, NormTag::LInf}) {
      const NormKind plain = tag == NormTag::L1 ? NormKind::l1() : NormKind::linf();
      const auto scaled = NormKind::scaled(tag, p);
      const Matrix pap = p * a * p.inverse();
      EXPECT_NEAR(matrix_measure(scaled, a), matrix_measure(plain, pap), 1e-10);
    }
  }
}

TEST(MeasureProperty, LInfIsL1OfTranspose) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix a = random_matrix(rng, 1 + rep % 7);
    EXPECT_DOUBLE_EQ(matrix_measure(NormKind::linf(), a), matrix_measure(NormKind::l1(), a.transpose()));
  }
}

TEST(ParseNorm, RoundTrip) {
  EXPECT_EQ(parse_norm("l1").tag(), NormTag::L1);
  EXPECT_FALSE(parse_norm("linf").is_scaled());
  const auto d = parse_norm("l1:diag(1,0.9)");
  EXPECT_TRUE(d.is_scaled());
  EXPECT_DOUBLE_EQ(vector_norm(d, Vector::Ones(2)), 1.9);
  const auto p = parse_norm("linf:P(1,1;0,1)");
  EXPECT_EQ(p.tag(), NormTag::LInf);
  EXPECT_DOUBLE_EQ(vector_norm(p, vec({1, 2})), 3.0);
  const auto again = parse_norm(p.describe());
  EXPECT_DOUBLE_EQ(vector_norm(again, vec({1, 2})), 3.0);
}

TEST(ParseNorm, Malformed) {
  for (const char* s : {"", "l2", "l1:diag(", "linf:P(1,2;3)", "l1:diag(1,x)", "l1:diag(0,1)"})
    EXPECT_THROW(parse_norm(s), ConfigError) << s;
}
