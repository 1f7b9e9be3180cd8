#include <gtest/gtest.h>

#include <cmath>

#include "asymmap/ensembles.hpp"
#include "asymmap/errors.hpp"
#include "oracles.hpp"

using namespace asymmap;

TEST(RTransform, MarcenkoPasturExamples) {
  const auto mp = MatrixEnsemble::marcenko_pastur(0.5);
  EXPECT_DOUBLE_EQ(r_transform(mp, 0.0), 1.0);
  EXPECT_NEAR(r_transform(mp, -2.0), 0.2, 1e-15);
  EXPECT_NEAR(r_transform_deriv(mp, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(r_transform_deriv(mp, -2.0), 0.08, 1e-15);
}

TEST(RTransform, Identity) {
  const auto id = MatrixEnsemble::identity();
  for (double w : {0.0, -0.5, -1.0, -10.0}) {
    EXPECT_EQ(r_transform(id, w), 1.0);
    EXPECT_EQ(r_transform_deriv(id, w), 0.0);
  }
}

TEST(RTransform, MarcenkoPasturGrid) {
  const double alpha = 0.5;
  const auto mp = MatrixEnsemble::marcenko_pastur(alpha);
  for (int i = 0; i < 100; ++i) {
    const double w = -10.0 * i / 99.0;
    EXPECT_NEAR(r_transform(mp, w), alpha / (alpha - w), 1e-12);
  }
}

TEST(RTransform, DerivativeMatchesFiniteDifference) {
  const auto mp = MatrixEnsemble::marcenko_pastur(0.5);
  for (double w : {0.0, -0.1, -2.0, -7.5}) {
    const double h = 1e-5;
    const double fd = (r_transform(mp, w + h) - r_transform(mp, w - h)) / (2 * h);
    EXPECT_NEAR(r_transform_deriv(mp, w), fd, 1e-8);
  }
}

TEST(RTransform, DomainErrors) {
  const auto mp = MatrixEnsemble::marcenko_pastur(0.5);
  EXPECT_THROW(r_transform(mp, 0.5), DomainError);
  EXPECT_THROW(r_transform(mp, 1.0), DomainError);
  EXPECT_THROW(r_transform_deriv(mp, 0.7), DomainError);
  EXPECT_THROW(MatrixEnsemble::marcenko_pastur(0.0), InvalidArgument);
  EXPECT_THROW(MatrixEnsemble::empirical({}, 1.0), InvalidArgument);
  EXPECT_THROW(MatrixEnsemble::empirical({1.0, -0.1}, 1.0), InvalidArgument);
}

TEST(RTransform, EmpiricalFromGramMatrix) {
  // K = 2000, N = 4000: alpha = 0.5
  const auto eig = oracle::gram_spectrum(2000, 4000, 11);
  const auto emp = MatrixEnsemble::empirical(eig, 0.5);
  EXPECT_NEAR(emp.mean_eigenvalue(), 1.0, 5e-3);
  EXPECT_NEAR(r_transform(emp, -2.0), 0.2, 1e-2);
  EXPECT_NEAR(r_transform(emp, 0.0), emp.mean_eigenvalue(), 1e-14);
}

TEST(RTransform, EmpiricalFromMpSamples) {
  const double alpha = 0.5;
  const auto emp = MatrixEnsemble::empirical(oracle::mp_samples(alpha, 100000, 5), alpha);
  const auto mp = MatrixEnsemble::marcenko_pastur(alpha);
  for (int i = 0; i <= 50; ++i) {
    const double w = -5.0 * i / 50.0;
    EXPECT_NEAR(r_transform(emp, w), r_transform(mp, w), 1e-2) << "omega=" << w;
  }
}

TEST(RTransform, EmpiricalDerivativeAndContinuity) {
  const auto emp = MatrixEnsemble::empirical(oracle::mp_samples(0.5, 20000, 9), 0.5);
  for (double w : {-0.3, -1.0, -4.0}) {
    const double h = 1e-4;
    const double fd = (r_transform(emp, w + h) - r_transform(emp, w - h)) / (2 * h);
    EXPECT_NEAR(r_transform_deriv(emp, w), fd, 1e-6);
  }
  // R is continuous through omega = 0
  EXPECT_NEAR(r_transform(emp, -1e-7), r_transform(emp, 0.0), 1e-6);
  EXPECT_NEAR(r_transform_deriv(emp, 0.0), emp.eigenvalue_variance(), 1e-4);
  EXPECT_THROW(r_transform(emp, 0.1), DomainError);
}

TEST(RTransform, SingleAtomSpectrum) {
  // G(s) = 1/(c - s) gives R = c.
  const auto emp = MatrixEnsemble::empirical({2.0, 2.0, 2.0}, 1.0);
  for (double w : {0.0, -0.5, -3.0}) {
    EXPECT_NEAR(r_transform(emp, w), 2.0, 1e-9);
    EXPECT_NEAR(r_transform_deriv(emp, w), 0.0, 1e-6);
  }
}

TEST(RTransform, LoadEmpiricalFile) {
  const auto e = MatrixEnsemble::load_empirical(ASYMMAP_SOURCE_DIR "/tests/data/eigs_small.txt", 1.0);
  ASSERT_EQ(e.eigenvalues().size(), 3u);
  EXPECT_DOUBLE_EQ(e.mean_eigenvalue(), 1.0);
  EXPECT_THROW(MatrixEnsemble::load_empirical("/nonexistent/eigs.txt", 1.0), InvalidArgument);
}

TEST(EffectiveParams, WorkedExample) {
  const auto mp = MatrixEnsemble::marcenko_pastur(0.5);
  const auto e = effective_params(mp, 0.2, 0.05, 0.1, 0.01);
  EXPECT_NEAR(e.theta, 0.5, 1e-12);
  EXPECT_NEAR(e.theta0, 0.11, 1e-12);
  const auto z = effective_params(mp, 0.0, 0.0, 0.3, 0.0);
  EXPECT_EQ(z.theta0, 0.0);
}

TEST(EffectiveParams, GeneralPathMatchesClosedForm) {
  const double alpha = 0.5;
  const auto mp = MatrixEnsemble::marcenko_pastur(alpha);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const double chi = 0.05 * i * i;
        const double p = 0.03 * j;
        const double lambda = std::pow(10.0, -3.0 + 0.4 * k);
        const auto g = effective_params(mp, chi, p, lambda, 0.01);
        const auto c = effective_params_mp(alpha, chi, p, lambda, 0.01);
        EXPECT_NEAR(g.theta, c.theta, 1e-8 * std::max(1.0, c.theta));
        EXPECT_NEAR(g.theta0, c.theta0, 1e-8 * std::max(1.0, c.theta0));
      }
}

TEST(EffectiveParams, IdentityEnsemble) {
  const auto id = MatrixEnsemble::identity();
  const auto e = effective_params(id, 0.4, 0.2, 0.1, 0.05);
  EXPECT_NEAR(e.theta, 0.1, 1e-15);
  EXPECT_NEAR(e.theta0, 0.05, 1e-15);
}
