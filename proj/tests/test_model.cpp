#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "asymmap/errors.hpp"
#include "asymmap/model.hpp"

using namespace asymmap;

namespace {

SignalModel make_model(std::vector<double> fractions) {
  SignalModel m;
  m.lambda0 = 0.01;
  for (double f : fractions) m.blocks.push_back(BlockSpec{f, 0.1});
  return m;
}

}  // namespace

TEST(FiniteProfile, Examples) {
  EXPECT_EQ(finite_profile(make_model({0.2, 0.8}), 10).sizes, (std::vector<std::size_t>{2, 8}));
  EXPECT_EQ(finite_profile(make_model({1.0}), 7).sizes, (std::vector<std::size_t>{7}));
  EXPECT_EQ(finite_profile(make_model({1.0 / 3, 1.0 / 3, 1.0 / 3}), 10).sizes,
            (std::vector<std::size_t>{4, 3, 3}));
}

TEST(FiniteProfile, LayoutIsContiguous) {
  auto m = make_model({0.25, 0.75});
  m.blocks[0].c = 1.0;
  m.blocks[1].c = 3.0;
  m.blocks[1].rho = 0.01;
  const auto p = finite_profile(m, 8);
  ASSERT_EQ(p.size(), 8u);
  EXPECT_EQ(p.offsets, (std::vector<std::size_t>{0, 2}));
  for (std::size_t i = 0; i < 8; ++i) {
    const std::size_t j = i < 2 ? 0 : 1;
    EXPECT_EQ(p.block[i], j);
    EXPECT_EQ(p.c[i], m.blocks[j].c);
    EXPECT_EQ(p.rho[i], m.blocks[j].rho);
  }
}

TEST(FiniteProfile, SizesSumAndProximity) {
  const std::vector<double> f{0.13, 0.29, 0.07, 0.51};
  for (std::size_t n : {17u, 31u, 100u, 1001u, 4000u}) {
    const auto s = finite_profile(make_model(f), n).sizes;
    EXPECT_EQ(std::accumulate(s.begin(), s.end(), std::size_t{0}), n);
    for (std::size_t j = 0; j < f.size(); ++j) {
      EXPECT_LT(std::abs(static_cast<double>(s[j]) - f[j] * n), 1.0);
    }
  }
}

TEST(FiniteProfile, Errors) {
  EXPECT_THROW(finite_profile(make_model({0.5, 0.5}), 1), InvalidArgument);
  EXPECT_THROW(finite_profile(make_model({0.01, 0.99}), 10), InvalidArgument);
}

TEST(SignalModel, Validation) {
  auto m = make_model({0.2, 0.7});
  try {
    m.validate(1);
    FAIL() << "fractions summing to 0.9 accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("sum to 1"), std::string::npos);
  }
  m = make_model({0.5, 0.5});
  m.blocks[1].rho = 1.5;
  EXPECT_THROW(m.validate(1), InvalidArgument);
  m.blocks[1].rho = 0.5;
  m.blocks[1].penalty_id = 3;
  EXPECT_THROW(m.validate(1), InvalidArgument);
  m.blocks[1].penalty_id = 0;
  m.validate(1);
  EXPECT_NEAR(m.second_moment(), 0.5 * 0.1 + 0.5 * 0.5, 1e-15);
  EXPECT_NEAR(m.zero_tol(), 1e-8 * std::sqrt(m.second_moment()), 1e-22);
}

TEST(PriorSample, ZeroRhoAlwaysZero) {
  Rng rng(1);
  BlockSpec b{1.0, 0.0};
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(prior_sample(b, rng), 0.0);
}

TEST(PriorSample, Moments) {
  Rng rng(2);
  const int n = 1000000;
  BlockSpec dense{1.0, 1.0};
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += prior_sample(dense, rng);
  EXPECT_NEAR(s / n, 0.0, 0.004);

  BlockSpec sparse{1.0, 0.1};
  double nz = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = prior_sample(sparse, rng);
    nz += x != 0.0;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  EXPECT_NEAR(nz / n, 0.1, 0.001);
  // second moment rho Var(q) within 3 sigma
  const double m2 = s2 / n;
  const double sd = std::sqrt((s4 / n - m2 * m2) / n);
  EXPECT_NEAR(m2, 0.1, 3 * sd);
}

TEST(Penalty, ZeroAtOriginAndEven) {
  const std::vector<PenaltySpec> pens{PenaltySpec::zero_norm(), PenaltySpec::l1(), PenaltySpec::l2(),
                                      PenaltySpec::lp(0.5), PenaltySpec::lp(1.5),
                                      PenaltySpec::zero_norm_plus(SmoothTerm::power(0.3, 2.0)),
                                      PenaltySpec::zero_norm_plus(SmoothTerm::custom(
                                          [](double v) { return std::log1p(v * v); }))};
  for (const auto& p : pens) {
    for (double c : {0.0, 0.5, 2.0}) {
      EXPECT_EQ(p.value(0.0, c), 0.0);
      for (double v : {0.1, 0.7, 3.0}) {
        EXPECT_EQ(p.value(v, c), p.value(-v, c));
        EXPECT_GE(p.value(v, c), 0.0);
      }
    }
  }
  EXPECT_THROW(PenaltySpec::lp(2.5).validate(), InvalidArgument);
  EXPECT_THROW(PenaltySpec::lp(0.0).validate(), InvalidArgument);
}

TEST(Distortion, Examples) {
  EXPECT_DOUBLE_EQ(distortion({DistortionKind::SquaredError}, 1.0, 0.5), 0.25);
  EXPECT_EQ(distortion({DistortionKind::SupportMismatch}, 0.0, 0.0), 0.0);
  EXPECT_EQ(distortion({DistortionKind::IndicatorMismatch}, 0.3, 0.3), 0.0);
  EXPECT_EQ(distortion({DistortionKind::IndicatorMatch}, 0.3, 0.3), 1.0);
  EXPECT_EQ(distortion({DistortionKind::SupportMismatch}, 0.0, 1e-9, 1e-8), 0.0);
  EXPECT_EQ(distortion({DistortionKind::SupportMismatch}, 0.0, 1e-7, 1e-8), 1.0);
  EXPECT_EQ(distortion({DistortionKind::SupportMismatch}, 0.5, 0.0, 1e-8), 1.0);
  for (auto k : {DistortionKind::SquaredError, DistortionKind::SupportMismatch,
                 DistortionKind::IndicatorMismatch}) {
    for (double x : {0.0, -1.2, 3.0}) EXPECT_EQ(distortion({k}, x, x), 0.0);
  }
}

TEST(Names, RoundTrip) {
  for (auto k : {PenaltyKind::ZeroNorm, PenaltyKind::L1, PenaltyKind::L2, PenaltyKind::Lp,
                 PenaltyKind::ZeroNormPlus}) {
    EXPECT_EQ(penalty_from_name(penalty_name(k)), k);
  }
  for (auto k : {DistortionKind::SquaredError, DistortionKind::SupportMismatch,
                 DistortionKind::IndicatorMatch, DistortionKind::IndicatorMismatch}) {
    EXPECT_EQ(distortion_from_name(distortion_name(k)), k);
  }
  EXPECT_THROW(penalty_from_name("l3"), InvalidArgument);
}
