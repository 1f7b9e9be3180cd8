#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "asymmap/sweep.hpp"

using namespace asymmap;

namespace {

SignalModel gaussian_model(double lambda0, double c) {
  SignalModel m;
  m.lambda0 = lambda0;
  m.blocks = {BlockSpec{1.0, 1.0, NonzeroDist::StandardGaussian, c}};
  return m;
}

SignalModel sparse_pair_model(double b, double rho1, double c1) {
  SignalModel m;
  m.lambda0 = 0.01;
  m.blocks = {BlockSpec{1.0 / b, 0.1, NonzeroDist::StandardGaussian, 1.0},
              BlockSpec{1.0 - 1.0 / b, rho1, NonzeroDist::StandardGaussian, c1}};
  return m;
}

}  // namespace

TEST(TuneLambda, MatchedRidgeRecoversNoiseLevel) {
  const std::vector<PenaltySpec> pens{PenaltySpec::l2()};
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto t = tune_lambda(gaussian_model(0.1, 0.5), MatrixEnsemble::marcenko_pastur(alpha), pens);
    EXPECT_NEAR(t.lambda_star, 0.1, 0.005) << "alpha=" << alpha;
    EXPECT_FALSE(t.at_lower_edge);
    EXPECT_FALSE(t.at_upper_edge);
  }
}

TEST(TuneLambda, MinimizerBeatsBracketEdges) {
  const std::vector<PenaltySpec> pens{PenaltySpec::zero_norm()};
  const auto m = sparse_pair_model(5, 0.01, 2.0);
  const auto ens = MatrixEnsemble::marcenko_pastur(0.25);
  TuneOptions o;
  const auto t = tune_lambda(m, ens, pens, o);
  for (double e : {o.log10_lo, o.log10_hi}) {
    try {
      const auto s = solve_rs(m, ens, pens, std::pow(10.0, e));
      EXPECT_LE(t.mse_star, s.state.p);
    } catch (const NoConvergenceError&) {
    }
  }
  EXPECT_EQ(t.mse_star, t.solution.state.p);
  EXPECT_EQ(t.lambda_star, t.solution.state.lambda);
}

TEST(TuneLambda, NoiseFreeZeroNormRunsToLowerEdge) {
  SignalModel m;
  m.lambda0 = 0.0;
  m.blocks = {BlockSpec{1.0, 0.1, NonzeroDist::StandardGaussian, 1.0}};
  const std::vector<PenaltySpec> pens{PenaltySpec::zero_norm()};
  const auto t = tune_lambda(m, MatrixEnsemble::marcenko_pastur(0.5), pens);
  EXPECT_TRUE(t.at_lower_edge);
  EXPECT_NEAR(t.lambda_star, 1e-6, 1e-12);
}

TEST(TuneLambda, WarmAndColdStartsAgree) {
  struct Case {
    SignalModel model;
    PenaltySpec pen;
    double alpha;
  };
  const std::vector<Case> cases{
      {gaussian_model(0.1, 0.5), PenaltySpec::l2(), 0.5},
      {gaussian_model(0.02, 1.0), PenaltySpec::l1(), 0.8},
      {sparse_pair_model(5, 0.01, 1.0), PenaltySpec::l1(), 0.5},
      {sparse_pair_model(7, 0.005, 2.0), PenaltySpec::l1(), 0.3},
      {sparse_pair_model(5, 0.05, 1.5), PenaltySpec::lp(1.5), 0.6},
  };
  for (const auto& c : cases) {
    const std::vector<PenaltySpec> pens{c.pen};
    TuneOptions warm, cold;
    warm.warm_start = true;
    cold.warm_start = false;
    const auto ens = MatrixEnsemble::marcenko_pastur(c.alpha);
    const auto a = tune_lambda(c.model, ens, pens, warm);
    const auto b = tune_lambda(c.model, ens, pens, cold);
    EXPECT_NEAR(a.mse_star, b.mse_star, 1e-6 * b.mse_star) << penalty_name(c.pen.kind);
  }
}

TEST(TuneLambda, RejectsEmptyBracket) {
  TuneOptions o;
  o.log10_lo = 1.0;
  o.log10_hi = 1.0;
  const std::vector<PenaltySpec> pens{PenaltySpec::l2()};
  EXPECT_THROW(tune_lambda(gaussian_model(0.1, 0.5), MatrixEnsemble::marcenko_pastur(1.0), pens, o),
               InvalidArgument);
}

TEST(ThresholdRate, Sentinels) {
  const std::vector<PenaltySpec> pens{PenaltySpec::zero_norm()};
  const auto m = sparse_pair_model(5, 0.01, 1.0);
  const auto ens = MatrixEnsemble::marcenko_pastur(0.5);
  RateOptions o;
  o.prescan_points = 3;
  auto r = threshold_rate(m, ens, pens, m.second_moment(), o);
  EXPECT_EQ(r.status, RateStatus::AboveRange);
  r = threshold_rate(m, ens, pens, 1e-9, o);
  EXPECT_EQ(r.status, RateStatus::Infeasible);
  EXPECT_EQ(rate_status_name(RateStatus::AboveRange), "above_range");
  EXPECT_THROW(threshold_rate(m, ens, pens, 0.0, o), InvalidArgument);
  EXPECT_THROW(threshold_rate(m, MatrixEnsemble::identity(), pens, 1e-3, o), InvalidArgument);
}

TEST(ThresholdRate, RidgeRateHitsTarget) {
  const std::vector<PenaltySpec> pens{PenaltySpec::l2()};
  const auto m = gaussian_model(0.01, 0.5);
  const double mse0 = 0.2;
  const auto r = threshold_rate(m, MatrixEnsemble::marcenko_pastur(1.0), pens, mse0);
  ASSERT_EQ(r.status, RateStatus::Ok);
  EXPECT_LE(r.mse, mse0);
  TuneOptions o;
  const auto above = tune_lambda(m, MatrixEnsemble::marcenko_pastur(1.0 / (r.rate + 1e-3)), pens, o);
  EXPECT_GT(above.mse_star, mse0);
}

TEST(SweepC, CsvAndArgmax) {
  const std::vector<PenaltySpec> pens{PenaltySpec::l2()};
  SignalModel m;
  m.lambda0 = 0.01;
  m.blocks = {BlockSpec{0.5, 1.0, NonzeroDist::StandardGaussian, 0.5},
              BlockSpec{0.5, 1.0, NonzeroDist::StandardGaussian, 0.5}};
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const std::vector<std::size_t> blocks{1};
  const auto a = sweep_c(m, MatrixEnsemble::marcenko_pastur(1.0), pens, grid, blocks, 0.2, {}, 1);
  const auto b = sweep_c(m, MatrixEnsemble::marcenko_pastur(1.0), pens, grid, blocks, 0.2, {}, 3);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  // matched penalty is c = 1/2 in both blocks
  EXPECT_EQ(a.argmax, 1u);
  std::istringstream in(sweep_csv(a));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "c,R_t,lambda_star,mse_at_Rt,chi,p,converged,argmax");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);

  const std::vector<double> bad{1.0, 1.0};
  EXPECT_THROW(sweep_c(m, MatrixEnsemble::marcenko_pastur(1.0), pens, bad, blocks, 0.2), InvalidArgument);
  const std::vector<std::size_t> bad_blocks{2};
  EXPECT_THROW(sweep_c(m, MatrixEnsemble::marcenko_pastur(1.0), pens, grid, bad_blocks, 0.2), InvalidArgument);
}

TEST(SweepC, SymmetricConfigPeaksAtUniformWeight) {
  const std::vector<PenaltySpec> pens{PenaltySpec::zero_norm()};
  const auto m = sparse_pair_model(5, 0.1, 1.0);
  const std::vector<double> grid{0.8, 1.0, 1.25};
  const std::vector<std::size_t> blocks{1};
  const auto r = sweep_c(m, MatrixEnsemble::marcenko_pastur(0.5), pens, grid, blocks, db_to_linear(-25), {}, 3);
  for (const auto& p : r.points) ASSERT_EQ(p.rate.status, RateStatus::Ok);
  EXPECT_EQ(r.argmax, 1u);
}

TEST(Sweep, DbConversion) { EXPECT_NEAR(db_to_linear(-25.0), std::pow(10.0, -2.5), 1e-18); }
