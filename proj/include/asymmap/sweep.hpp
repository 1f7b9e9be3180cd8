#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asymmap/replica.hpp"

namespace asymmap {

struct TuneOptions {
  double log10_lo = -6.0;
  double log10_hi = 2.0;
  std::size_t iterations = 80;
  double bracket_width = 1e-6;  ///< in log10 units
  std::size_t prescan_points = 17;
  bool warm_start = false;
  bool low_init_fallback = true;  ///< retry from (1e-6, 1e-6 E[x^2]) when the first init fails
  SolveOptions solve;
};

struct TuneResult {
  double lambda_star = 0.0;
  double mse_star = 0.0;
  RsSolution solution;
  bool at_lower_edge = false;
  bool at_upper_edge = false;
  std::size_t evaluations = 0;
  std::size_t failed_evaluations = 0;
};

/// Minimizes the replica mse over log10(lambda) in [lo, hi]: a coarse
/// prescan locates the best bracket, golden-section search refines it.
/// Throws NoConvergenceError when every evaluation fails.
TuneResult tune_lambda(const SignalModel& model, const MatrixEnsemble& ens,
                       std::span<const PenaltySpec> penalties, const TuneOptions& opts = {});

enum class RateStatus { Ok, Infeasible, AboveRange };

std::string_view rate_status_name(RateStatus s) noexcept;

struct RateOptions {
  double inv_alpha_lo = 1.0;
  double inv_alpha_hi = 64.0;
  double tolerance = 1e-3;  ///< absolute, in N/K units
  std::size_t prescan_points = 8;
  double monotone_slack = 1e-6;  ///< relative slack in the monotonicity pre-scan
  TuneOptions tune;
};

struct RateResult {
  RateStatus status = RateStatus::Ok;
  double rate = 0.0;  ///< largest N/K with tuned mse <= mse0
  double lambda_star = 0.0;
  double mse = 0.0;   ///< tuned mse at `rate`
  RsSolution solution;
  std::size_t probes = 0;
};

/// Threshold compression rate R_t(mse0): bisection on N/K, with a λ-tuned
/// mse at every probe. The template ensemble must be Marcenko-Pastur; its
/// load factor is replaced at every probe.
RateResult threshold_rate(const SignalModel& model, const MatrixEnsemble& ens_template,
                          std::span<const PenaltySpec> penalties, double mse0,
                          const RateOptions& opts = {});

struct SweepPoint {
  double axis = 0.0;
  RateResult rate;
  std::optional<ReplicaPrediction> prediction;  ///< at the rate (Ok status only)
  bool converged = false;
};

struct SweepResult {
  std::vector<double> axis;
  std::vector<SweepPoint> points;
  double mse0 = 0.0;
  std::size_t argmax = 0;  ///< index of the largest rate
};

/// R_t for every c in the grid, with c applied to the blocks listed in
/// `c_blocks` and every other block left as in the template.
SweepResult sweep_c(const SignalModel& model_template, const MatrixEnsemble& ens_template,
                    std::span<const PenaltySpec> penalties, std::span<const double> c_grid,
                    std::span<const std::size_t> c_blocks, double mse0,
                    const RateOptions& opts = {}, std::size_t threads = 1);

/// c, R_t, lambda_star, mse_at_Rt, chi, p, converged, argmax
std::string sweep_csv(const SweepResult& r);

/// 10^(db / 10)
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace asymmap
