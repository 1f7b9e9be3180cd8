#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymmap/model.hpp"
#include "asymmap/replica.hpp"

namespace asymmap {

/// One draw of y = A x + z with A having i.i.d. N(0, 1/K) entries.
struct Instance {
  Eigen::MatrixXd A;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  FiniteProfile profile;
  std::uint64_t seed = 0;
};

/// K = round(alpha N). Fully determined by the seed.
Instance generate(const SignalModel& model, std::size_t n, double alpha, std::uint64_t seed);

/// Per-trial seed derived from the master seed and the trial index.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// (1 / 2 lambda) ||y - A v||^2, the data-fit term shared by all solvers.
double data_fit(const Instance& inst, double lambda, const Eigen::VectorXd& v);

/// Exact minimizer of (1 / 2 lambda)||y - A v||^2 + sum c_n v_n^2 through the
/// normal equations (A^T A / lambda + 2 diag(c)) v = A^T y / lambda.
Eigen::VectorXd solve_ridge(const Instance& inst, double lambda, std::span<const double> c);

struct ProximalOptions {
  std::size_t max_iter = 100000;
  double rel_decrease = 1e-10;
  std::size_t patience = 10;
  std::size_t power_iterations = 100;
  double lipschitz_safety = 1.05;  ///< multiplies the power-iteration estimate
  Eigen::VectorXd init;            ///< empty: start from zero
};

struct ProximalResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Accelerated proximal gradient (with adaptive restart) for
/// (1 / 2 lambda)||y - A v||^2 + sum c_n |v_n|.
ProximalResult solve_weighted_l1(const Instance& inst, double lambda, std::span<const double> c,
                                 const ProximalOptions& opts = {});

/// Proximal gradient with hard-thresholding prox for the weighted zero-norm
/// objective; a local heuristic used to cross-check the exhaustive solver.
ProximalResult solve_weighted_l0_iht(const Instance& inst, double lambda, std::span<const double> c,
                                     const ProximalOptions& opts = {});

/// (1 / 2 lambda)||y - A v||^2 + sum_{v_n != 0} c_n
double l0_objective(const Instance& inst, double lambda, std::span<const double> c,
                    const Eigen::VectorXd& v);
double l1_objective(const Instance& inst, double lambda, std::span<const double> c,
                    const Eigen::VectorXd& v);

/// Least-squares refit of y on the columns where v is nonzero.
Eigen::VectorXd debias_on_support(const Instance& inst, const Eigen::VectorXd& v);

struct ExhaustiveResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  std::vector<std::size_t> support;
  std::size_t supports_evaluated = 0;
};

/// Global minimizer of the weighted zero-norm objective by enumerating all
/// supports (N <= 22). Rank-deficient supports are skipped; ties go to the
/// smaller support, then the lexicographically smaller index list.
ExhaustiveResult solve_weighted_l0_exhaustive(const Instance& inst, double lambda,
                                              std::span<const double> c);

inline constexpr std::size_t kExhaustiveMaxN = 22;

enum class SolverKind { Ridge, L1, L0Exhaustive };
std::string_view solver_name(SolverKind s) noexcept;
SolverKind solver_from_name(std::string_view name);

/// Histogram with an exact-zero atom and equal-width bins on [lo, hi); values
/// outside the range land in the nearest edge bin.
struct Histogram {
  double lo = -3.0;
  double hi = 3.0;
  std::size_t bins = 20;
  double atom = 0.0;               ///< mass at exact zero
  std::vector<double> mass;        ///< per bin
  double count = 0.0;              ///< samples accumulated

  static Histogram make(double lo, double hi, std::size_t bins);
  void add(double v);
  void merge(const Histogram& o);
  Histogram normalized() const;
  double bin_left(std::size_t i) const;
  double bin_right(std::size_t i) const;
};

/// Total variation distance between two normalized histograms on the same bins.
double total_variation(const Histogram& a, const Histogram& b);

struct ValidationGates {
  double mse_relative = 0.02;  ///< ridge: |empirical - replica| / replica
  double mse_sigmas = 3.0;     ///< per-block |empirical - replica| / SE
  double tv = 0.05;            ///< conditional histogram given x = 0
};

struct ValidationSpec {
  std::size_t n = 2000;
  double alpha = 0.5;
  double lambda = 0.1;
  SolverKind solver = SolverKind::Ridge;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::size_t decoupled_samples = 1000000;
  std::size_t x_bins = 20;
  ProximalOptions proximal;
  ValidationGates gates;
  QuadratureOptions quadrature;
};

struct BlockReport {
  std::size_t block = 0;
  std::size_t size = 0;
  std::vector<double> mean;     ///< per distortion, averaged over trials
  std::vector<double> stderr_;  ///< sample std over trials / sqrt(trials)
  std::vector<double> replica;  ///< replica E[d] per distortion
  double mse_z = 0.0;           ///< (empirical - replica) / SE for squared error
};

struct ConditionalLaw {
  std::string condition;  ///< "x=0" or "x in [a,b)"
  double x_lo = 0.0;
  double x_hi = 0.0;
  Histogram empirical;
  Histogram decoupled;
  double tv = 0.0;
};

struct EmpiricalReport {
  SolverKind solver = SolverKind::Ridge;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t flagged = 0;  ///< trials whose solver hit its iteration cap
  double lambda = 0.0;
  std::vector<DistortionSpec> distortions;
  std::vector<BlockReport> blocks;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double mse_replica = 0.0;
  double mse_relative_delta = 0.0;
  double max_block_z = 0.0;
  std::vector<ConditionalLaw> laws;  ///< laws[0] is the x = 0 condition
  ReplicaPrediction prediction;
  // gate outcomes
  bool gate_mse_relative = true;
  bool gate_block_sigma = true;
  bool gate_tv = true;
  bool passed() const noexcept { return gate_mse_relative && gate_block_sigma && gate_tv; }
};

/// Finite-N recovery experiment against the replica prediction at
/// spec.lambda. Trials run on up to `threads` workers; the report does not
/// depend on the worker count.
EmpiricalReport run_validation(const SignalModel& model, std::span<const PenaltySpec> penalties,
                               std::span<const DistortionSpec> distortions,
                               const ValidationSpec& spec, std::size_t threads = 1);

/// Histogram CSV: bin_left, bin_right, empirical_mass, decoupled_mass. The
/// atom row uses bin_left = bin_right = 0.
std::string law_csv(const ConditionalLaw& law);

}  // namespace asymmap
