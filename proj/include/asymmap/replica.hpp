#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asymmap/ensembles.hpp"
#include "asymmap/errors.hpp"
#include "asymmap/model.hpp"
#include "asymmap/scalar.hpp"

namespace asymmap {

/// Replica-symmetric order parameters and the effective scalar channel.
struct RsState {
  double chi = 0.0;
  double p = 0.0;
  double theta = 1.0;
  double theta0 = 0.0;
  double lambda = 1.0;
};

struct SolverDiagnostics {
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double damping = 0.5;           ///< damping in effect at exit
  std::size_t damping_halvings = 0;
  bool multiple_solutions = false;  ///< set by multi_start
};

struct SolveOptions {
  std::optional<double> init_chi;  ///< default 1e-3
  std::optional<double> init_p;    ///< default E[x^2]
  double damping = 0.5;
  double min_damping = 0.05;
  std::size_t oscillation_window = 10;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  double divergence_bound = 1e12;
  QuadratureOptions quadrature;
};

struct RsSolution {
  RsState state;
  SolverDiagnostics diag;
};

/// Thrown when the damped iteration hits its cap or diverges; carries the
/// last iterate.
class FixedPointError : public NoConvergenceError {
 public:
  FixedPointError(const std::string& what, double residual, RsState last)
      : NoConvergenceError(what, residual), last_(last) {}
  const RsState& last_state() const noexcept { return last_; }

 private:
  RsState last_;
};

/// One application of the fixed-point map at (chi, p).
struct FixedPointImage {
  double chi;
  double p;
  double theta;
  double theta0;
};

FixedPointImage fixed_point_map(const SignalModel& model, const MatrixEnsemble& ens,
                                std::span<const PenaltySpec> penalties, double lambda, double chi,
                                double p, const QuadratureOptions& quad = {});

/// Damped Picard iteration on
///   p   = <E[(g - x)^2]>
///   chi = (theta / theta0) <E[(g - x) z]>
/// averaged over blocks with their fractions.
RsSolution solve_rs(const SignalModel& model, const MatrixEnsemble& ens,
                    std::span<const PenaltySpec> penalties, double lambda,
                    const SolveOptions& opts = {});

struct MultiStartResult {
  std::vector<RsSolution> solutions;  ///< distinct, sorted by p ascending
  bool multiple = false;
  std::size_t dropped = 0;            ///< starts that failed to converge
  std::vector<std::string> failures;
};

/// 5x5 log grid over chi in [1e-4, 10] and p in [1e-4, 2 E[x^2]], plus the
/// canonical start (1e-3, E[x^2]) first.
std::vector<std::pair<double, double>> default_start_grid(const SignalModel& model);

MultiStartResult multi_start(const SignalModel& model, const MatrixEnsemble& ens,
                             std::span<const PenaltySpec> penalties, double lambda,
                             std::span<const std::pair<double, double>> grid,
                             const SolveOptions& opts = {}, std::size_t threads = 1);

struct BlockPrediction {
  std::size_t block = 0;
  double fraction = 0.0;
  double w = 1.0;
  double se = 0.0;
  double cz = 0.0;
  std::vector<double> dist;  ///< E[d] per requested distortion
};

struct ReplicaPrediction {
  std::vector<DistortionSpec> distortions;
  std::vector<double> weighted;  ///< D_w per requested distortion
  double mse = 0.0;
  std::vector<BlockPrediction> per_block;
  RsState state;
  SolverDiagnostics diag;
};

/// Per-block scalar-channel moments at the state's (theta, theta0), aggregated
/// as D_w = sum_j fraction_j w_j E[d]_j and mse = sum_j fraction_j se_j.
ReplicaPrediction predict(const RsState& state, const SignalModel& model,
                          std::span<const PenaltySpec> penalties,
                          std::span<const DistortionSpec> distortions,
                          const QuadratureOptions& quad = {});

}  // namespace asymmap
