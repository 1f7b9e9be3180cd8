#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asymmap/model.hpp"

namespace asymmap {

/// Decoupled scalar system: y = x + z with z ~ N(0, theta0), followed by
/// the scalar MAP estimator at estimation parameter theta.
struct ScalarChannel {
  double theta = 1.0;
  double theta0 = 0.0;
  PenaltySpec penalty;
  double c = 1.0;
  BlockSpec prior;
};

struct ScalarMoments {
  double se = 0.0;            ///< E[(g - x)^2]
  double cz = 0.0;            ///< E[(g - x) z]
  std::vector<double> dist;   ///< E[d(x, g)], aligned with the requested distortions
};

struct QuadratureOptions {
  std::size_t nodes = 400;        ///< per segment
  std::size_t check_nodes = 800;  ///< refinement used for the accuracy check
  bool verify = true;
  double tolerance = 1e-9;        ///< max |refined - base| per moment
  double tail_sigmas = 10.0;
};

/// argmin_v (y - v)^2 / (2 theta) + u(v; c), global minimizer over the reals.
/// Ties between zero and a nonzero candidate resolve to zero.
double scalar_map(const PenaltySpec& penalty, double theta, double c, double y);

/// sup{ y >= 0 : scalar_map(y) == 0 }, the half-width of the dead zone.
double dead_zone(const PenaltySpec& penalty, double theta, double c);

/// Expectations over the scalar channel by segment-wise Gauss-Legendre
/// quadrature, with segments split at the estimator's breakpoints.
/// Throws AccuracyError when the refined rule disagrees beyond tolerance.
ScalarMoments channel_moments(const ScalarChannel& ch, std::span<const DistortionSpec> distortions,
                              double zero_tol = 0.0, const QuadratureOptions& opts = {});

}  // namespace asymmap
