#include "asymmap/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "asymmap/errors.hpp"
#include "asymmap/quadrature.hpp"

namespace asymmap {

namespace {

constexpr int kRootIterations = 200;
constexpr int kCustomScanIntervals = 256;

template <class F>
double find_root(F&& f, double a, double b, double fa, double fb) {
  std::uintmax_t iters = kRootIterations;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (lo + hi);
}

// Minimizer over v > 0 of (y - v)^2/(2 theta) + c v^p for y > 0, or 0 if
// zero wins. For p < 1 the stationarity map is convex in v with a single
// minimum at vstar; the local minimizer is the root right of vstar.
double lp_positive(double y, double theta, double c, double p) {
  if (c == 0.0) return y;
  auto phi = [&](double v) { return (v - y) / theta + c * p * std::pow(v, p - 1.0); };
  auto obj = [&](double v) { return (y - v) * (y - v) / (2.0 * theta) + c * std::pow(v, p); };
  if (p < 1.0) {
    const double vstar = std::pow(c * p * (1.0 - p) * theta, 1.0 / (2.0 - p));
    if (vstar >= y) return 0.0;
    const double fs = phi(vstar);
    if (fs >= 0.0) return 0.0;
    const double v = find_root(phi, vstar, y, fs, phi(y));
    return obj(v) < y * y / (2.0 * theta) ? v : 0.0;
  }
  // 1 < p < 2: strictly convex, unique root in (0, y).
  return find_root(phi, 0.0, y, -y / theta, phi(y));
}

double zero_norm_plus_positive(const SmoothTerm& f, double y, double theta, double c) {
  auto phi = [&](double v) { return (v - y) / theta + f.derivative(v); };
  auto obj = [&](double v) { return (y - v) * (y - v) / (2.0 * theta) + f.value(v) + c; };
  const double zero_obj = y * y / (2.0 * theta);

  double best_v = 0.0;
  double best = zero_obj;
  auto consider = [&](double v) {
    const double o = obj(v);
    if (o < best) {
      best = o;
      best_v = v;
    }
  };

  if (f.kind == SmoothTerm::Kind::Power) {
    // convex f: at most one stationary point on (0, y)
    const double f0 = -y / theta + f.derivative(0.0);
    if (f0 >= 0.0) return 0.0;
    const double fy = phi(y);
    if (fy <= 0.0) {
      consider(y);
    } else {
      consider(find_root(phi, 0.0, y, f0, fy));
    }
    return best_v;
  }

  const double step = y / kCustomScanIntervals;
  double a = 0.0;
  double fa = phi(std::min(step * 1e-9, y));
  for (int i = 1; i <= kCustomScanIntervals; ++i) {
    const double b = (i == kCustomScanIntervals) ? y : step * i;
    const double fb = phi(b);
    if (fa == 0.0) {
      consider(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      consider(find_root(phi, a, b, fa, fb));
    }
    a = b;
    fa = fb;
  }
  consider(y);
  return best_v;
}

double scalar_map_positive(const PenaltySpec& pen, double theta, double c, double y) {
  switch (pen.kind) {
    case PenaltyKind::ZeroNorm:
      return y > std::sqrt(2.0 * theta * c) ? y : 0.0;
    case PenaltyKind::L1:
      return std::max(y - theta * c, 0.0);
    case PenaltyKind::L2:
      return y / (1.0 + 2.0 * theta * c);
    case PenaltyKind::Lp:
      if (pen.exponent == 1.0) return std::max(y - theta * c, 0.0);
      if (pen.exponent == 2.0) return y / (1.0 + 2.0 * theta * c);
      return lp_positive(y, theta, c, pen.exponent);
    case PenaltyKind::ZeroNormPlus:
      return zero_norm_plus_positive(pen.smooth, y, theta, c);
  }
  throw InternalError("unknown penalty kind");
}

// sup{ y >= 0 : |g(y)| <= level } for the monotone estimator g.
double level_edge(const PenaltySpec& pen, double theta, double c, double level, double lo) {
  auto above = [&](double y) { return std::abs(scalar_map_positive(pen, theta, c, y)) > level; };
  double hi = std::max(1.0, 2.0 * lo);
  for (int i = 0; i < 400 && !above(hi); ++i) hi *= 2.0;
  if (!above(hi)) throw NoConvergenceError("dead-zone search did not find a nonzero output");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double gaussian_pdf(double y, double var) {
  return std::exp(-0.5 * y * y / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Value of d(x, g) for x != 0 drawn from a continuous law: x coincides with
// g(y) only on a null set when the channel noise is nondegenerate.
double nonzero_distortion(DistortionSpec d, double g, double zero_tol) {
  switch (d.kind) {
    case DistortionKind::SupportMismatch: return std::abs(g) <= zero_tol ? 1.0 : 0.0;
    case DistortionKind::IndicatorMatch: return 0.0;
    case DistortionKind::IndicatorMismatch: return 1.0;
    case DistortionKind::SquaredError: break;
  }
  throw InternalError("squared error is accumulated separately");
}

struct Accumulator {
  double se = 0.0;
  double cz = 0.0;
  std::vector<double> dist;
};

// All integrands are even in y (g is odd), so integrate over [0, L] and double.
template <class Body>
void integrate_half_line(const GaussLegendre& rule, std::vector<double> cuts, double upper,
                         Body&& body) {
  cuts.push_back(0.0);
  cuts.push_back(upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    if (a < 0.0 || b > upper || !(b > a)) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      body(mid + half * rule.nodes[i], 2.0 * half * rule.weights[i]);
    }
  }
}

ScalarMoments evaluate(const ScalarChannel& ch, std::span<const DistortionSpec> distortions,
                       double zero_tol, const std::vector<double>& cuts, const GaussLegendre& rule,
                       double tail_sigmas) {
  const std::size_t nd = distortions.size();
  const double rho = ch.prior.rho;
  const double theta0 = ch.theta0;
  auto g = [&](double y) { return scalar_map_positive(ch.penalty, ch.theta, ch.c, y); };

  Accumulator zero_branch{0.0, 0.0, std::vector<double>(nd, 0.0)};
  Accumulator gauss_branch{0.0, 0.0, std::vector<double>(nd, 0.0)};

  if (theta0 > 0.0) {
    if (rho < 1.0) {
      const double upper = tail_sigmas * std::sqrt(theta0);
      integrate_half_line(rule, cuts, upper, [&](double y, double wt) {
        const double gy = g(y);
        const double w = wt * gaussian_pdf(y, theta0);
        zero_branch.se += w * gy * gy;
        zero_branch.cz += w * gy * y;
        for (std::size_t k = 0; k < nd; ++k) {
          if (distortions[k].kind != DistortionKind::SquaredError) {
            zero_branch.dist[k] += w * distortion(distortions[k], 0.0, gy, zero_tol);
          }
        }
      });
    }
    if (rho > 0.0) {
      // y ~ N(0, 1 + theta0); x | y ~ N(y / (1 + theta0), theta0 / (1 + theta0))
      const double vy = 1.0 + theta0;
      const double cond_var = theta0 / vy;
      const double upper = tail_sigmas * std::sqrt(vy);
      integrate_half_line(rule, cuts, upper, [&](double y, double wt) {
        const double gy = g(y);
        const double m = y / vy;
        const double w = wt * gaussian_pdf(y, vy);
        gauss_branch.se += w * ((gy - m) * (gy - m) + cond_var);
        gauss_branch.cz += w * ((gy - m) * (y - m) + cond_var);
        for (std::size_t k = 0; k < nd; ++k) {
          if (distortions[k].kind != DistortionKind::SquaredError) {
            gauss_branch.dist[k] += w * nonzero_distortion(distortions[k], gy, zero_tol);
          }
        }
      });
    }
  } else {
    // Deterministic channel: y = x, and the zero branch maps 0 to 0.
    for (std::size_t k = 0; k < nd; ++k) {
      if (distortions[k].kind != DistortionKind::SquaredError) {
        zero_branch.dist[k] = distortion(distortions[k], 0.0, 0.0, zero_tol);
      }
    }
    if (rho > 0.0) {
      integrate_half_line(rule, cuts, tail_sigmas, [&](double x, double wt) {
        const double gx = g(x);
        const double w = wt * gaussian_pdf(x, 1.0);
        gauss_branch.se += w * (gx - x) * (gx - x);
        for (std::size_t k = 0; k < nd; ++k) {
          if (distortions[k].kind != DistortionKind::SquaredError) {
            gauss_branch.dist[k] += w * distortion(distortions[k], x, gx, zero_tol);
          }
        }
      });
    }
  }

  ScalarMoments out;
  out.se = (1.0 - rho) * zero_branch.se + rho * gauss_branch.se;
  out.cz = theta0 > 0.0 ? (1.0 - rho) * zero_branch.cz + rho * gauss_branch.cz : 0.0;
  out.dist.resize(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    out.dist[k] = distortions[k].kind == DistortionKind::SquaredError
                      ? out.se
                      : (1.0 - rho) * zero_branch.dist[k] + rho * gauss_branch.dist[k];
  }
  return out;
}

}  // namespace

double scalar_map(const PenaltySpec& penalty, double theta, double c, double y) {
  if (!std::isfinite(y)) throw InvalidArgument("scalar_map: observation is not finite");
  if (!(theta > 0.0)) throw InvalidArgument("scalar_map: theta must be positive");
  if (y == 0.0) return 0.0;
  const double v = scalar_map_positive(penalty, theta, c, std::abs(y));
  return y < 0.0 ? -v : v;
}

double dead_zone(const PenaltySpec& penalty, double theta, double c) {
  if (!(theta > 0.0)) throw InvalidArgument("dead_zone: theta must be positive");
  switch (penalty.kind) {
    case PenaltyKind::ZeroNorm:
      return std::sqrt(2.0 * theta * c);
    case PenaltyKind::L1:
      return theta * c;
    case PenaltyKind::L2:
      return 0.0;
    case PenaltyKind::Lp:
      if (penalty.exponent == 1.0) return theta * c;
      if (penalty.exponent > 1.0) return 0.0;
      return c == 0.0 ? 0.0 : level_edge(penalty, theta, c, 0.0, 0.0);
    case PenaltyKind::ZeroNormPlus:
      return level_edge(penalty, theta, c, 0.0, 0.0);
  }
  throw InternalError("unknown penalty kind");
}

ScalarMoments channel_moments(const ScalarChannel& ch, std::span<const DistortionSpec> distortions,
                              double zero_tol, const QuadratureOptions& opts) {
  if (!(ch.theta > 0.0) || !std::isfinite(ch.theta)) {
    throw InvalidArgument("channel_moments: theta must be positive and finite");
  }
  if (!(ch.theta0 >= 0.0) || !std::isfinite(ch.theta0)) {
    throw InvalidArgument("channel_moments: theta0 must be finite and >= 0");
  }
  std::vector<double> cuts;
  const double dz = dead_zone(ch.penalty, ch.theta, ch.c);
  if (dz > 0.0) cuts.push_back(dz);
  const bool wants_support = std::any_of(distortions.begin(), distortions.end(), [](auto d) {
    return d.kind == DistortionKind::SupportMismatch;
  });
  if (wants_support && zero_tol > 0.0) {
    cuts.push_back(level_edge(ch.penalty, ch.theta, ch.c, zero_tol, dz));
  }

  const ScalarMoments base =
      evaluate(ch, distortions, zero_tol, cuts, gauss_legendre(opts.nodes), opts.tail_sigmas);
  if (opts.verify) {
    const ScalarMoments fine = evaluate(ch, distortions, zero_tol, cuts,
                                        gauss_legendre(opts.check_nodes), opts.tail_sigmas);
    double worst = std::max(std::abs(base.se - fine.se), std::abs(base.cz - fine.cz));
    for (std::size_t k = 0; k < base.dist.size(); ++k) {
      worst = std::max(worst, std::abs(base.dist[k] - fine.dist[k]));
    }
    // relative to the channel's own scale once that exceeds 1
    if (!(worst <= opts.tolerance * std::max(1.0, ch.theta0 + ch.prior.rho))) {
      std::ostringstream msg;
      msg << "channel_moments: quadrature with " << opts.nodes << " and " << opts.check_nodes
          << " nodes disagrees by " << worst << " (theta=" << ch.theta
          << ", theta0=" << ch.theta0 << ", c=" << ch.c << ")";
      throw AccuracyError(msg.str());
    }
  }
  if (!std::isfinite(base.se) || !std::isfinite(base.cz)) {
    throw AccuracyError("channel_moments: non-finite moment");
  }
  return base;
}

}  // namespace asymmap
