#include "asymmap/replica.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asymmap/parallel.hpp"

namespace asymmap {

namespace {

constexpr DistortionSpec kMseOnly[] = {{DistortionKind::SquaredError}};

ScalarChannel block_channel(const BlockSpec& b, std::span<const PenaltySpec> penalties,
                            double theta, double theta0) {
  return ScalarChannel{theta, theta0, penalties[b.penalty_id], b.c, b};
}

bool same_state(const RsState& a, const RsState& b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-6 * std::max(std::abs(x), std::abs(y)) + 1e-8;
  };
  return close(a.chi, b.chi) && close(a.p, b.p);
}

}  // namespace

FixedPointImage fixed_point_map(const SignalModel& model, const MatrixEnsemble& ens,
                                std::span<const PenaltySpec> penalties, double lambda, double chi,
                                double p, const QuadratureOptions& quad) {
  const auto eff = effective_params(ens, chi, p, lambda, model.lambda0);
  if (!(eff.theta > 0.0) || !(eff.theta0 >= 0.0)) {
    std::ostringstream msg;
    msg << "effective channel out of range: theta=" << eff.theta << ", theta0=" << eff.theta0;
    throw DegenerateEnsembleError(msg.str());
  }
  double se = 0.0;
  double cz = 0.0;
  for (const auto& b : model.blocks) {
    const auto m = channel_moments(block_channel(b, penalties, eff.theta, eff.theta0), kMseOnly,
                                   0.0, quad);
    se += b.fraction * m.se;
    cz += b.fraction * m.cz;
  }
  const double chi_new = eff.theta0 > 0.0 ? std::max(0.0, eff.theta / eff.theta0 * cz) : 0.0;
  return {chi_new, se, eff.theta, eff.theta0};
}

RsSolution solve_rs(const SignalModel& model, const MatrixEnsemble& ens,
                    std::span<const PenaltySpec> penalties, double lambda,
                    const SolveOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("solve_rs: lambda must be positive and finite");
  }
  model.validate(penalties.size());

  double chi = opts.init_chi.value_or(1e-3);
  double p = opts.init_p.value_or(model.second_moment());
  double gamma = opts.damping;
  SolverDiagnostics diag;
  int last_sign = 0;
  std::size_t alternations = 0;
  double residual = 0.0;

  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const auto img = fixed_point_map(model, ens, penalties, lambda, chi, p, opts.quadrature);
    if (img.p < 0.0) throw InternalError("solve_rs: negative mean squared error from quadrature");
    if (!std::isfinite(img.p) || !std::isfinite(img.chi) || img.p > opts.divergence_bound ||
        img.chi > opts.divergence_bound) {
      std::ostringstream msg;
      msg << "solve_rs: iteration diverged at lambda=" << lambda << " after " << it
          << " iterations";
      throw FixedPointError(msg.str(), residual, {chi, p, img.theta, img.theta0, lambda});
    }
    const double dchi = img.chi - chi;
    const double dp = img.p - p;
    residual = std::max(std::abs(dchi), std::abs(dp));
    diag.iterations = it + 1;
    diag.residual = residual;
    if (residual <= opts.tol * (1.0 + std::max(chi, p))) {
      diag.converged = true;
      diag.damping = gamma;
      return {{chi, p, img.theta, img.theta0, lambda}, diag};
    }

    const int sign = (dchi > 0.0) - (dchi < 0.0);
    alternations = (sign != 0 && sign == -last_sign) ? alternations + 1 : 0;
    last_sign = sign;
    if (alternations >= opts.oscillation_window && gamma > opts.min_damping) {
      gamma = std::max(opts.min_damping, 0.5 * gamma);
      ++diag.damping_halvings;
      alternations = 0;
    }
    chi += gamma * dchi;
    p += gamma * dp;
  }
  const auto eff = effective_params(ens, chi, p, lambda, model.lambda0);
  std::ostringstream msg;
  msg << "solve_rs: no convergence in " << opts.max_iter << " iterations at lambda=" << lambda
      << " (residual " << residual << ")";
  throw FixedPointError(msg.str(), residual, {chi, p, eff.theta, eff.theta0, lambda});
}

std::vector<std::pair<double, double>> default_start_grid(const SignalModel& model) {
  const double ex2 = model.second_moment();
  std::vector<std::pair<double, double>> grid;
  grid.emplace_back(1e-3, ex2);
  const double p_hi = std::max(2.0 * ex2, 2e-4);
  for (int i = 0; i < 5; ++i) {
    const double chi = std::pow(10.0, -4.0 + 5.0 * i / 4.0);
    for (int k = 0; k < 5; ++k) {
      const double p = 1e-4 * std::pow(p_hi / 1e-4, k / 4.0);
      grid.emplace_back(chi, p);
    }
  }
  return grid;
}

MultiStartResult multi_start(const SignalModel& model, const MatrixEnsemble& ens,
                             std::span<const PenaltySpec> penalties, double lambda,
                             std::span<const std::pair<double, double>> grid,
                             const SolveOptions& opts, std::size_t threads) {
  struct Attempt {
    std::optional<RsSolution> sol;
    std::string failure;
  };
  auto attempts = parallel_map(grid.size(), threads, [&](std::size_t i) {
    SolveOptions o = opts;
    o.init_chi = grid[i].first;
    o.init_p = grid[i].second;
    try {
      return Attempt{solve_rs(model, ens, penalties, lambda, o), {}};
    } catch (const NoConvergenceError& e) {
      return Attempt{std::nullopt, e.what()};
    } catch (const AccuracyError& e) {
      return Attempt{std::nullopt, e.what()};
    }
  });

  MultiStartResult out;
  for (auto& a : attempts) {
    if (!a.sol) {
      ++out.dropped;
      out.failures.push_back(std::move(a.failure));
      continue;
    }
    const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(),
                                 [&](const RsSolution& s) { return same_state(s.state, a.sol->state); });
    if (!dup) out.solutions.push_back(*a.sol);
  }
  std::stable_sort(out.solutions.begin(), out.solutions.end(),
                   [](const RsSolution& a, const RsSolution& b) { return a.state.p < b.state.p; });
  out.multiple = out.solutions.size() > 1;
  for (auto& s : out.solutions) s.diag.multiple_solutions = out.multiple;
  return out;
}

ReplicaPrediction predict(const RsState& state, const SignalModel& model,
                          std::span<const PenaltySpec> penalties,
                          std::span<const DistortionSpec> distortions,
                          const QuadratureOptions& quad) {
  model.validate(penalties.size());
  ReplicaPrediction out;
  out.distortions.assign(distortions.begin(), distortions.end());
  out.weighted.assign(distortions.size(), 0.0);
  out.state = state;
  const double tol = model.zero_tol();
  for (std::size_t j = 0; j < model.blocks.size(); ++j) {
    const auto& b = model.blocks[j];
    const auto m = channel_moments(block_channel(b, penalties, state.theta, state.theta0),
                                   distortions, tol, quad);
    BlockPrediction bp{j, b.fraction, b.w, m.se, m.cz, m.dist};
    out.mse += b.fraction * m.se;
    for (std::size_t k = 0; k < distortions.size(); ++k) {
      out.weighted[k] += b.fraction * b.w * m.dist[k];
    }
    out.per_block.push_back(std::move(bp));
  }
  return out;
}

}  // namespace asymmap
