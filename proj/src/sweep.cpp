#include "asymmap/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "asymmap/parallel.hpp"

namespace asymmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr DistortionSpec kMse[] = {{DistortionKind::SquaredError}};

struct Evaluator {
  const SignalModel& model;
  const MatrixEnsemble& ens;
  std::span<const PenaltySpec> penalties;
  const TuneOptions& opts;
  std::optional<RsState> previous;
  std::size_t evaluations = 0;
  std::size_t failures = 0;

  struct Point {
    double log_lambda;
    double mse;
    std::optional<RsSolution> sol;
  };

  std::optional<RsSolution> attempt(double log_lambda, const SolveOptions& so) {
    try {
      auto sol = solve_rs(model, ens, penalties, std::pow(10.0, log_lambda), so);
      previous = sol.state;
      return sol;
    } catch (const NoConvergenceError&) {
    } catch (const DegenerateEnsembleError&) {
    } catch (const AccuracyError&) {
    }
    return std::nullopt;
  }

  Point operator()(double log_lambda) {
    ++evaluations;
    SolveOptions so = opts.solve;
    if (opts.warm_start && previous) {
      so.init_chi = previous->chi;
      so.init_p = previous->p;
    }
    if (auto sol = attempt(log_lambda, so)) return {log_lambda, sol->state.p, sol};
    if (opts.low_init_fallback) {
      so.init_chi = 1e-6;
      so.init_p = 1e-6 * model.second_moment();
      if (auto sol = attempt(log_lambda, so)) return {log_lambda, sol->state.p, sol};
    }
    ++failures;
    return {log_lambda, kInf, std::nullopt};
  }
};

}  // namespace

TuneResult tune_lambda(const SignalModel& model, const MatrixEnsemble& ens,
                       std::span<const PenaltySpec> penalties, const TuneOptions& opts) {
  if (!(opts.log10_hi > opts.log10_lo)) throw InvalidArgument("tune_lambda: empty bracket");
  model.validate(penalties.size());
  Evaluator eval{model, ens, penalties, opts, std::nullopt};

  // Large lambda first: the all-zero regime always converges and gives the
  // warm start a well-defined branch to follow downwards.
  const std::size_t n = std::max<std::size_t>(opts.prescan_points, 3);
  std::vector<Evaluator::Point> scan;
  scan.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);
    scan.push_back(eval(opts.log10_lo + t * (opts.log10_hi - opts.log10_lo)));
  }
  std::reverse(scan.begin(), scan.end());  // ascending in lambda

  Evaluator::Point best = scan.front();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan[i].mse < best.mse) {
      best = scan[i];
      best_idx = i;
    }
  }
  if (!std::isfinite(best.mse)) {
    throw NoConvergenceError("tune_lambda: no lambda in the bracket produced a converged state");
  }

  if (best_idx > 0 && best_idx + 1 < scan.size()) {
    double a = scan[best_idx - 1].log_lambda;
    double b = scan[best_idx + 1].log_lambda;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    eval.previous = best.sol->state;
    auto x1 = eval(b - inv_phi * (b - a));
    auto x2 = eval(a + inv_phi * (b - a));
    for (std::size_t it = 0; it < opts.iterations && (b - a) > opts.bracket_width; ++it) {
      if (x1.mse <= x2.mse) {
        if (x2.mse < best.mse) best = x2;
        b = x2.log_lambda;
        x2 = x1;
        x1 = eval(b - inv_phi * (b - a));
      } else {
        if (x1.mse < best.mse) best = x1;
        a = x1.log_lambda;
        x1 = x2;
        x2 = eval(a + inv_phi * (b - a));
      }
    }
    for (const auto* q : {&x1, &x2}) {
      if (q->mse < best.mse) best = *q;
    }
  }

  TuneResult out;
  out.lambda_star = std::pow(10.0, best.log_lambda);
  out.mse_star = best.mse;
  out.solution = *best.sol;
  out.at_lower_edge = best.log_lambda == scan.front().log_lambda;
  out.at_upper_edge = best.log_lambda == scan.back().log_lambda;
  out.evaluations = eval.evaluations;
  out.failed_evaluations = eval.failures;
  return out;
}

std::string_view rate_status_name(RateStatus s) noexcept {
  switch (s) {
    case RateStatus::Ok: return "ok";
    case RateStatus::Infeasible: return "infeasible";
    case RateStatus::AboveRange: return "above_range";
  }
  return "unknown";
}

RateResult threshold_rate(const SignalModel& model, const MatrixEnsemble& ens_template,
                          std::span<const PenaltySpec> penalties, double mse0,
                          const RateOptions& opts) {
  if (!(mse0 > 0.0)) throw InvalidArgument("threshold_rate: mse0 must be positive");
  if (ens_template.kind() != EnsembleKind::MarcenkoPastur) {
    throw InvalidArgument("threshold_rate: the load-factor sweep needs a Marcenko-Pastur ensemble");
  }
  if (!(opts.inv_alpha_hi > opts.inv_alpha_lo) || !(opts.inv_alpha_lo > 0.0)) {
    throw InvalidArgument("threshold_rate: invalid N/K bracket");
  }
  RateResult out;
  auto probe = [&](double inv_alpha) {
    ++out.probes;
    return tune_lambda(model, ens_template.with_alpha(1.0 / inv_alpha), penalties, opts.tune);
  };

  // Geometric pre-scan over the bracket; mse must not decrease with N/K.
  const std::size_t n = std::max<std::size_t>(opts.prescan_points, 2);
  std::vector<double> rates(n);
  std::vector<TuneResult> tuned;
  tuned.reserve(n);
  const double ratio = opts.inv_alpha_hi / opts.inv_alpha_lo;
  for (std::size_t i = 0; i < n; ++i) {
    rates[i] = i + 1 == n ? opts.inv_alpha_hi
                          : opts.inv_alpha_lo * std::pow(ratio, static_cast<double>(i) / (n - 1));
    tuned.push_back(probe(rates[i]));
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (tuned[i].mse_star < tuned[i - 1].mse_star * (1.0 - opts.monotone_slack)) {
      std::ostringstream msg;
      msg << "threshold_rate: tuned mse is not monotone in N/K (mse(" << rates[i - 1]
          << ")=" << tuned[i - 1].mse_star << " > mse(" << rates[i] << ")=" << tuned[i].mse_star
          << ")";
      throw Error(msg.str());
    }
  }

  auto fill = [&](double rate, const TuneResult& t) {
    out.rate = rate;
    out.lambda_star = t.lambda_star;
    out.mse = t.mse_star;
    out.solution = t.solution;
  };
  if (tuned.back().mse_star <= mse0) {
    out.status = RateStatus::AboveRange;
    fill(rates.back(), tuned.back());
    return out;
  }
  if (tuned.front().mse_star > mse0) {
    out.status = RateStatus::Infeasible;
    fill(rates.front(), tuned.front());
    return out;
  }

  std::size_t k = 0;
  while (k + 1 < n && tuned[k + 1].mse_star <= mse0) ++k;
  double lo = rates[k];
  double hi = rates[k + 1];
  TuneResult lo_result = tuned[k];
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    auto t = probe(mid);
    if (t.mse_star <= mse0) {
      lo = mid;
      lo_result = std::move(t);
    } else {
      hi = mid;
    }
  }
  out.status = RateStatus::Ok;
  fill(lo, lo_result);
  return out;
}

SweepResult sweep_c(const SignalModel& model_template, const MatrixEnsemble& ens_template,
                    std::span<const PenaltySpec> penalties, std::span<const double> c_grid,
                    std::span<const std::size_t> c_blocks, double mse0, const RateOptions& opts,
                    std::size_t threads) {
  if (c_grid.empty()) throw InvalidArgument("sweep_c: empty c grid");
  for (std::size_t i = 1; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > c_grid[i - 1])) throw InvalidArgument("sweep_c: c grid must be strictly increasing");
  }
  for (auto j : c_blocks) {
    if (j >= model_template.blocks.size()) {
      throw InvalidArgument("sweep_c: c block index " + std::to_string(j) + " out of range");
    }
  }
  SweepResult out;
  out.axis.assign(c_grid.begin(), c_grid.end());
  out.mse0 = mse0;
  out.points = parallel_map(c_grid.size(), threads, [&](std::size_t i) {
    SignalModel m = model_template;
    for (auto j : c_blocks) m.blocks[j].c = c_grid[i];
    SweepPoint pt;
    pt.axis = c_grid[i];
    pt.rate = threshold_rate(m, ens_template, penalties, mse0, opts);
    pt.converged = pt.rate.solution.diag.converged;
    if (pt.rate.status == RateStatus::Ok) {
      pt.prediction = predict(pt.rate.solution.state, m, penalties, kMse, opts.tune.solve.quadrature);
      pt.prediction->diag = pt.rate.solution.diag;
    }
    return pt;
  });
  auto score = [](const RateResult& r) {
    switch (r.status) {
      case RateStatus::Ok: return r.rate;
      case RateStatus::AboveRange: return kInf;
      case RateStatus::Infeasible: return -kInf;
    }
    return -kInf;
  };
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (score(out.points[i].rate) > score(out.points[out.argmax].rate)) out.argmax = i;
  }
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os.precision(10);
  os << "c,R_t,lambda_star,mse_at_Rt,chi,p,converged,argmax\n";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& pt = r.points[i];
    os << pt.axis << ',';
    if (pt.rate.status == RateStatus::Ok) {
      os << pt.rate.rate;
    } else {
      os << rate_status_name(pt.rate.status);
    }
    os << ',' << pt.rate.lambda_star << ',' << pt.rate.mse << ',' << pt.rate.solution.state.chi
       << ',' << pt.rate.solution.state.p << ',' << (pt.converged ? 1 : 0) << ','
       << (i == r.argmax ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace asymmap
