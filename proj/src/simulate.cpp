#include "asymmap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "asymmap/parallel.hpp"
#include "asymmap/scalar.hpp"

namespace asymmap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_profile(const Instance& inst, std::span<const double> c) {
  if (c.size() != static_cast<std::size_t>(inst.A.cols())) {
    throw InvalidArgument("penalty weight profile length does not match N");
  }
}

double soft(double v, double level) {
  return v > level ? v - level : (v < -level ? v + level : 0.0);
}

double largest_singular_squared(const Eigen::MatrixXd& A, std::size_t iterations) {
  Rng rng(0x5eedULL);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
  v.normalize();
  double est = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    est = (A * v).squaredNorm();
  }
  return est;
}

// Accelerated proximal gradient with function-value restart. `prox(v, step)`
// maps the gradient step to the next iterate in place; `penalty(v)` is the
// nonsmooth term of the objective.
template <class Prox, class Penalty>
ProximalResult proximal_gradient(const Instance& inst, double lambda, const ProximalOptions& opts,
                                 bool accelerate, Prox&& prox, Penalty&& penalty) {
  const Eigen::MatrixXd& A = inst.A;
  const Eigen::Index n = A.cols();
  const double lip = opts.lipschitz_safety *
                     std::max(largest_singular_squared(A, opts.power_iterations), 1e-300) / lambda;
  const double step = 1.0 / lip;

  Eigen::VectorXd x = opts.init.size() == n ? opts.init : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ax = A * x;
  Eigen::VectorXd yk = x;
  Eigen::VectorXd ay = ax;
  auto objective = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& av) {
    return (inst.y - av).squaredNorm() / (2.0 * lambda) + penalty(v);
  };
  double f = objective(x, ax);
  double t = 1.0;
  std::size_t quiet = 0;

  ProximalResult out;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd grad = A.transpose() * (ay - inst.y) / lambda;
    Eigen::VectorXd next = yk - step * grad;
    prox(next, step);
    Eigen::VectorXd anext = A * next;
    const double fn = objective(next, anext);
    out.iterations = it + 1;

    const double dec = (f - fn) / std::max(std::abs(fn), 1e-300);
    if (accelerate && dec < -opts.rel_decrease) {
      // restart momentum from the current iterate
      t = 1.0;
      yk = x;
      ay = ax;
      quiet = 0;
      continue;
    }
    quiet = std::abs(dec) < opts.rel_decrease ? quiet + 1 : 0;
    if (accelerate) {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / tn;
      yk = next + beta * (next - x);
      ay = anext + beta * (anext - ax);
      t = tn;
    } else {
      yk = next;
      ay = anext;
    }
    x = std::move(next);
    ax = std::move(anext);
    f = fn;
    if (quiet >= opts.patience) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.objective = f;
  return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial + 1));
}

Instance generate(const SignalModel& model, std::size_t n, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw InvalidArgument("generate: alpha must be positive");
  const auto k = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
  if (k < 1) throw InvalidArgument("generate: alpha * N must round to at least one measurement");

  Instance inst;
  inst.seed = seed;
  inst.profile = finite_profile(model, n);
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  inst.A.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < inst.A.cols(); ++j) {
    for (Eigen::Index i = 0; i < inst.A.rows(); ++i) inst.A(i, j) = scale * nd(rng);
  }
  inst.x.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    inst.x(static_cast<Eigen::Index>(i)) = prior_sample(model.blocks[inst.profile.block[i]], rng);
  }
  inst.z.resize(static_cast<Eigen::Index>(k));
  const double noise_sd = std::sqrt(model.lambda0);
  for (Eigen::Index i = 0; i < inst.z.size(); ++i) inst.z(i) = noise_sd * nd(rng);
  inst.y = inst.A * inst.x + inst.z;
  return inst;
}

double data_fit(const Instance& inst, double lambda, const Eigen::VectorXd& v) {
  return (inst.y - inst.A * v).squaredNorm() / (2.0 * lambda);
}

Eigen::VectorXd solve_ridge(const Instance& inst, double lambda, std::span<const double> c) {
  if (!(lambda > 0.0)) throw InvalidArgument("solve_ridge: lambda must be positive");
  check_profile(inst, c);
  const Eigen::Index n = inst.A.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.selfadjointView<Eigen::Lower>().rankUpdate(inst.A.transpose(), 1.0 / lambda);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) += 2.0 * c[static_cast<std::size_t>(i)];
  const Eigen::VectorXd rhs = inst.A.transpose() * inst.y / lambda;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("solve_ridge: normal equations are not positive definite");
  }
  Eigen::VectorXd v = llt.solve(rhs);
  auto residual = [&] {
    return (m.selfadjointView<Eigen::Lower>() * v - rhs).norm();
  };
  const double bound = 1e-8 * std::max(rhs.norm(), 1e-300);
  if (residual() > bound) {
    v += llt.solve(rhs - m.selfadjointView<Eigen::Lower>() * v);
    if (residual() > bound) throw SingularityError("solve_ridge: normal-equation residual too large");
  }
  return v;
}

double l1_objective(const Instance& inst, double lambda, std::span<const double> c,
                    const Eigen::VectorXd& v) {
  double pen = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) pen += c[static_cast<std::size_t>(i)] * std::abs(v(i));
  return data_fit(inst, lambda, v) + pen;
}

double l0_objective(const Instance& inst, double lambda, std::span<const double> c,
                    const Eigen::VectorXd& v) {
  double pen = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0) pen += c[static_cast<std::size_t>(i)];
  }
  return data_fit(inst, lambda, v) + pen;
}

ProximalResult solve_weighted_l1(const Instance& inst, double lambda, std::span<const double> c,
                                 const ProximalOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("solve_weighted_l1: lambda must be positive");
  check_profile(inst, c);
  return proximal_gradient(
      inst, lambda, opts, true,
      [&](Eigen::VectorXd& v, double step) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = soft(v(i), step * c[static_cast<std::size_t>(i)]);
      },
      [&](const Eigen::VectorXd& v) {
        double pen = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) pen += c[static_cast<std::size_t>(i)] * std::abs(v(i));
        return pen;
      });
}

ProximalResult solve_weighted_l0_iht(const Instance& inst, double lambda, std::span<const double> c,
                                     const ProximalOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("solve_weighted_l0_iht: lambda must be positive");
  check_profile(inst, c);
  return proximal_gradient(
      inst, lambda, opts, false,
      [&](Eigen::VectorXd& v, double step) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          if (!(std::abs(v(i)) > std::sqrt(2.0 * step * c[static_cast<std::size_t>(i)]))) v(i) = 0.0;
        }
      },
      [&](const Eigen::VectorXd& v) {
        double pen = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          if (v(i) != 0.0) pen += c[static_cast<std::size_t>(i)];
        }
        return pen;
      });
}

Eigen::VectorXd debias_on_support(const Instance& inst, const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0) idx.push_back(i);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  if (idx.empty()) return out;
  Eigen::MatrixXd as(inst.A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) as.col(static_cast<Eigen::Index>(k)) = inst.A.col(idx[k]);
  const Eigen::VectorXd sol = as.completeOrthogonalDecomposition().solve(inst.y);
  for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k]) = sol(static_cast<Eigen::Index>(k));
  return out;
}

ExhaustiveResult solve_weighted_l0_exhaustive(const Instance& inst, double lambda,
                                              std::span<const double> c) {
  const auto n = static_cast<std::size_t>(inst.A.cols());
  if (n > kExhaustiveMaxN) {
    throw InvalidArgument("solve_weighted_l0_exhaustive: N=" + std::to_string(n) +
                          " exceeds the enumeration limit of " + std::to_string(kExhaustiveMaxN));
  }
  if (!(lambda > 0.0)) throw InvalidArgument("solve_weighted_l0_exhaustive: lambda must be positive");
  check_profile(inst, c);
  const auto k_max = std::min(n, static_cast<std::size_t>(inst.A.rows()));

  ExhaustiveResult best;
  best.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  best.objective = inst.y.squaredNorm() / (2.0 * lambda);
  best.supports_evaluated = 1;

  std::vector<std::size_t> s;
  for (std::size_t size = 1; size <= k_max; ++size) {
    s.resize(size);
    std::iota(s.begin(), s.end(), 0);
    while (true) {
      ++best.supports_evaluated;
      Eigen::MatrixXd as(inst.A.rows(), static_cast<Eigen::Index>(size));
      double pen = 0.0;
      for (std::size_t k = 0; k < size; ++k) {
        as.col(static_cast<Eigen::Index>(k)) = inst.A.col(static_cast<Eigen::Index>(s[k]));
        pen += c[s[k]];
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
      if (static_cast<std::size_t>(qr.rank()) == size) {
        const Eigen::VectorXd v = qr.solve(inst.y);
        const double obj = (inst.y - as * v).squaredNorm() / (2.0 * lambda) + pen;
        // Enumeration order is (size, lexicographic), so only a strict
        // improvement may replace the incumbent.
        if (obj < best.objective - 1e-12 * std::max(1.0, std::abs(best.objective))) {
          best.objective = obj;
          best.support = s;
          best.x.setZero();
          for (std::size_t k = 0; k < size; ++k) best.x(static_cast<Eigen::Index>(s[k])) = v(static_cast<Eigen::Index>(k));
        }
      }
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && s[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++s[i - 1];
      for (std::size_t j = i; j < size; ++j) s[j] = s[j - 1] + 1;
    }
  }
  // Refits can land a coefficient exactly at zero; report the support's
  // objective consistently with l0_objective.
  best.objective = std::min(best.objective, l0_objective(inst, lambda, c, best.x));
  return best;
}

std::string_view solver_name(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::Ridge: return "ridge";
    case SolverKind::L1: return "l1";
    case SolverKind::L0Exhaustive: return "l0_exhaustive";
  }
  return "unknown";
}

SolverKind solver_from_name(std::string_view name) {
  for (auto s : {SolverKind::Ridge, SolverKind::L1, SolverKind::L0Exhaustive}) {
    if (solver_name(s) == name) return s;
  }
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

Histogram Histogram::make(double lo, double hi, std::size_t bins) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bins = bins;
  h.mass.assign(bins, 0.0);
  return h;
}

void Histogram::add(double v) {
  count += 1.0;
  if (v == 0.0) {
    atom += 1.0;
    return;
  }
  const double pos = (v - lo) / (hi - lo) * static_cast<double>(bins);
  const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins) - 0.5));
  mass[b] += 1.0;
}

void Histogram::merge(const Histogram& o) {
  count += o.count;
  atom += o.atom;
  for (std::size_t i = 0; i < bins; ++i) mass[i] += o.mass[i];
}

Histogram Histogram::normalized() const {
  Histogram h = *this;
  if (count > 0.0) {
    h.atom /= count;
    for (auto& m : h.mass) m /= count;
  }
  return h;
}

double Histogram::bin_left(std::size_t i) const {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
}

double Histogram::bin_right(std::size_t i) const { return bin_left(i + 1); }

double total_variation(const Histogram& a, const Histogram& b) {
  const Histogram na = a.normalized();
  const Histogram nb = b.normalized();
  double tv = std::abs(na.atom - nb.atom);
  for (std::size_t i = 0; i < na.bins; ++i) tv += std::abs(na.mass[i] - nb.mass[i]);
  return 0.5 * tv;
}

namespace {

struct TrialOutcome {
  std::vector<std::vector<double>> block_mean;  // [block][distortion]
  double mse = 0.0;
  bool flagged = false;
  std::vector<Histogram> laws;  // [0] x = 0, then x bins
};

std::vector<Histogram> empty_laws(std::size_t x_bins) {
  return std::vector<Histogram>(x_bins + 1, Histogram::make(-3.0, 3.0, 20));
}

// Index of the conditioning law for a true value x.
std::size_t law_index(double x, std::size_t x_bins) {
  if (x == 0.0) return 0;
  const double pos = (x + 3.0) / 6.0 * static_cast<double>(x_bins);
  return 1 + static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(x_bins) - 0.5));
}

void check_solver_penalties(const SignalModel& model, std::span<const PenaltySpec> penalties,
                            SolverKind solver) {
  for (const auto& b : model.blocks) {
    const auto& pen = penalties[b.penalty_id];
    bool ok = false;
    switch (solver) {
      case SolverKind::Ridge:
        ok = pen.kind == PenaltyKind::L2 || (pen.kind == PenaltyKind::Lp && pen.exponent == 2.0);
        break;
      case SolverKind::L1:
        ok = pen.kind == PenaltyKind::L1 || (pen.kind == PenaltyKind::Lp && pen.exponent == 1.0);
        break;
      case SolverKind::L0Exhaustive:
        ok = pen.kind == PenaltyKind::ZeroNorm;
        break;
    }
    if (!ok) {
      throw InvalidArgument("run_validation: solver '" + std::string(solver_name(solver)) +
                            "' cannot minimize the '" + std::string(penalty_name(pen.kind)) +
                            "' penalty");
    }
  }
}

}  // namespace

EmpiricalReport run_validation(const SignalModel& model, std::span<const PenaltySpec> penalties,
                               std::span<const DistortionSpec> distortions,
                               const ValidationSpec& spec, std::size_t threads) {
  model.validate(penalties.size());
  if (spec.trials == 0) throw InvalidArgument("run_validation: trials must be >= 1");
  check_solver_penalties(model, penalties, spec.solver);
  if (spec.solver == SolverKind::L0Exhaustive && spec.n > kExhaustiveMaxN) {
    throw InvalidArgument("run_validation: l0_exhaustive supports N <= 22");
  }

  EmpiricalReport rep;
  rep.solver = spec.solver;
  rep.n = spec.n;
  rep.k = static_cast<std::size_t>(std::llround(spec.alpha * static_cast<double>(spec.n)));
  rep.trials = spec.trials;
  rep.lambda = spec.lambda;
  rep.distortions.assign(distortions.begin(), distortions.end());

  SolveOptions so;
  so.quadrature = spec.quadrature;
  const auto ens = MatrixEnsemble::marcenko_pastur(spec.alpha);
  const auto sol = solve_rs(model, ens, penalties, spec.lambda, so);
  rep.prediction = predict(sol.state, model, penalties, distortions, spec.quadrature);
  rep.prediction.diag = sol.diag;
  rep.mse_replica = rep.prediction.mse;

  const std::size_t nb = model.blocks.size();
  const std::size_t nd = distortions.size();
  const double zero_tol = model.zero_tol();

  auto outcomes = parallel_map(spec.trials, threads, [&](std::size_t t) {
    const Instance inst = generate(model, spec.n, spec.alpha, trial_seed(spec.seed, t));
    const auto& prof = inst.profile;
    Eigen::VectorXd xhat;
    TrialOutcome out;
    switch (spec.solver) {
      case SolverKind::Ridge:
        xhat = solve_ridge(inst, spec.lambda, prof.c);
        break;
      case SolverKind::L1: {
        auto r = solve_weighted_l1(inst, spec.lambda, prof.c, spec.proximal);
        out.flagged = !r.converged;
        xhat = std::move(r.x);
        break;
      }
      case SolverKind::L0Exhaustive:
        xhat = solve_weighted_l0_exhaustive(inst, spec.lambda, prof.c).x;
        break;
    }
    out.block_mean.assign(nb, std::vector<double>(nd, 0.0));
    out.laws = empty_laws(spec.x_bins);
    double se = 0.0;
    for (Eigen::Index i = 0; i < xhat.size(); ++i) {
      const std::size_t j = prof.block[static_cast<std::size_t>(i)];
      const double x = inst.x(i);
      const double xh = xhat(i);
      for (std::size_t k = 0; k < nd; ++k) out.block_mean[j][k] += distortion(distortions[k], x, xh, zero_tol);
      se += (x - xh) * (x - xh);
      out.laws[law_index(x, spec.x_bins)].add(xh);
    }
    for (std::size_t j = 0; j < nb; ++j) {
      for (auto& v : out.block_mean[j]) v /= static_cast<double>(prof.sizes[j]);
    }
    out.mse = se / static_cast<double>(xhat.size());
    return out;
  });

  // Aggregation in trial order keeps the report independent of the thread count.
  const auto sizes = finite_profile(model, spec.n).sizes;
  const double tn = static_cast<double>(spec.trials);
  std::vector<Histogram> laws = empty_laws(spec.x_bins);
  std::vector<double> mses;
  for (const auto& o : outcomes) {
    rep.flagged += o.flagged ? 1 : 0;
    mses.push_back(o.mse);
    for (std::size_t l = 0; l < laws.size(); ++l) laws[l].merge(o.laws[l]);
  }
  if (static_cast<double>(rep.flagged) > 0.05 * tn) {
    throw NoConvergenceError("run_validation: " + std::to_string(rep.flagged) + " of " +
                             std::to_string(spec.trials) + " trials hit the solver iteration cap");
  }
  auto mean_se = [&](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / tn;
    double ss = 0.0;
    for (double a : v) ss += (a - m) * (a - m);
    const double sd = v.size() > 1 ? std::sqrt(ss / (tn - 1.0)) : 0.0;
    return std::pair{m, sd / std::sqrt(tn)};
  };
  std::tie(rep.mse_mean, rep.mse_stderr) = mean_se(mses);
  rep.mse_relative_delta = std::abs(rep.mse_mean - rep.mse_replica) / std::max(rep.mse_replica, 1e-300);

  const auto sq = std::find_if(distortions.begin(), distortions.end(),
                               [](auto d) { return d.kind == DistortionKind::SquaredError; });
  for (std::size_t j = 0; j < nb; ++j) {
    BlockReport br;
    br.block = j;
    br.size = sizes[j];
    br.replica = rep.prediction.per_block[j].dist;
    for (std::size_t k = 0; k < nd; ++k) {
      std::vector<double> vals;
      for (const auto& o : outcomes) vals.push_back(o.block_mean[j][k]);
      auto [m, s] = mean_se(vals);
      br.mean.push_back(m);
      br.stderr_.push_back(s);
    }
    if (sq != distortions.end()) {
      const auto k = static_cast<std::size_t>(sq - distortions.begin());
      const double delta = br.mean[k] - br.replica[k];
      br.mse_z = br.stderr_[k] > 0.0 ? delta / br.stderr_[k] : 0.0;
      rep.max_block_z = std::max(rep.max_block_z, std::abs(br.mse_z));
    }
    rep.blocks.push_back(std::move(br));
  }

  // Decoupled channel sampled at the converged (theta, theta0), blocks in
  // proportion to their sizes.
  std::vector<Histogram> decoupled = empty_laws(spec.x_bins);
  Rng rng(trial_seed(spec.seed, 0xdec0de11ULL));
  std::normal_distribution<double> nd01(0.0, 1.0);
  const double noise_sd = std::sqrt(sol.state.theta0);
  for (std::size_t j = 0; j < nb; ++j) {
    const auto& b = model.blocks[j];
    const auto count = static_cast<std::size_t>(std::llround(
        static_cast<double>(spec.decoupled_samples) * static_cast<double>(sizes[j]) /
        static_cast<double>(spec.n)));
    for (std::size_t s = 0; s < count; ++s) {
      const double x = prior_sample(b, rng);
      const double y = x + noise_sd * nd01(rng);
      decoupled[law_index(x, spec.x_bins)].add(
          scalar_map(penalties[b.penalty_id], sol.state.theta, b.c, y));
    }
  }
  for (std::size_t l = 0; l < laws.size(); ++l) {
    ConditionalLaw law;
    if (l == 0) {
      law.condition = "x=0";
    } else {
      law.x_lo = -3.0 + 6.0 * static_cast<double>(l - 1) / static_cast<double>(spec.x_bins);
      law.x_hi = -3.0 + 6.0 * static_cast<double>(l) / static_cast<double>(spec.x_bins);
      std::ostringstream os;
      os << "x in [" << law.x_lo << "," << law.x_hi << ")";
      law.condition = os.str();
    }
    law.empirical = laws[l];
    law.decoupled = decoupled[l];
    law.tv = (laws[l].count > 0 && decoupled[l].count > 0) ? total_variation(laws[l], decoupled[l]) : 0.0;
    rep.laws.push_back(std::move(law));
  }

  switch (spec.solver) {
    case SolverKind::Ridge:
      rep.gate_mse_relative = rep.mse_relative_delta <= spec.gates.mse_relative;
      break;
    case SolverKind::L1:
      rep.gate_block_sigma = rep.max_block_z <= spec.gates.mse_sigmas;
      rep.gate_tv = rep.laws[0].tv <= spec.gates.tv;
      break;
    case SolverKind::L0Exhaustive:
      break;
  }
  return rep;
}

std::string law_csv(const ConditionalLaw& law) {
  const Histogram e = law.empirical.normalized();
  const Histogram d = law.decoupled.normalized();
  std::ostringstream os;
  os.precision(10);
  os << "bin_left,bin_right,empirical_mass,decoupled_mass\n";
  os << 0.0 << ',' << 0.0 << ',' << e.atom << ',' << d.atom << '\n';
  for (std::size_t i = 0; i < e.bins; ++i) {
    os << e.bin_left(i) << ',' << e.bin_right(i) << ',' << e.mass[i] << ',' << d.mass[i] << '\n';
  }
  return os.str();
}

}  // namespace asymmap
