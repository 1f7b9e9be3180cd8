#include "asymmap/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "asymmap/errors.hpp"

namespace asymmap {

namespace {

constexpr int kBisectionIterations = 200;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("ensemble load factor alpha must be positive and finite, got " +
                          std::to_string(alpha));
  }
}

void check_empirical_omega(double omega) {
  if (omega > 0.0) {
    throw DomainError("empirical R-transform is evaluated on omega <= 0 only, got " +
                      std::to_string(omega));
  }
}

// With s = R + 1/omega and u = -omega, G(s) = u is equivalent to
//   mean[(e - R) / (1 + u (e - R))] = 0,
// decreasing in R on R < min eigenvalue + 1/u, with the root in
// [min eigenvalue, min(mean eigenvalue, min eigenvalue + 1/u)].
double r_empirical(const MatrixEnsemble& ens, double omega) {
  check_empirical_omega(omega);
  if (omega == 0.0) return ens.mean_eigenvalue();
  const double u = -omega;
  const auto& eig = ens.eigenvalues();
  auto h = [&](double r) {
    double acc = 0.0;
    for (double e : eig) acc += (e - r) / (1.0 + u * (e - r));
    return acc / static_cast<double>(eig.size());
  };
  const double lo = eig.front();
  const double hi = std::max(lo, std::min(ens.mean_eigenvalue(), lo + 1.0 / u));
  if (!(h(hi) < 0.0)) return hi;
  if (!(h(lo) > 0.0)) return lo;
  std::uintmax_t iters = kBisectionIterations;
  auto [a, b] = boost::math::tools::bisect(h, lo, hi, boost::math::tools::eps_tolerance<double>(53),
                                           iters);
  return 0.5 * (a + b);
}

// Implicit differentiation of the root condition above.
double r_empirical_deriv(const MatrixEnsemble& ens, double omega) {
  const double r = r_empirical(ens, omega);
  const double u = -omega;
  double num = 0.0, den = 0.0;
  for (double e : ens.eigenvalues()) {
    const double d = e - r;
    const double q = 1.0 / (1.0 + u * d);
    num += d * d * q * q;
    den += q * q;
  }
  return num / den;
}

}  // namespace

MatrixEnsemble::MatrixEnsemble(EnsembleKind kind, double alpha, std::vector<double> eig)
    : kind_(kind), alpha_(alpha), eigenvalues_(std::move(eig)) {
  switch (kind_) {
    case EnsembleKind::MarcenkoPastur:
      mean_ = 1.0;
      variance_ = 1.0 / alpha_;
      break;
    case EnsembleKind::Identity:
      mean_ = 1.0;
      variance_ = 0.0;
      break;
    case EnsembleKind::Empirical: {
      const double n = static_cast<double>(eigenvalues_.size());
      mean_ = std::accumulate(eigenvalues_.begin(), eigenvalues_.end(), 0.0) / n;
      double ss = 0.0;
      for (double e : eigenvalues_) ss += (e - mean_) * (e - mean_);
      variance_ = ss / n;
      break;
    }
  }
}

MatrixEnsemble MatrixEnsemble::marcenko_pastur(double alpha) {
  check_alpha(alpha);
  return MatrixEnsemble(EnsembleKind::MarcenkoPastur, alpha, {});
}

MatrixEnsemble MatrixEnsemble::identity(double alpha) {
  check_alpha(alpha);
  return MatrixEnsemble(EnsembleKind::Identity, alpha, {});
}

MatrixEnsemble MatrixEnsemble::empirical(std::vector<double> eigenvalues, double alpha) {
  check_alpha(alpha);
  if (eigenvalues.empty()) throw InvalidArgument("empirical ensemble needs at least one eigenvalue");
  for (double e : eigenvalues) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw InvalidArgument("empirical eigenvalues must be finite and nonnegative, got " +
                            std::to_string(e));
    }
  }
  std::sort(eigenvalues.begin(), eigenvalues.end());
  return MatrixEnsemble(EnsembleKind::Empirical, alpha, std::move(eigenvalues));
}

MatrixEnsemble MatrixEnsemble::load_empirical(const std::filesystem::path& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open eigenvalue file " + path.string());
  std::vector<double> eig;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double v;
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) +
                            ": expected one number per line");
    }
    eig.push_back(v);
  }
  return empirical(std::move(eig), alpha);
}

double MatrixEnsemble::stieltjes(double s) const {
  if (kind_ != EnsembleKind::Empirical) {
    throw InvalidArgument("sample Stieltjes transform is defined for empirical ensembles");
  }
  double acc = 0.0;
  for (double e : eigenvalues_) acc += 1.0 / (e - s);
  return acc / static_cast<double>(eigenvalues_.size());
}

MatrixEnsemble MatrixEnsemble::with_alpha(double alpha) const {
  if (kind_ == EnsembleKind::MarcenkoPastur) return marcenko_pastur(alpha);
  check_alpha(alpha);
  MatrixEnsemble copy = *this;
  copy.alpha_ = alpha;
  return copy;
}

double r_transform(const MatrixEnsemble& ens, double omega) {
  if (!std::isfinite(omega)) throw DomainError("R-transform argument is not finite");
  switch (ens.kind()) {
    case EnsembleKind::MarcenkoPastur:
      if (omega >= ens.alpha()) {
        throw DomainError("Marcenko-Pastur R-transform requires omega < alpha (" +
                          std::to_string(ens.alpha()) + "), got " + std::to_string(omega));
      }
      return ens.alpha() / (ens.alpha() - omega);
    case EnsembleKind::Identity:
      return 1.0;
    case EnsembleKind::Empirical:
      return r_empirical(ens, omega);
  }
  throw InternalError("unknown ensemble kind");
}

double r_transform_deriv(const MatrixEnsemble& ens, double omega) {
  if (!std::isfinite(omega)) throw DomainError("R-transform argument is not finite");
  switch (ens.kind()) {
    case EnsembleKind::MarcenkoPastur: {
      if (omega >= ens.alpha()) {
        throw DomainError("Marcenko-Pastur R-transform requires omega < alpha (" +
                          std::to_string(ens.alpha()) + "), got " + std::to_string(omega));
      }
      const double d = ens.alpha() - omega;
      return ens.alpha() / (d * d);
    }
    case EnsembleKind::Identity:
      return 0.0;
    case EnsembleKind::Empirical:
      check_empirical_omega(omega);
      return r_empirical_deriv(ens, omega);
  }
  throw InternalError("unknown ensemble kind");
}

EffectiveParams effective_params(const MatrixEnsemble& ens, double chi, double p, double lambda,
                                 double lambda0) {
  if (!std::isfinite(chi) || !std::isfinite(p) || !std::isfinite(lambda) ||
      !std::isfinite(lambda0)) {
    throw InvalidArgument("effective_params: inputs must be finite");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("effective_params: lambda must be positive");
  const double omega = -chi / lambda;
  const double r = r_transform(ens, omega);
  if (!(r > 0.0)) {
    throw DegenerateEnsembleError("R-transform is not positive at omega=" +
                                  std::to_string(omega));
  }
  const double dr = r_transform_deriv(ens, omega);
  const double theta = lambda / r;
  const double theta0 = (lambda0 * r - (lambda0 * chi - lambda * p) * dr / lambda) / (r * r);
  return {theta, theta0};
}

EffectiveParams effective_params_mp(double alpha, double chi, double p, double lambda,
                                    double lambda0) {
  return {lambda + chi / alpha, lambda0 + p / alpha};
}

}  // namespace asymmap
