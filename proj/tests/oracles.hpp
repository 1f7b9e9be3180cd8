#pragma once

// Independent reference computations used by the test suites. None of these
// call into the quadrature or fixed-point code they check.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "asymmap/model.hpp"
#include "asymmap/scalar.hpp"

namespace oracle {

/// Spectrum of J = A^T A for one K x N draw with N(0, 1/K) entries, through
/// the K x K matrix A A^T plus N - K zeros (K <= N).
inline std::vector<double> gram_spectrum(std::size_t k, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
  Eigen::MatrixXd a(k, n);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = nd(rng);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
  g.selfadjointView<Eigen::Lower>().rankUpdate(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  std::vector<double> out(n - k, 0.0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::max(0.0, es.eigenvalues()(i)));
  return out;
}

/// Draws from the limiting spectral law of A^T A at load alpha <= 1: an atom
/// of mass 1 - alpha at zero, otherwise s / alpha with s Marcenko-Pastur of
/// ratio alpha (rejection sampling against the density).
inline std::vector<double> mp_samples(double alpha, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = std::pow(1.0 - std::sqrt(alpha), 2);
  const double b = std::pow(1.0 + std::sqrt(alpha), 2);
  auto density = [&](double s) { return std::sqrt((b - s) * (s - a)) / (2.0 * M_PI * alpha * s); };
  double fmax = 0.0;
  for (int i = 1; i < 20000; ++i) fmax = std::max(fmax, density(a + (b - a) * i / 20000.0));
  fmax *= 1.05;
  std::vector<double> out;
  out.reserve(n);
  while (out.size() < n) {
    if (u(rng) >= alpha) {
      out.push_back(0.0);
      continue;
    }
    while (true) {
      const double s = a + (b - a) * u(rng);
      if (u(rng) * fmax <= density(s)) {
        out.push_back(s / alpha);
        break;
      }
    }
  }
  return out;
}

struct McMoments {
  double se, se_err;
  double cz, cz_err;
};

/// Paired (x, z) Monte Carlo of the decoupled channel.
inline McMoments channel_mc(const asymmap::ScalarChannel& ch, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double sd = std::sqrt(ch.theta0);
  double s1 = 0, s2 = 0, c1 = 0, c2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng) < ch.prior.rho ? nd(rng) : 0.0;
    const double z = sd * nd(rng);
    const double g = asymmap::scalar_map(ch.penalty, ch.theta, ch.c, x + z);
    const double e = (g - x) * (g - x);
    const double c = (g - x) * z;
    s1 += e;
    s2 += e * e;
    c1 += c;
    c2 += c * c;
  }
  const double dn = static_cast<double>(n);
  const double ms = s1 / dn, mc = c1 / dn;
  return {ms, std::sqrt((s2 / dn - ms * ms) / dn), mc, std::sqrt((c2 / dn - mc * mc) / dn)};
}

/// |quad - mc| <= 3 sigma for se and cz. An excursion is re-tested once on an
/// independent sample four times larger, which must pass on its own.
inline bool agrees_3sigma(const asymmap::ScalarChannel& ch, double se, double cz, std::size_t n,
                          std::uint64_t seed) {
  auto ok = [&](const McMoments& mc) {
    return std::abs(se - mc.se) <= 3 * mc.se_err && std::abs(cz - mc.cz) <= 3 * mc.cz_err;
  };
  return ok(channel_mc(ch, n, seed)) || ok(channel_mc(ch, 4 * n, ~seed));
}

/// argmin over a uniform grid on [lo, hi] of (y - v)^2 / (2 theta) + u(v; c).
inline double grid_argmin(const asymmap::PenaltySpec& pen, double theta, double c, double y,
                          double lo, double hi, double step) {
  double best_v = 0.0;
  double best = pen.value(0.0, c) + y * y / (2.0 * theta);
  const auto n = static_cast<long>((hi - lo) / step);
  for (long i = 0; i <= n; ++i) {
    const double v = lo + step * static_cast<double>(i);
    const double f = (y - v) * (y - v) / (2.0 * theta) + pen.value(v, c);
    if (f < best) {
      best = f;
      best_v = v;
    }
  }
  return best_v;
}

}  // namespace oracle
