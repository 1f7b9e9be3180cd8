#pragma once

#include <cstddef>
#include <vector>

namespace asymmap {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Rule with n nodes, computed once per n and shared read-only afterwards.
const GaussLegendre& gauss_legendre(std::size_t n);

/// Integral of f over [a, b] with the given rule.
template <class F>
double integrate(const GaussLegendre& rule, F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

}  // namespace asymmap
