#include "asymmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asymmap/errors.hpp"

namespace asymmap {

double SignalModel::second_moment() const {
  double acc = 0.0;
  for (const auto& b : blocks) acc += b.fraction * b.rho * b.nonzero_variance();
  return acc;
}

double SignalModel::signal_rms() const { return std::sqrt(second_moment()); }

double SignalModel::zero_tol() const { return 1e-8 * signal_rms(); }

void SignalModel::validate(std::size_t penalty_count) const {
  if (blocks.empty()) throw InvalidArgument("model: at least one block is required");
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    throw InvalidArgument("model: lambda0 must be finite and >= 0");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& b = blocks[j];
    const std::string where = "model.blocks[" + std::to_string(j) + "]: ";
    if (!(b.fraction > 0.0 && b.fraction <= 1.0)) {
      throw InvalidArgument(where + "fraction must lie in (0, 1]");
    }
    if (!(b.rho >= 0.0 && b.rho <= 1.0)) throw InvalidArgument(where + "rho must lie in [0, 1]");
    if (!(b.c >= 0.0) || !std::isfinite(b.c)) throw InvalidArgument(where + "c must be finite and >= 0");
    if (!(b.w >= 0.0) || !std::isfinite(b.w)) throw InvalidArgument(where + "w must be finite and >= 0");
    if (b.penalty_id >= penalty_count) {
      throw InvalidArgument(where + "penalty index " + std::to_string(b.penalty_id) +
                            " is outside the penalty table of size " +
                            std::to_string(penalty_count));
    }
    total += b.fraction;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("model: block fractions must sum to 1 (got " + std::to_string(total) +
                          ")");
  }
}

SmoothTerm SmoothTerm::power(double scale, double exponent) {
  SmoothTerm t;
  t.kind = Kind::Power;
  t.scale = scale;
  t.exponent = exponent;
  return t;
}

SmoothTerm SmoothTerm::custom(std::function<double(double)> f, std::function<double(double)> df,
                              std::string label) {
  SmoothTerm t;
  t.kind = Kind::Custom;
  t.fn = std::move(f);
  t.deriv = std::move(df);
  t.label = std::move(label);
  return t;
}

double SmoothTerm::value(double v) const {
  if (kind == Kind::Power) return scale * std::pow(std::abs(v), exponent);
  return fn(v);
}

double SmoothTerm::derivative(double v) const {
  if (kind == Kind::Power) {
    if (v == 0.0) return exponent > 1.0 ? 0.0 : scale;
    const double a = std::abs(v);
    return std::copysign(scale * exponent * std::pow(a, exponent - 1.0), v);
  }
  if (deriv) return deriv(v);
  const double h = 1e-6 * std::max(1.0, std::abs(v));
  return (fn(v + h) - fn(v - h)) / (2.0 * h);
}

bool SmoothTerm::operator==(const SmoothTerm& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Power) return scale == o.scale && exponent == o.exponent;
  return label == o.label;
}

PenaltySpec PenaltySpec::zero_norm() { return {PenaltyKind::ZeroNorm, 0.0, {}}; }
PenaltySpec PenaltySpec::l1() { return {PenaltyKind::L1, 1.0, {}}; }
PenaltySpec PenaltySpec::l2() { return {PenaltyKind::L2, 2.0, {}}; }

PenaltySpec PenaltySpec::lp(double exponent) {
  PenaltySpec p{PenaltyKind::Lp, exponent, {}};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::zero_norm_plus(SmoothTerm f) {
  PenaltySpec p{PenaltyKind::ZeroNormPlus, 0.0, std::move(f)};
  p.validate();
  return p;
}

double PenaltySpec::value(double v, double c) const {
  switch (kind) {
    case PenaltyKind::ZeroNorm:
      return v != 0.0 ? c : 0.0;
    case PenaltyKind::L1:
      return c * std::abs(v);
    case PenaltyKind::L2:
      return c * v * v;
    case PenaltyKind::Lp:
      return v != 0.0 ? c * std::pow(std::abs(v), exponent) : 0.0;
    case PenaltyKind::ZeroNormPlus:
      return v != 0.0 ? smooth.value(v) + c : 0.0;
  }
  return 0.0;
}

bool PenaltySpec::is_convex() const noexcept {
  switch (kind) {
    case PenaltyKind::L1:
    case PenaltyKind::L2:
      return true;
    case PenaltyKind::Lp:
      return exponent >= 1.0;
    default:
      return false;
  }
}

void PenaltySpec::validate() const {
  if (kind == PenaltyKind::Lp && !(exponent > 0.0 && exponent <= 2.0)) {
    throw InvalidArgument("penalty: lp exponent must lie in (0, 2], got " +
                          std::to_string(exponent));
  }
  if (kind == PenaltyKind::ZeroNormPlus) {
    if (smooth.kind == SmoothTerm::Kind::Power) {
      if (!(smooth.scale >= 0.0) || !std::isfinite(smooth.scale)) {
        throw InvalidArgument("penalty: smooth term scale must be finite and >= 0");
      }
      if (!(smooth.exponent >= 1.0 && smooth.exponent <= 2.0)) {
        throw InvalidArgument("penalty: smooth term exponent must lie in [1, 2]");
      }
    } else if (!smooth.fn) {
      throw InvalidArgument("penalty: custom smooth term needs a callable");
    }
  }
}

bool PenaltySpec::operator==(const PenaltySpec& o) const {
  if (kind != o.kind) return false;
  if (kind == PenaltyKind::Lp) return exponent == o.exponent;
  if (kind == PenaltyKind::ZeroNormPlus) return smooth == o.smooth;
  return true;
}

std::string_view penalty_name(PenaltyKind kind) noexcept {
  switch (kind) {
    case PenaltyKind::ZeroNorm: return "zero_norm";
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::L2: return "l2";
    case PenaltyKind::Lp: return "lp";
    case PenaltyKind::ZeroNormPlus: return "zero_norm_plus";
  }
  return "unknown";
}

PenaltyKind penalty_from_name(std::string_view name) {
  for (auto k : {PenaltyKind::ZeroNorm, PenaltyKind::L1, PenaltyKind::L2, PenaltyKind::Lp,
                 PenaltyKind::ZeroNormPlus}) {
    if (penalty_name(k) == name) return k;
  }
  throw InvalidArgument("unknown penalty kind '" + std::string(name) + "'");
}

std::string_view distortion_name(DistortionKind kind) noexcept {
  switch (kind) {
    case DistortionKind::SquaredError: return "squared_error";
    case DistortionKind::SupportMismatch: return "support_mismatch";
    case DistortionKind::IndicatorMatch: return "indicator_match";
    case DistortionKind::IndicatorMismatch: return "indicator_mismatch";
  }
  return "unknown";
}

DistortionKind distortion_from_name(std::string_view name) {
  for (auto k : {DistortionKind::SquaredError, DistortionKind::SupportMismatch,
                 DistortionKind::IndicatorMatch, DistortionKind::IndicatorMismatch}) {
    if (distortion_name(k) == name) return k;
  }
  throw InvalidArgument("unknown distortion kind '" + std::string(name) + "'");
}

double distortion(DistortionSpec d, double x, double xhat, double zero_tol) {
  switch (d.kind) {
    case DistortionKind::SquaredError:
      return (x - xhat) * (x - xhat);
    case DistortionKind::SupportMismatch:
      return ((x == 0.0) != (std::abs(xhat) <= zero_tol)) ? 1.0 : 0.0;
    case DistortionKind::IndicatorMatch:
      return x == xhat ? 1.0 : 0.0;
    case DistortionKind::IndicatorMismatch:
      return x != xhat ? 1.0 : 0.0;
  }
  return 0.0;
}

FiniteProfile finite_profile(const SignalModel& m, std::size_t n) {
  const std::size_t nb = m.blocks.size();
  if (nb == 0) throw InvalidArgument("finite_profile: model has no blocks");
  if (n < nb) {
    throw InvalidArgument("finite_profile: N=" + std::to_string(n) + " is smaller than the " +
                          std::to_string(nb) + " blocks");
  }
  std::vector<std::size_t> sizes(nb);
  std::vector<double> remainder(nb);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    const double share = m.blocks[j].fraction * static_cast<double>(n);
    // Guard against 0.2 * 10 = 1.9999999999999998 style floors.
    const double fl = std::floor(share + 1e-9);
    sizes[j] = static_cast<std::size_t>(fl);
    remainder[j] = share - fl;
    assigned += sizes[j];
  }
  std::vector<std::size_t> order(nb);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) sizes[order[k % nb]] += 1;
  while (assigned > n) {
    // fractions summing slightly above 1; take from the largest block
    auto it = std::max_element(sizes.begin(), sizes.end());
    --*it;
    --assigned;
  }

  FiniteProfile prof;
  prof.sizes = sizes;
  prof.rho.reserve(n);
  prof.c.reserve(n);
  prof.w.reserve(n);
  prof.block.reserve(n);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    if (sizes[j] == 0) {
      throw InvalidArgument("finite_profile: block " + std::to_string(j) +
                            " receives no entries at N=" + std::to_string(n));
    }
    prof.offsets.push_back(offset);
    offset += sizes[j];
    for (std::size_t i = 0; i < sizes[j]; ++i) {
      prof.rho.push_back(m.blocks[j].rho);
      prof.c.push_back(m.blocks[j].c);
      prof.w.push_back(m.blocks[j].w);
      prof.block.push_back(j);
    }
  }
  return prof;
}

double prior_sample(const BlockSpec& b, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (!(u(rng) < b.rho)) return 0.0;
  std::normal_distribution<double> q(0.0, 1.0);
  return q(rng);
}

}  // namespace asymmap
