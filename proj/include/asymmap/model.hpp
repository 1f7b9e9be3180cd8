#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asymmap {

using Rng = std::mt19937_64;

/// Law of the nonzero entries of a block.
enum class NonzeroDist { StandardGaussian };

/// One block of the signal: an asymptotic share of the indices with its own
/// sparsity, penalty weight, distortion weight and penalty family.
struct BlockSpec {
  double fraction = 1.0;
  double rho = 1.0;
  NonzeroDist q = NonzeroDist::StandardGaussian;
  double c = 1.0;
  double w = 1.0;
  std::size_t penalty_id = 0;

  /// Variance of q.
  double nonzero_variance() const noexcept { return 1.0; }
  bool operator==(const BlockSpec&) const = default;
};

struct SignalModel {
  std::vector<BlockSpec> blocks;
  double lambda0 = 0.0;  ///< measurement noise variance

  /// E[x^2] averaged over blocks.
  double second_moment() const;
  double signal_rms() const;
  /// Tolerance under which a solver output counts as an exact zero.
  double zero_tol() const;
  /// Throws InvalidArgument naming the violated constraint.
  void validate(std::size_t penalty_count) const;

  bool operator==(const SignalModel&) const = default;
};

/// Smooth even term f(v) of the ZeroNormPlus penalty u = f(v) + c 1{v != 0}.
/// Must satisfy f(0) = 0 and be nondecreasing in |v|.
struct SmoothTerm {
  enum class Kind { Power, Custom };
  Kind kind = Kind::Power;
  double scale = 0.0;     ///< Power: scale * |v|^exponent
  double exponent = 2.0;  ///< Power: exponent >= 1
  std::string label;      ///< Custom: free-form name used in serialization
  std::function<double(double)> fn;
  std::function<double(double)> deriv;  ///< optional; central differences otherwise

  static SmoothTerm power(double scale, double exponent);
  static SmoothTerm custom(std::function<double(double)> f,
                           std::function<double(double)> df = {}, std::string label = "custom");

  double value(double v) const;
  double derivative(double v) const;
  bool operator==(const SmoothTerm& o) const;
};

enum class PenaltyKind { ZeroNorm, L1, L2, Lp, ZeroNormPlus };

/// Separable per-entry penalty u(v; c).
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::L1;
  double exponent = 1.0;  ///< Lp only, in (0, 2]
  SmoothTerm smooth;      ///< ZeroNormPlus only

  static PenaltySpec zero_norm();
  static PenaltySpec l1();
  static PenaltySpec l2();
  static PenaltySpec lp(double exponent);
  static PenaltySpec zero_norm_plus(SmoothTerm f);

  double value(double v, double c) const;
  bool is_convex() const noexcept;
  void validate() const;
  bool operator==(const PenaltySpec& o) const;
};

std::string_view penalty_name(PenaltyKind kind) noexcept;

enum class DistortionKind { SquaredError, SupportMismatch, IndicatorMatch, IndicatorMismatch };

struct DistortionSpec {
  DistortionKind kind = DistortionKind::SquaredError;
  bool operator==(const DistortionSpec&) const = default;
};

std::string_view distortion_name(DistortionKind kind) noexcept;
DistortionKind distortion_from_name(std::string_view name);
PenaltyKind penalty_from_name(std::string_view name);

/// Pointwise d(x, xhat). SupportMismatch treats |xhat| <= zero_tol as zero;
/// x is compared against exact zero.
double distortion(DistortionSpec d, double x, double xhat, double zero_tol = 0.0);

/// Per-index layout of a model at dimension N: contiguous block ranges.
struct FiniteProfile {
  std::vector<double> rho;
  std::vector<double> c;
  std::vector<double> w;
  std::vector<std::size_t> block;
  std::vector<std::size_t> sizes;   ///< entries per block
  std::vector<std::size_t> offsets; ///< first index of each block
  std::size_t size() const noexcept { return block.size(); }
};

/// Block sizes by largest-remainder rounding of N * fraction (ties to the
/// lower block index).
FiniteProfile finite_profile(const SignalModel& m, std::size_t n);

/// One draw from rho q(x) + (1 - rho) delta(x).
double prior_sample(const BlockSpec& b, Rng& rng);

}  // namespace asymmap
