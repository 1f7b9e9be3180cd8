#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace asymmap {

enum class EnsembleKind { MarcenkoPastur, Identity, Empirical };

/// Spectral law of the Gram matrix J = A^T A.
///
/// MarcenkoPastur describes A with i.i.d. zero-mean entries of variance 1/K
/// at load alpha = K/N; the mean eigenvalue is then 1. Empirical keeps a
/// sorted copy of the sample spectrum together with its first two moments.
class MatrixEnsemble {
 public:
  static MatrixEnsemble marcenko_pastur(double alpha);
  static MatrixEnsemble identity(double alpha = 1.0);
  static MatrixEnsemble empirical(std::vector<double> eigenvalues, double alpha);
  /// Plain text, one nonnegative eigenvalue per line. Blank lines and lines
  /// starting with '#' are skipped.
  static MatrixEnsemble load_empirical(const std::filesystem::path& path, double alpha);

  EnsembleKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double mean_eigenvalue() const noexcept { return mean_; }
  double eigenvalue_variance() const noexcept { return variance_; }

  /// Sample Stieltjes transform G(s) = mean((lambda_i - s)^-1). Empirical only.
  double stieltjes(double s) const;

  /// Same ensemble kind and spectrum at a different load factor. For
  /// MarcenkoPastur this rebuilds the law; other kinds keep their spectrum.
  MatrixEnsemble with_alpha(double alpha) const;

  bool operator==(const MatrixEnsemble&) const = default;

 private:
  MatrixEnsemble(EnsembleKind kind, double alpha, std::vector<double> eig);

  EnsembleKind kind_;
  double alpha_;
  std::vector<double> eigenvalues_;
  double mean_ = 1.0;
  double variance_ = 0.0;
};

/// R(omega) = G^{-1}(-omega) - 1/omega, with R(0) the mean eigenvalue.
double r_transform(const MatrixEnsemble& ens, double omega);

/// dR/domega.
double r_transform_deriv(const MatrixEnsemble& ens, double omega);

struct EffectiveParams {
  double theta;   ///< equivalent estimation parameter of the scalar MAP problem
  double theta0;  ///< variance of the decoupled Gaussian noise
};

/// Effective scalar channel for the order parameters (chi, p).
///
///   theta  = lambda / R(omega)
///   theta0 = d/dchi[(lambda0 chi - lambda p) R(omega)] / R(omega)^2
///
/// with omega = -chi / lambda, the derivative expanded by the chain rule.
EffectiveParams effective_params(const MatrixEnsemble& ens, double chi, double p,
                                 double lambda, double lambda0);

/// Marcenko-Pastur shortcut: theta = lambda + chi/alpha, theta0 = lambda0 + p/alpha.
EffectiveParams effective_params_mp(double alpha, double chi, double p, double lambda,
                                    double lambda0);

}  // namespace asymmap
