#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "bsb/fem.hpp"

namespace bsb {

using Complex = std::complex<double>;

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // all 2N values, sorted by (imag, real)
  double abscissa = 0.0;
  double min_distance_to_imaginary_axis = 0.0;
  DampingCase regime = DampingCase::Other;
  std::vector<std::string> warnings;  // e.g. numerically defective eigenvalues
};

struct ResolventTable {
  std::vector<double> lambdas;
  std::vector<double> norms;
  double sup_norm = 0.0;
};

/// Cholesky-whitened generator A = G^{-1} K G^{-T} with B = G G^T.
///
/// A has the same spectrum as the pencil (K, B), and its Euclidean operator
/// norm is the pencil's norm in the discrete energy inner product.
Eigen::MatrixXd whitened_generator(const SystemPencil& pencil);

SpectrumReport eigenvalues(const SystemPencil& pencil);

/// Eigenvalues of K x = mu B x from the real QZ algorithm, without whitening.
/// Used as an independent check on eigenvalues().
std::vector<Complex> generalized_eigenvalues(const SystemPencil& pencil);

double spectral_abscissa(const SpectrumReport& report);

/// Largest real part among eigenvalues with |Im mu| <= max_frequency. The
/// band excludes the highest discrete modes, which the mesh does not resolve.
double band_abscissa(const SpectrumReport& report, double max_frequency);

/// Energy-norm resolvent norm 1 / sigma_min(i lambda - A) by a dense SVD.
/// Returns +inf when i lambda is numerically an eigenvalue.
double resolvent_norm(const SystemPencil& pencil, double lambda);

/// Fast repeated resolvent norms: A is reduced once to complex Schur form
/// A = Z T Z^H, after which each evaluation runs Lanczos on
/// (i lambda - T)^{-H} (i lambda - T)^{-1} using only triangular solves.
class ResolventEvaluator {
 public:
  explicit ResolventEvaluator(const SystemPencil& pencil);

  double norm(double lambda) const;
  double generator_norm() const { return generator_norm_; }

 private:
  Eigen::MatrixXcd T_;
  Eigen::VectorXcd start_;
  double generator_norm_ = 0.0;
};

/// Uniform grid of `steps` points on [lambda_min, lambda_max]. Throws NonpositiveParameter for steps < 2.
ResolventTable resolvent_sweep(const SystemPencil& pencil, double lambda_min, double lambda_max, int steps);
ResolventTable resolvent_sweep(const SystemPencil& pencil, const std::vector<double>& lambdas);

/// Roots of mu^2 + beta mu + (k pi / length)^2 = 0 for the k-th mode of a damped string with fixed ends.
std::pair<Complex, Complex> string_modes_closed_form(double beta, double length, int k);

/// First `count` positive roots of 1 + cos(kappa) cosh(kappa) = 0, to 1e-12 by bisection.
std::vector<double> clamped_free_roots(int count);

/// Natural frequencies (kappa_j / length)^2 of a clamped-free beam.
std::vector<double> beam_clamped_free_frequencies(double length, int count);

/// cosh(sqrt a) + cos(sqrt a), the determinant whose positivity rules out
/// imaginary eigenvalues of the undamped beams. Throws NonpositiveParameter for a <= 0.
double neweq_determinant(double a);

struct SlowestMode {
  Complex mu;
  StateVector real_part;  // the eigenvector is scaled to unit energy
  StateVector imag_part;
};

/// Eigenpair whose eigenvalue attains the spectral abscissa (the one with Im >= 0 of a conjugate pair).
SlowestMode slowest_mode(const SystemPencil& pencil);

}  // namespace bsb
