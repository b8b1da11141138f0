#include "bsb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bsb/errors.hpp"

namespace bsb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::LLT<Eigen::MatrixXd> factor_energy_gram(const SystemPencil& pencil) {
  Eigen::LLT<Eigen::MatrixXd> llt(pencil.B);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailure, "energy Gram matrix B is not positive definite");
  }
  return llt;
}

bool by_imag_then_real(const Complex& a, const Complex& b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

// Singular value below this is treated as an exact hit on the spectrum.
double singular_floor(double generator_norm) {
  return 4.0 * std::numeric_limits<double>::epsilon() * std::max(generator_norm, 1.0);
}

}  // namespace

Eigen::MatrixXd whitened_generator(const SystemPencil& pencil) {
  const auto llt = factor_energy_gram(pencil);
  const auto L = llt.matrixL();
  const Eigen::MatrixXd Y = L.solve(pencil.K);                // G^{-1} K
  return L.solve(Y.transpose()).transpose();                  // G^{-1} K G^{-T}
}

SpectrumReport eigenvalues(const SystemPencil& pencil) {
  const Eigen::MatrixXd A = whitened_generator(pencil);
  // Eigenvectors are computed here as well so that slowest_mode() sees the
  // very same eigenvalues.
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "eigenvalue iteration did not converge");

  SpectrumReport r;
  r.regime = pencil.regime;
  const Eigen::VectorXcd mus = es.eigenvalues();
  const auto n = static_cast<std::size_t>(mus.size());
  if (n == 0) return r;

  std::vector<Eigen::Index> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return by_imag_then_real(mus(a), mus(b)); });
  r.abscissa = -kInf;
  r.min_distance_to_imaginary_axis = kInf;
  for (Eigen::Index i : order) {
    const Complex mu = mus(i);
    r.eigenvalues.push_back(mu);
    r.abscissa = std::max(r.abscissa, mu.real());
    r.min_distance_to_imaginary_axis = std::min(r.min_distance_to_imaginary_axis, std::abs(mu.real()));
  }

  // A nearly coincident pair with nearly parallel eigenvectors is numerically
  // defective; its eigenvalues are only accurate to about sqrt(eps).
  const Eigen::MatrixXcd V = es.eigenvectors();
  std::size_t defective = 0;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex &x = mus(order[a]), &y = mus(order[b]);
      if (y.imag() - x.imag() > 1e-6 * std::max(1.0, std::abs(x))) break;
      if (std::abs(x - y) > 1e-6 * std::max(1.0, std::abs(x))) continue;
      const double c = std::abs(V.col(order[a]).dot(V.col(order[b])));
      if (c > 0.99) ++defective;
    }
  }
  if (defective > 0) {
    std::ostringstream os;
    os << defective << " eigenvalue pair(s) look defective (coincident values, parallel eigenvectors);"
       << " those eigenvalues are ill-conditioned";
    r.warnings.push_back(os.str());
  }
  return r;
}

double band_abscissa(const SpectrumReport& report, double max_frequency) {
  double a = -kInf;
  for (const auto& mu : report.eigenvalues)
    if (std::abs(mu.imag()) <= max_frequency) a = std::max(a, mu.real());
  if (a == -kInf) throw Error(ErrorCode::EmptySpectrum, "no eigenvalues inside the frequency band");
  return a;
}

std::vector<Complex> generalized_eigenvalues(const SystemPencil& pencil) {
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(pencil.K, pencil.B, false);
  if (ges.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "QZ iteration did not converge");
  const Eigen::VectorXcd alphas = ges.alphas();
  const Eigen::VectorXd betas = ges.betas();
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(alphas.size()));
  for (Eigen::Index i = 0; i < alphas.size(); ++i) out.push_back(alphas(i) / betas(i));
  std::sort(out.begin(), out.end(), by_imag_then_real);
  return out;
}

double spectral_abscissa(const SpectrumReport& report) {
  if (report.eigenvalues.empty()) throw Error(ErrorCode::EmptySpectrum, "no eigenvalues to summarize");
  double a = -kInf;
  for (const auto& mu : report.eigenvalues) a = std::max(a, mu.real());
  return a;
}

double resolvent_norm(const SystemPencil& pencil, double lambda) {
  const Eigen::MatrixXd A = whitened_generator(pencil);
  const Eigen::Index n = A.rows();
  Eigen::MatrixXcd R = -A.cast<Complex>();
  R.diagonal().array() += Complex(0.0, lambda);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(R);
  const double smin = svd.singularValues()(n - 1);
  const double anorm = Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues()(0);
  if (!(smin > singular_floor(anorm))) return kInf;
  return 1.0 / smin;
}

ResolventEvaluator::ResolventEvaluator(const SystemPencil& pencil) {
  const Eigen::MatrixXd A = whitened_generator(pencil);
  generator_norm_ = A.rows() > 0 ? Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues()(0) : 0.0;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<Complex>(), false);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "Schur reduction failed");
  T_ = schur.matrixT();

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  start_.resize(T_.rows());
  for (Eigen::Index i = 0; i < start_.size(); ++i) start_(i) = Complex(normal(rng), normal(rng));
  start_.normalize();
}

double ResolventEvaluator::norm(double lambda) const {
  const Eigen::Index n = T_.rows();
  if (n == 0) return 0.0;

  Eigen::MatrixXcd R = -T_;
  R.diagonal().array() += Complex(0.0, lambda);
  const double floor = singular_floor(generator_norm_);
  // sigma_min(R) <= min |R_ii|, so a tiny diagonal entry means a hit on the spectrum.
  if (!(R.diagonal().cwiseAbs().minCoeff() > floor)) return kInf;
  const auto U = R.triangularView<Eigen::Upper>();

  // Lanczos with full reorthogonalization for the largest eigenvalue of R^{-H} R^{-1}.
  const Eigen::Index max_iter = n;
  Eigen::MatrixXcd V(n, std::min<Eigen::Index>(max_iter, 200) + 1);
  std::vector<double> alpha, beta;
  V.col(0) = start_;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < V.cols() - 1; ++j) {
    Eigen::VectorXcd w = U.solve(V.col(j));
    w = U.adjoint().solve(w);
    if (!w.allFinite()) return kInf;
    const double a = V.col(j).dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXcd c = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * c;
    }
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      tri(k, k) = alpha[k];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    theta = es.eigenvalues()(m - 1);
    const double residual = b * std::abs(es.eigenvectors()(m - 1, m - 1));
    if (residual <= 1e-10 * theta || j + 1 == n) break;

    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) return kInf;
  const double result = std::sqrt(theta);
  if (!(1.0 / result > floor)) return kInf;
  return result;
}

ResolventTable resolvent_sweep(const SystemPencil& pencil, const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) throw Error(ErrorCode::NonpositiveParameter, "resolvent sweep needs at least 2 points");
  const ResolventEvaluator eval(pencil);
  ResolventTable t;
  t.lambdas = lambdas;
  std::sort(t.lambdas.begin(), t.lambdas.end());
  t.norms.reserve(t.lambdas.size());
  for (double l : t.lambdas) {
    t.norms.push_back(eval.norm(l));
    t.sup_norm = std::max(t.sup_norm, t.norms.back());
  }
  return t;
}

ResolventTable resolvent_sweep(const SystemPencil& pencil, double lambda_min, double lambda_max, int steps) {
  if (steps < 2) throw Error(ErrorCode::NonpositiveParameter, "resolvent sweep needs steps >= 2");
  if (!(lambda_min < lambda_max)) throw Error(ErrorCode::NonpositiveParameter, "need lambda_min < lambda_max");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) grid[k] = lambda_min + (lambda_max - lambda_min) * k / (steps - 1);
  grid.back() = lambda_max;
  return resolvent_sweep(pencil, grid);
}

std::pair<Complex, Complex> string_modes_closed_form(double beta, double length, int k) {
  if (!(length > 0.0)) throw Error(ErrorCode::NonpositiveLength, "string length must be positive");
  if (k < 1) throw Error(ErrorCode::NonpositiveParameter, "mode index must be >= 1");
  const double omega = k * std::numbers::pi / length;
  const Complex disc = std::sqrt(Complex(beta * beta - 4.0 * omega * omega, 0.0));
  return {(-beta - disc) / 2.0, (-beta + disc) / 2.0};
}

std::vector<double> clamped_free_roots(int count) {
  if (count < 1) throw Error(ErrorCode::NonpositiveParameter, "count must be >= 1");
  // cos k + 1/cosh k has the sign of 1 + cos k cosh k and never overflows.
  auto f = [](double k) { return std::cos(k) + 1.0 / std::cosh(k); };
  std::vector<double> roots;
  for (int j = 1; j <= count; ++j) {
    const double centre = (2 * j - 1) * std::numbers::pi / 2.0;
    double lo = centre - 1.0, hi = centre + 1.0;
    double flo = f(lo);
    if (flo * f(hi) > 0.0) throw Error(ErrorCode::SolveFailure, "root bracket lost its sign change");
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

std::vector<double> beam_clamped_free_frequencies(double length, int count) {
  if (!(length > 0.0)) throw Error(ErrorCode::NonpositiveLength, "beam length must be positive");
  std::vector<double> omega = clamped_free_roots(count);
  for (double& k : omega) k = (k / length) * (k / length);
  return omega;
}

double neweq_determinant(double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonpositiveParameter, "determinant parameter must be positive");
  const double s = std::sqrt(a);
  return std::cosh(s) + std::cos(s);
}

SlowestMode slowest_mode(const SystemPencil& pencil) {
  const auto llt = factor_energy_gram(pencil);
  const Eigen::MatrixXd A = whitened_generator(pencil);
  if (A.rows() == 0) throw Error(ErrorCode::EmptySpectrum, "empty pencil");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "eigenvalue iteration did not converge");

  const Eigen::VectorXcd mus = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < mus.size(); ++i) {
    const Complex& m = mus(i);
    const Complex& b = mus(best);
    if (m.real() > b.real() || (m.real() == b.real() && m.imag() > b.imag())) best = i;
  }

  // Unit energy: 1/2 x^H B x = 1 with x = G^{-T} z means |z| = sqrt(2).
  Eigen::VectorXcd z = es.eigenvectors().col(best);
  z *= std::sqrt(2.0) / z.norm();
  Eigen::Index big = 0;
  z.cwiseAbs().maxCoeff(&big);
  z *= std::conj(z(big)) / std::abs(z(big));

  const Eigen::VectorXcd x = llt.matrixU().solve(z);
  SlowestMode out;
  out.mu = mus(best);
  out.real_part = StateVector::from_stacked(x.real());
  out.imag_part = StateVector::from_stacked(x.imag());
  return out;
}

}  // namespace bsb
