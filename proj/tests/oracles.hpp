#pragma once

// Test-only reference computations, independent of the library's code paths.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Polynomial as coefficients of 1, x, x^2, ...
using Poly = std::vector<double>;

inline Poly multiply(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly derivative(const Poly& a) {
  if (a.size() <= 1) return {0.0};
  Poly d(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = static_cast<double>(i) * a[i];
  return d;
}

// Exact integral over [0, h].
inline double integrate(const Poly& a, double h) {
  double s = 0.0, hp = h;
  for (std::size_t i = 0; i < a.size(); ++i, hp *= h) s += a[i] * hp / static_cast<double>(i + 1);
  return s;
}

// Hermite cubic basis on [0, h] expanded in powers of x.
inline std::vector<Poly> hermite_basis(double h) {
  const double h2 = h * h, h3 = h2 * h;
  return {
      {1.0, 0.0, -3.0 / h2, 2.0 / h3},
      {0.0, 1.0, -2.0 / h, 1.0 / h2},
      {0.0, 0.0, 3.0 / h2, -2.0 / h3},
      {0.0, 0.0, -1.0 / h, 1.0 / h2},
  };
}

inline std::vector<Poly> linear_basis(double h) { return {{1.0, -1.0 / h}, {0.0, 1.0 / h}}; }

// Newton iteration on 1 + cos k cosh k started near the asymptotic root.
inline double clamped_free_root_newton(int j) {
  double k = (2 * j - 1) * M_PI / 2.0;
  if (j == 1) k = 1.9;
  for (int it = 0; it < 100; ++it) {
    const double f = std::cos(k) + 1.0 / std::cosh(k);
    const double df = -std::sin(k) - std::sinh(k) / (std::cosh(k) * std::cosh(k));
    const double step = f / df;
    k -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return k;
}


// y^H A y with long double accumulation, written independently of the library.
inline std::complex<double> quadratic_form(const Eigen::MatrixXd& A, const Eigen::VectorXcd& y) {
  long double re = 0.0L, im = 0.0L;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const long double a = A(i, j);
      if (a == 0.0L) continue;
      const long double xr = y(i).real(), xi = -y(i).imag(), zr = y(j).real(), zi = y(j).imag();
      re += a * (xr * zr - xi * zi);
      im += a * (xr * zi + xi * zr);
    }
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace oracle
