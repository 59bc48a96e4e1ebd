#pragma once

// Shared test helpers and closed-form oracles kept independent of the
// library's implementation paths.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "crosskerr/hilbert.hpp"

namespace test_support {

using crosskerr::Complex;
using crosskerr::Matrix;

inline double laguerre(int n, int k, double x) {
  double lm1 = 1.0;  // L_0
  if (n == 0) return lm1;
  double l = 1.0 + k - x;  // L_1
  for (int i = 1; i < n; ++i) {
    const double lp1 = ((2.0 * i + 1.0 + k - x) * l - (i + k) * lm1) / (i + 1);
    lm1 = l;
    l = lp1;
  }
  return l;
}

// Closed-form displaced-Fock overlap <m|D(alpha)|n>.
inline Complex displaced_fock_element(int m, int n, Complex alpha) {
  const double x = std::norm(alpha);
  auto log_fact = [](int k) { return std::lgamma(double(k) + 1.0); };
  if (m >= n) {
    const double pref = std::exp(0.5 * (log_fact(n) - log_fact(m)) - 0.5 * x);
    return pref * std::pow(alpha, m - n) * laguerre(n, m - n, x);
  }
  const double pref = std::exp(0.5 * (log_fact(m) - log_fact(n)) - 0.5 * x);
  return pref * std::pow(-std::conj(alpha), n - m) * laguerre(m, n - m, x);
}

inline double normal_draw(std::mt19937_64& rng) {
  // Box-Muller on uniform bits, independent of libstdc++ distributions.
  const double u1 =
      (double(rng() >> 11) + 0.5) / 9007199254740992.0;  // (0,1)
  const double u2 = (double(rng() >> 11) + 0.5) / 9007199254740992.0;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Matrix ginibre(int dim, std::mt19937_64& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(normal_draw(rng), normal_draw(rng));
    }
  }
  return g;
}

inline crosskerr::DensityMatrix random_state(const crosskerr::ModeSystem& sys,
                                             std::mt19937_64& rng) {
  const Matrix g = ginibre(sys.total_dim(), rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return crosskerr::DensityMatrix(sys, rho);
}

inline crosskerr::Vector random_ket(const crosskerr::ModeSystem& sys,
                                    std::mt19937_64& rng) {
  crosskerr::Vector psi(sys.total_dim());
  for (int i = 0; i < sys.total_dim(); ++i) {
    psi(i) = Complex(normal_draw(rng), normal_draw(rng));
  }
  return psi / psi.norm();
}

}  // namespace test_support
