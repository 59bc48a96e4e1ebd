#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crosskerr/dynamics.hpp"

namespace crosskerr {

namespace {

double model_eval(const Eigen::VectorXd& p, double t) {
  // p = (A, B, kappa1, kappa_phi, g1, phi0)
  return p(0) * std::exp(-p(2) * t) *
             (1.0 + std::exp(-p(3) * t) *
                        std::cos(kTwoPi * 2.0 * p(4) * t + p(5))) +
         p(1);
}

// Periodogram peak of the demeaned samples, refined parabolically.
double dominant_frequency(const std::vector<double>& t,
                          const std::vector<double>& v) {
  const std::size_t n = t.size();
  const double span = t.back() - t.front();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(n);
  const double f_min = 0.25 / span;
  const double f_max = 0.5 * double(n) / span;
  const int grid = 600;
  std::vector<double> power(grid);
  int best = 0;
  for (int g = 0; g < grid; ++g) {
    const double f = f_min + (f_max - f_min) * g / (grid - 1);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += (v[k] - mean) * std::exp(Complex(0, -kTwoPi * f * t[k]));
    }
    power[g] = std::norm(acc);
    if (power[g] > power[best]) best = g;
  }
  double f_peak = f_min + (f_max - f_min) * best / (grid - 1);
  if (best > 0 && best < grid - 1) {
    const double dp = 0.5 * (power[best + 1] - power[best - 1]);
    const double d2p = power[best + 1] - 2 * power[best] + power[best - 1];
    if (d2p < 0) {
      f_peak += (f_max - f_min) / (grid - 1) * std::clamp(-dp / d2p, -1.0, 1.0);
    }
  }
  return f_peak;
}

}  // namespace

double DampedCosineFit::evaluate(double t_us) const {
  Eigen::VectorXd p(6);
  p << amplitude, offset, kappa1_per_us, kappa_phi_per_us, g1_MHz, phi0_rad;
  return model_eval(p, t_us);
}

DampedCosineFit fit_damped_cosine(const std::vector<double>& times_us,
                                  const std::vector<double>& values) {
  const std::size_t n = times_us.size();
  if (n < 8 || values.size() != n) {
    throw std::invalid_argument("fit_damped_cosine: needs >= 8 aligned samples");
  }
  double vmin = values[0], vmax = values[0];
  for (double v : values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax - vmin < 1e-12) {
    throw std::invalid_argument("fit_damped_cosine: degenerate flat input");
  }

  const double span = times_us.back() - times_us.front();
  const double f0 = dominant_frequency(times_us, values);
  if (f0 * span < 1.0) {
    throw std::invalid_argument(
        "fit_damped_cosine: samples span less than one oscillation");
  }

  // Endpoint means: early points ~ 2A+B, late half ~ A+B once the
  // oscillation has averaged out.
  const std::size_t n_head = std::max<std::size_t>(1, n / 20);
  double head = 0.0;
  for (std::size_t i = 0; i < n_head; ++i) head += values[i];
  head /= double(n_head);
  double tail = 0.0;
  for (std::size_t i = n / 2; i < n; ++i) tail += values[i];
  tail /= double(n - n / 2);

  Eigen::VectorXd p(6);
  p << head - tail, 2.0 * tail - head, 0.1 / span, 0.1 / span, 0.5 * f0, 0.0;
  if (p(0) <= 0) p(0) = 0.5 * (vmax - vmin);

  auto chi2 = [&](const Eigen::VectorXd& q, Eigen::VectorXd* resid) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = model_eval(q, times_us[k]) - values[k];
      if (resid) (*resid)(k) = r;
      acc += r * r;
    }
    return acc;
  };

  Eigen::VectorXd resid(n), resid_try(n);
  Eigen::MatrixXd jac(n, 6);
  double best = chi2(p, &resid);
  double lambda = 1e-3;
  int iters = 0;
  int stall = 0;
  double best_checkpoint = best;
  for (; iters < 400 && stall < 4; ++iters) {
    if (iters % 40 == 39) {
      // Plateau check: residual mismatch with the model keeps LM creeping
      // along a flat valley; stop once a whole window moves chi2 by less
      // than 0.2%. Clean fits converge through the stall counter instead.
      if (best_checkpoint - best < 2e-3 * best) {
        stall = 4;
        break;
      }
      best_checkpoint = best;
    }
    for (int j = 0; j < 6; ++j) {
      const double dp = std::max(1e-8, 1e-7 * std::abs(p(j)));
      Eigen::VectorXd q = p;
      q(j) += dp;
      for (std::size_t k = 0; k < n; ++k) {
        jac(k, j) = (model_eval(q, times_us[k]) - resid(k) - values[k]) / dp;
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;

    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      Eigen::MatrixXd m = jtj;
      m.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = m.ldlt().solve(jtr);
      Eigen::VectorXd q = p - step;
      q(2) = std::max(0.0, q(2));
      q(3) = std::max(0.0, q(3));
      const double trial = chi2(q, &resid_try);
      if (trial < best) {
        if (best - trial < 1e-10 * best + 1e-28) {
          ++stall;
        } else {
          stall = 0;
        }
        p = q;
        resid.swap(resid_try);
        best = trial;
        lambda = std::max(1e-12, lambda / 3.0);
        accepted = true;
      } else {
        lambda *= 7.0;
      }
    }
    if (!accepted) ++stall;
  }
  if (stall < 4) {
    throw std::runtime_error(
        "fit_damped_cosine: no convergence within iteration budget");
  }

  // Canonical signs: report a positive frequency.
  if (p(4) < 0) {
    p(4) = -p(4);
    p(5) = -p(5);
  }

  DampedCosineFit fit;
  fit.amplitude = p(0);
  fit.offset = p(1);
  fit.kappa1_per_us = p(2);
  fit.kappa_phi_per_us = p(3);
  fit.g1_MHz = p(4);
  fit.phi0_rad = std::remainder(p(5), kTwoPi);
  fit.iterations = iters;
  fit.residual_rms = std::sqrt(best / double(n));

  for (int j = 0; j < 6; ++j) {
    const double dp = std::max(1e-8, 1e-7 * std::abs(p(j)));
    Eigen::VectorXd q = p;
    q(j) += dp;
    for (std::size_t k = 0; k < n; ++k) {
      jac(k, j) = (model_eval(q, times_us[k]) - resid(k) - values[k]) / dp;
    }
  }
  const double dof = std::max<double>(1.0, double(n) - 6.0);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  fit.covariance =
      (best / dof) *
      jtj.ldlt().solve(Eigen::MatrixXd::Identity(6, 6));
  return fit;
}

}  // namespace crosskerr
