#include "crosskerr/effective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crosskerr/hilbert.hpp"

namespace crosskerr {

namespace {

double beta_denominator(const SwtInputs& in, int n_a, int n_b) {
  // Frame constant omega_d - omega_c + omega_a - omega_b = delta - chi_b,
  // matching the resonance condition used by drive_frequency().
  return in.delta_MHz - in.chi_b_MHz - in.kerr_a_MHz * (n_a - 1) +
         in.kerr_b_MHz * n_b + in.chi_a_MHz * (n_a - 1) +
         in.chi_b_MHz * (n_b + 1) - in.kerr_ab_MHz * (n_b - n_a + 1);
}

}  // namespace

double beta_coefficient(const SwtInputs& in, int n_a, int n_b) {
  if (n_a < 0 || n_b < 0) {
    throw std::invalid_argument("beta_coefficient: negative photon number");
  }
  if (n_a == 0) return 0.0;
  const double den = beta_denominator(in, n_a, n_b);
  if (den == 0.0) {
    throw std::domain_error("beta_coefficient: resonant denominator at (n_a=" +
                            std::to_string(n_a) +
                            ", n_b=" + std::to_string(n_b) + ")");
  }
  return std::sqrt(double(n_a) * (n_b + 1)) * in.g1_MHz / den;
}

double energy_shift(const SwtInputs& in, int n_a, int n_b) {
  if (n_a == 0) return 0.0;
  return beta_coefficient(in, n_a, n_b) * std::sqrt(double(n_a) * (n_b + 1)) *
         in.g1_MHz;
}

double engineered_crosskerr(const SwtInputs& in) {
  const double x = in.chi_b_MHz + in.kerr_b_MHz - in.kerr_ab_MHz;
  if (in.delta_MHz == 0.0 || in.delta_MHz + x == 0.0) {
    throw std::domain_error("engineered_crosskerr: resonant denominator");
  }
  return -in.kerr_ab_MHz + (in.g1_MHz * in.g1_MHz / in.delta_MHz) *
                               (in.delta_MHz - x) / (in.delta_MHz + x);
}

double max_coupler_excitation(double g1_MHz, double delta_MHz) {
  const double g2 = g1_MHz * g1_MHz;
  if (g2 == 0.0 && delta_MHz == 0.0) return 0.0;
  return g2 / (g2 + delta_MHz * delta_MHz);
}

double gate_time(double g_ab_MHz, int n_a, int n_b, double target_phase_rad) {
  if (g_ab_MHz == 0.0) {
    throw std::invalid_argument("gate_time: zero coupling");
  }
  if (n_a <= 0 || n_b <= 0) {
    throw std::invalid_argument("gate_time: photon numbers must be >= 1");
  }
  return std::abs(target_phase_rad) /
         (kTwoPi * std::abs(g_ab_MHz) * n_a * n_b);
}

double gate_time_for_code(double g_ab_MHz, int symmetry_n, int symmetry_m) {
  if (g_ab_MHz == 0.0) {
    throw std::invalid_argument("gate_time_for_code: zero coupling");
  }
  if (symmetry_n <= 0 || symmetry_m <= 0) {
    throw std::invalid_argument("gate_time_for_code: symmetries must be >= 1");
  }
  return 1.0 / (2.0 * std::abs(g_ab_MHz) * symmetry_n * symmetry_m);
}

double dressed_lifetime_estimate(double beta, double coupler_tphi_us) {
  if (beta == 0.0) {
    throw std::domain_error(
        "dressed_lifetime_estimate: beta = 0 (undriven, no induced decay)");
  }
  return coupler_tphi_us / (beta * beta);
}

}  // namespace crosskerr
