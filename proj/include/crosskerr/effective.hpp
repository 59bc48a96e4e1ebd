#pragma once

namespace crosskerr {

/// Inputs of the second-order perturbative (Schrieffer-Wolff) treatment of
/// the driven exchange. All entries are ordinary frequencies in MHz; delta is
/// the detuning from the single-photon exchange resonance.
struct SwtInputs {
  double g1_MHz = 0.0;
  double delta_MHz = 0.0;
  double chi_b_MHz = 0.0;
  double kerr_a_MHz = 0.0;
  double kerr_b_MHz = 0.0;
  double kerr_ab_MHz = 0.0;
  double chi_a_MHz = 0.0;
};

/// Generator coefficient of the |n_a, n_b, g> <-> |n_a-1, n_b+1, e| block.
/// Throws on a resonant denominator.
double beta_coefficient(const SwtInputs& in, int n_a, int n_b);

/// Second-order energy shift of |n_a, n_b, g>, in MHz.
double energy_shift(const SwtInputs& in, int n_a, int n_b);

/// Total engineered cross-Kerr in the 0/1 subspace, including the static
/// -K_ab contribution, in MHz.
double engineered_crosskerr(const SwtInputs& in);

/// Adiabatic upper bound on the coupler excited population, g1^2/(g1^2+d^2).
double max_coupler_excitation(double g1_MHz, double delta_MHz);

/// Controlled-phase duration: T = |phase| / (2*pi*|g_ab|*n_a*n_b), in us.
double gate_time(double g_ab_MHz, int n_a, int n_b, double target_phase_rad);

/// Gate time of a full CZ between rotation-symmetric codes with symmetries
/// N and M: g_ab * T = 1/(2*N*M) cycles.
double gate_time_for_code(double g_ab_MHz, int symmetry_n, int symmetry_m);

/// Drive-dressed oscillator lifetime estimate Tphi / beta^2, in us.
double dressed_lifetime_estimate(double beta, double coupler_tphi_us);

}  // namespace crosskerr
