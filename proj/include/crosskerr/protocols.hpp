#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosskerr/dynamics.hpp"
#include "crosskerr/floquet.hpp"
#include "crosskerr/hilbert.hpp"
#include "crosskerr/models.hpp"

namespace crosskerr {

// -- Exchange chevron ----------------------------------------------------------

struct ChevronResult {
  std::vector<double> deltas_MHz;
  std::vector<double> times_us;
  Eigen::MatrixXd p_alice_vacuum;  ///< (delta, time)
  Eigen::MatrixXd p_bob_vacuum;
  Eigen::MatrixXd p_coupler_excited;
};

/// Exchange-model population maps from |1,0,g> under the driven exchange,
/// with the device's driven coherences. Ramps (if any) multiply g1(t).
ChevronResult chevron_scan(const DeviceParams& params, double g1_MHz,
                           const std::vector<double>& deltas_MHz,
                           const std::vector<double>& times_us,
                           bool with_decoherence = true,
                           double ramp_us = 0.0);

// -- Ramsey cross-Kerr calibration ----------------------------------------------

struct RamseyResult {
  double g_ab_MHz = 0.0;       ///< differential phase slope / 2 pi
  double frame_slope_MHz = 0.0;  ///< unconditional slope with the control in 0
};

/// Self-consistency route: phase slopes of the probe coherence under the
/// effective cross-Kerr model.
RamseyResult ramsey_crosskerr_effective(double g_ab_MHz, int control_photons,
                                        const std::vector<double>& times_us);

/// Full-SQUID route: stroboscopic phase evolution under the driven model at
/// an effective detuning; an independent dynamical measurement of the
/// engineered cross-Kerr.
RamseyResult ramsey_crosskerr_driven(const FloquetEngine& engine,
                                     double eps_MHz, double omega_d_MHz,
                                     const std::vector<double>& times_us);

// -- Controlled-phase gates -----------------------------------------------------

/// Evolution under the effective cross-Kerr for the controlled-phase
/// duration; optional collapse operators act during the gate.
DensityMatrix cphase_gate(
    const DensityMatrix& rho0, double g_ab_MHz, double target_phase_rad,
    int n_a, int n_b,
    const std::vector<std::pair<Operator, double>>& collapse = {});

struct GateDecayResult {
  std::vector<double> fidelities;  ///< after 0..N gates
  double per_gate_infidelity = 0.0;
  double intercept = 0.0;
};

/// Repeated controlled-phase applications with decoherence, tracked against
/// the ideal-gate orbit of the initial state; per-gate infidelity from a
/// linear fit of the decay.
GateDecayResult repeated_gate_fidelity(
    const Vector& psi0, const ModeSystem& system, int gates, double g_ab_MHz,
    double target_phase_rad, int n_a, int n_b,
    const std::vector<std::pair<Operator, double>>& collapse);

/// Idle control: same schedule without the gate drive.
GateDecayResult idle_wait_fidelity(
    const Vector& psi0, const ModeSystem& system, int gates,
    double gate_time_us,
    const std::vector<std::pair<Operator, double>>& collapse);

// -- SNAP pulses -----------------------------------------------------------------

struct SnapSpec {
  Complex alpha1;
  std::vector<double> thetas;  ///< phase per Fock number
  Complex alpha2;
};

/// D(alpha2) [sum_n e^{i theta_n} |n><n|] D(alpha1) on the labeled mode.
Operator snap_unitary(const SnapSpec& spec, const ModeSystem& system,
                      const std::string& label);

/// Rows of the pulse table: Fock-1 preparation, superposition preparation,
/// and the parity-mapping pulse.
SnapSpec snap_prepare_fock1();
SnapSpec snap_prepare_superposition();
SnapSpec snap_parity_mapping();

// -- Bosonic parity check ---------------------------------------------------------

/// Odd-parity population of an initial two-photon state under amplitude
/// damping: 2 x (1 - x) with x = exp(-t/T1).
double p_odd_analytic(double t_us, double t1_us);

struct ParityCheckOptions {
  double t1_us = 750.0;
  double g_ab_MHz = 0.0953;
  int alice_dim = 5;
  int bob_dim = 12;
  bool ideal_snap = true;
  bool ideal_readout = true;
  bool gate_decoherence = false;
};

struct ParityCheckResult {
  std::vector<double> delays_us;
  std::vector<double> p_odd;              ///< P(e) of Bob's probe
  std::vector<double> p2_unconditioned;   ///< Alice |2> population
  std::vector<double> p2_post_selected;   ///< same, heralded on even parity
  std::vector<double> herald_probability;
  double t1_unconditioned_us = 0.0;  ///< exponential-fit decay constants
  double t1_post_selected_us = 0.0;
};

/// The storage-cavity parity check: Alice |2> decays for a delay, a C_2pi
/// gate maps her parity onto Bob's superposition phase, the SNAP pulse and a
/// vacuum-selective probe read it out, and Alice is kept or discarded on the
/// herald.
ParityCheckResult parity_check_protocol(const DeviceParams& params,
                                        const std::vector<double>& delays_us,
                                        const ParityCheckOptions& options = {});

// -- Error budget -----------------------------------------------------------------

struct ErrorBudgetEntry {
  std::string state;
  double spam = 0.0;
  double coupler_population = 0.0;
  double alice_decoherence = 0.0;
  double bob_decoherence = 0.0;
  double total() const {
    return spam + coupler_population + alice_decoherence + bob_decoherence;
  }
};

struct ErrorBudgetConfig {
  double g_ab_MHz = -0.1261;  ///< engineered coupling at the operating point
  double g1_MHz = 0.8;
  double delta_MHz = -6.0;
  double prep_duration_us = 2.0;
  double tomo_duration_us = 2.0;
  std::uint64_t seed = 1;
};

/// Named initial states of the single-gate budget: "++", "+0", "1+", "11".
Vector budget_initial_state(const ModeSystem& system, const std::string& name);

/// One-mechanism-at-a-time infidelity contributions for a single
/// controlled-phase gate.
std::vector<ErrorBudgetEntry> error_budget(
    const DeviceParams& params, const std::vector<std::string>& states,
    const ErrorBudgetConfig& config = {});

}  // namespace crosskerr
