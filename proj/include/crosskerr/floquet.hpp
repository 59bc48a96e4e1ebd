#pragma once

#include <optional>
#include <vector>

#include "crosskerr/hilbert.hpp"
#include "crosskerr/models.hpp"

namespace crosskerr {

struct FloquetLabel {
  int n_a = 0;
  int n_b = 0;
  int n_c = 0;
  bool operator==(const FloquetLabel&) const = default;
};

struct FloquetSpectrum {
  std::vector<FloquetLabel> labels;
  std::vector<double> quasi_energies_MHz;  ///< folded into (-zone/2, zone/2]
  std::vector<double> overlaps;            ///< assignment confidence in [0,1]
  double zone_MHz = 0.0;  ///< drive frequency; 0 for the undriven spectrum
  double min_confidence = 0.5;

  int find(const FloquetLabel& label) const;  ///< -1 when absent
  double quasi_energy(const FloquetLabel& label) const;
  double confidence(const FloquetLabel& label) const;
  bool flagged(const FloquetLabel& label) const;
};

struct FloquetOptions {
  /// Substep doubling stops once the requested quasi-energies move less.
  double convergence_tol_MHz = 1e-4;
  int initial_steps = 4;
  int max_steps = 8192;
  double min_confidence = 0.5;
};

/// Centered fold of x into (-zone/2, zone/2]; identity when zone == 0.
double fold_into_zone(double x, double zone);

/// Dressed parameters of the undriven full-SQUID model, extracted from
/// labeled eigenvalue combinations.
struct DressedParams {
  double omega_a_MHz = 0.0;
  double omega_b_MHz = 0.0;
  double omega_c_MHz = 0.0;
  double chi_a_MHz = 0.0;
  double chi_b_MHz = 0.0;
  double kerr_a_MHz = 0.0;
  double kerr_b_MHz = 0.0;
  double kerr_ab_MHz = 0.0;
  double anharmonicity_MHz = 0.0;
  /// Exchange resonance omega_c + omega_b - omega_a - chi_b of the model.
  double exchange_resonance_MHz() const {
    return omega_c_MHz + omega_b_MHz - omega_a_MHz - chi_b_MHz;
  }
};

/// Propagates the driven full-SQUID model over exact drive periods and
/// extracts labeled quasi-energies. The heavy state (static eigenbasis,
/// coupling matrix in that basis) is computed once per instance.
class FloquetEngine {
 public:
  FloquetEngine(const DeviceParams& params, const ModeSystem& system);

  const ModeSystem& system() const { return system_; }
  /// Static dressed energy of a bare-state label, in MHz (vacuum-referenced
  /// absolute eigenvalue, not folded).
  double static_energy_MHz(const FloquetLabel& label) const;
  DressedParams dressed_params() const;
  /// Static eigenbasis (columns) in the bare Fock basis.
  const Matrix& eigenbasis() const { return evecs_; }

  /// One-period propagator in the static eigenbasis, Magnus expansion in the
  /// interaction picture with exact oscillatory integrals.
  Matrix period_propagator(double eps_MHz, double omega_d_MHz,
                           int steps) const;

  FloquetSpectrum spectrum(double eps_MHz, double omega_d_MHz,
                           const std::vector<FloquetLabel>& requested,
                           const FloquetOptions& options = {}) const;

  /// Undriven spectrum (exact limit of the above; zone left at 0).
  FloquetSpectrum static_spectrum(
      const std::vector<FloquetLabel>& requested) const;

 private:
  ModeSystem system_;
  Eigen::VectorXd evals_;  ///< rad/us
  Matrix evecs_;
  Matrix coupling_;  ///< (c + c^dag) in the static eigenbasis
  std::vector<int> bare_to_dressed_;
  std::vector<double> bare_overlap_;
};

/// Quasi-energy spectroscopy of the driven full-SQUID model. Labels default
/// to the cross-Kerr set plus single-excitation states.
FloquetSpectrum quasi_energy_spectrum(
    const DeviceParams& params, const ModeSystem& system,
    const std::optional<DriveSpec>& drive,
    const std::vector<FloquetLabel>& requested = {},
    const FloquetOptions& options = {});

/// E_110 - E_100 - E_010 + E_000 combination, folded into the zone; MHz.
/// Throws std::runtime_error when any of the four labels is unassigned.
double crosskerr_from_spectrum(const FloquetSpectrum& spectrum);

/// Drive amplitude (MHz) whose coupler AC Stark shift (quasi-energy shift of
/// the g->e transition) equals `target_shift_MHz`; bisection to 1 kHz.
double calibrate_drive_amplitude(const FloquetEngine& engine,
                                 double omega_d_MHz, double target_shift_MHz,
                                 double eps_max_MHz,
                                 const FloquetOptions& options = {});

/// Drive frequency minimizing the |1,0,g> <-> |0,1,e> quasi-energy gap at
/// fixed amplitude (the driven exchange resonance), plus the minimal gap.
struct ResonanceResult {
  double omega_d_MHz = 0.0;
  double gap_MHz = 0.0;  ///< 2 g1 at the resonance
};
ResonanceResult find_driven_resonance(const FloquetEngine& engine,
                                      double eps_MHz, double omega_lo_MHz,
                                      double omega_hi_MHz,
                                      double tol_MHz = 0.02,
                                      const FloquetOptions& options = {});

/// Detuning of the drive from the AC-Stark-shifted exchange resonance, read
/// off the driven spectrum: omega_d - (w_c + w_b - w_a - chi_b) with every
/// term a quasi-energy combination. Needs the default six-label set.
double effective_detuning(const FloquetSpectrum& spectrum, double omega_d_MHz);

/// Moves the drive frequency until the effective detuning equals
/// `delta_target_MHz` (a couple of Newton steps; the map is near-identity).
struct TunedPoint {
  double omega_d_MHz = 0.0;
  FloquetSpectrum spectrum;
};
TunedPoint tune_drive_frequency(const FloquetEngine& engine, double eps_MHz,
                                double delta_target_MHz,
                                double omega_guess_MHz,
                                const FloquetOptions& options = {},
                                double tol_MHz = 0.01);

/// Driven-exchange working point at a given amplitude: Stark-shifted
/// resonance, exchange rate from the minimal quasi-energy gap, and the
/// operational drive strength from the coupler Stark shift.
struct DrivenCalibration {
  double resonance_MHz = 0.0;
  double g1_MHz = 0.0;
  double stark_shift_MHz = 0.0;  ///< coupler g-e shift, signed
  double xi_op = 0.0;            ///< sqrt(|stark| / (2 alpha))
};
DrivenCalibration calibrate_exchange(const FloquetEngine& engine,
                                     double eps_MHz,
                                     const FloquetOptions& options = {});

struct CrossKerrPoint {
  double delta_MHz = 0.0;  ///< effective detuning from the driven resonance
  double omega_d_MHz = 0.0;
  double g_ab_MHz = 0.0;
  double confidence = 0.0;
  bool flagged = false;
};

/// Cross-Kerr vs detuning sweep at fixed drive amplitude. Detunings are
/// effective (relative to the Stark-shifted resonance); each point retunes
/// the drive frequency. Flagged points carry the label-collision or
/// continuity flag and no usable value.
std::vector<CrossKerrPoint> crosskerr_sweep(const FloquetEngine& engine,
                                            double eps_MHz,
                                            const std::vector<double>& deltas,
                                            const FloquetOptions& options = {});

}  // namespace crosskerr
