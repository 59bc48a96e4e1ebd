#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "crosskerr/hilbert.hpp"

namespace crosskerr {

constexpr double kInfTime = std::numeric_limits<double>::infinity();

struct CoherencePair {
  double t1_us = kInfTime;
  double tphi_us = kInfTime;
};

struct ModeCoherences {
  CoherencePair idle;
  CoherencePair driven;
};

/// Hamiltonian coefficients of the two-cavity + coupler system. All
/// frequencies are ordinary (not angular): MHz except the junction/charging
/// energies, which follow the GHz convention of the fitted values.
struct DeviceParams {
  double omega_a_MHz = 0.0;
  double omega_b_MHz = 0.0;
  double omega_c_MHz = 0.0;
  double kerr_a_MHz = 0.0;   ///< cavity self-Kerr K_a
  double kerr_b_MHz = 0.0;   ///< cavity self-Kerr K_b
  double anharmonicity_MHz = 0.0;  ///< coupler anharmonicity
  double chi_a_MHz = 0.0;    ///< coupler-Alice dispersive shift
  double chi_b_MHz = 0.0;    ///< coupler-Bob dispersive shift
  double kerr_ab_MHz = 0.0;  ///< static cavity-cavity cross-Kerr K_ab
  double ej1_GHz = 0.0;
  double ej2_GHz = 0.0;
  double ec_GHz = 0.0;
  double flux = 0.0;  ///< external flux in units of Phi_0
  double g_ac_MHz = 0.0;
  double g_bc_MHz = 0.0;
  std::map<std::string, ModeCoherences> coherences;

  void validate() const;
  const CoherencePair& coherence(const std::string& label, bool driven) const;
};

/// Operating point of Figs. 3-4: coupler at 5.22 GHz, weak dispersive shifts.
DeviceParams fig3_bias();
/// Exchange-calibration operating point (Figs. 1c/2a): coupler placed so the
/// single-photon exchange resonance sits at 5.20 GHz, strong dispersive
/// shifts.
DeviceParams fig2_bias();
/// Swaps in the Ramsey-derived driven dephasing times (the shorter set).
void use_ramsey_driven_coherences(DeviceParams& params);

enum class SquidConvention {
  kSquaredRatio,  ///< sqrt(1 + (dEJ/sumEJ)^2 tan^2), default
  kLiteralRatio,  ///< sqrt(1 + (dEJ/sumEJ) tan^2), as sometimes printed
};

/// Flux-dependent effective Josephson energy of the asymmetric SQUID (GHz).
double squid_ej(double flux, double ej1_GHz, double ej2_GHz,
                SquidConvention convention = SquidConvention::kSquaredRatio);

/// Bare Josephson plasma frequency sqrt(8 E_J(flux) E_C), in MHz.
double plasma_frequency_MHz(const DeviceParams& params);

/// Flux in [0, 0.5) at which the bare SQUID transmon's 0-1 transition equals
/// `target_MHz` (solved on the exact cosine model).
double flux_for_coupler_frequency(double ej1_GHz, double ej2_GHz,
                                  double ec_GHz, double target_MHz);

struct DriveSpec {
  enum class AmplitudeMode { kRawEpsilon, kEffectiveXi };
  enum class Envelope { kFlat, kFlatWithRamps };

  double frequency_MHz = 0.0;
  AmplitudeMode amplitude_mode = AmplitudeMode::kRawEpsilon;
  double amplitude = 0.0;  ///< MHz for epsilon, dimensionless for xi
  double phase_rad = 0.0;
  Envelope envelope = Envelope::kFlat;
  double ramp_us = 0.0;
  double duration_us = 0.0;

  void validate() const;
};

/// Displaced-frame drive strength xi = epsilon / (omega_d - plasma frequency).
double xi_from_drive(const DeviceParams& params, const DriveSpec& drive);
double epsilon_from_xi(const DeviceParams& params, double xi,
                       double omega_d_MHz);

/// Cosine-squared turn-on/turn-off envelope; 1 on the flat top.
double ramp_envelope(double t_us, double duration_us, double ramp_us);

/// H(t) = h0 + sum_k amp_k * env_k(t) * cos(omega_k t + phase_k) * op_k,
/// all matrices in angular units (rad/us).
struct DrivenHamiltonian {
  ModeSystem system;
  Matrix h0;
  struct HarmonicTerm {
    Matrix op;  ///< Hermitian
    double amplitude = 0.0;      ///< rad/us
    double omega = 0.0;          ///< rad/us
    double phase = 0.0;          ///< rad
    std::function<double(double)> envelope;  ///< optional, default 1
  };
  std::vector<HarmonicTerm> terms;

  Matrix at(double t_us) const;
  bool is_constant() const { return terms.empty(); }
  /// Drive period 2*pi/omega of the single harmonic term, in us.
  double period_us() const;
};

enum class Frame { kLab, kDriveRotating };

/// Diagonal three-mode model: mode frequencies, self-Kerrs, dispersive shifts
/// and the static cross-Kerr. In the rotating frame the coupler diagonal is
/// shifted by -omega_d. Supplying a drive applies the AC-Stark
/// renormalizations of the mode frequencies.
Operator build_dispersive_hamiltonian(
    const DeviceParams& params, const ModeSystem& system,
    Frame frame = Frame::kLab, double omega_d_MHz = 0.0,
    const std::optional<DriveSpec>& drive = std::nullopt);

/// Driven exchange model: 2*pi*g1 (e^{i 2*pi*delta t} a^dag b |g><e| + h.c.).
DrivenHamiltonian build_exchange_hamiltonian(
    const ModeSystem& system, double g1_MHz, double delta_MHz,
    std::function<double(double)> envelope = nullptr);

/// Same model in the frame rotating at the drive detuning, where it is
/// time-independent: -2*pi*delta |e><e| + 2*pi*g1 (a^dag b |g><e| + h.c.).
/// Fock-diagonal observables are identical in both frames.
DrivenHamiltonian build_exchange_hamiltonian_rotating(
    const ModeSystem& system, double g1_MHz, double delta_MHz,
    std::function<double(double)> envelope = nullptr);

/// Engineered cross-Kerr: 2*pi*g_ab n_a n_b (|g><g| when the system has a
/// coupler mode "c").
Operator build_effective_crosskerr(const ModeSystem& system, double g_ab_MHz);

/// Full SQUID cosine model with capacitive couplings and an optional charge
/// drive epsilon cos(omega_d t) (c + c^dag).
DrivenHamiltonian build_full_squid_hamiltonian(
    const DeviceParams& params, const ModeSystem& system,
    const std::optional<DriveSpec>& drive = std::nullopt);

/// Fourth-order expansion of the SQUID cosine, kept for closed-form
/// cross-checks of the full model.
DrivenHamiltonian build_quartic_squid_hamiltonian(
    const DeviceParams& params, const ModeSystem& system,
    const std::optional<DriveSpec>& drive = std::nullopt);

/// Exchange-resonance drive frequency with the Fock-dependent shift:
/// omega_c + omega_b - omega_a - n_b*chi_b + delta (MHz).
double drive_frequency(const DeviceParams& params, double delta_MHz,
                       int control_photons = 1);

/// Raman cross-Kerr of the three-wave-mixing (SNAIL) variant: g3*g5/delta.
double snail_effective_crosskerr(double g3_MHz, double g5_MHz,
                                 double delta_MHz);

/// Standard three-mode system (labels "a", "b", "c").
ModeSystem three_mode_system(int dim_a, int dim_b, int dim_c);
/// Two-cavity system (labels "a", "b").
ModeSystem two_mode_system(int dim_a, int dim_b);

}  // namespace crosskerr
