#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosskerr/hilbert.hpp"
#include "crosskerr/models.hpp"

namespace crosskerr {

/// Lindblad master-equation model: a (possibly time-dependent) Hamiltonian
/// plus weighted collapse operators.
struct LindbladModel {
  DrivenHamiltonian hamiltonian;
  std::vector<std::pair<Operator, double>> collapse_ops;  ///< (L, rate 1/us)

  static LindbladModel closed(DrivenHamiltonian h) { return {std::move(h), {}}; }
  static LindbladModel closed(const Operator& h);
};

struct Trajectory {
  std::vector<double> times_us;
  std::map<std::string, std::vector<double>> expectations;
  std::vector<DensityMatrix> states;  ///< filled when store_states is set
};

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  bool store_states = false;
  std::size_t max_steps = 50'000'000;
};

/// Thrown when the adaptive integrator stalls; carries the failing time.
struct StepSizeUnderflow : std::runtime_error {
  explicit StepSizeUnderflow(double t)
      : std::runtime_error("evolve_lindblad: step size underflow at t = " +
                           std::to_string(t) + " us"),
        t_fail_us(t) {}
  double t_fail_us;
};

/// Solves d rho/dt = -i[H(t), rho] + sum_k rate_k D[L_k] rho on the given
/// sample times (strictly increasing, first entry is the initial time) with
/// an adaptive embedded Runge-Kutta pair. Observables are evaluated at every
/// sample time; expectation names map to Hermitian operators.
Trajectory evolve_lindblad(
    const LindbladModel& model, const DensityMatrix& rho0,
    const std::vector<double>& times_us,
    const std::vector<std::pair<std::string, Operator>>& observables = {},
    const EvolveOptions& options = {});

/// Final state only.
DensityMatrix evolve_lindblad_final(const LindbladModel& model,
                                    const DensityMatrix& rho0, double t_us,
                                    const EvolveOptions& options = {});

/// Time-ordered propagator over one period of a periodic Hamiltonian,
/// fourth-order commutator-free scheme with `substeps` uniform steps.
Operator period_propagator(const DrivenHamiltonian& h, double period_us,
                           int substeps);

/// Doubles the substep count until the propagator moves by less than `tol`
/// (max-norm); throws std::runtime_error when not converged by max_substeps.
Operator period_propagator_adaptive(const DrivenHamiltonian& h,
                                    double period_us, double tol = 1e-9,
                                    int initial_substeps = 16,
                                    int max_substeps = 1 << 14);

/// Amplitude damping (rate 1/T1 on a) and pure dephasing (rate 1/Tphi on
/// a^dag a, so the 0-1 coherence dephases as exp(-t/(2 Tphi))) for every
/// mode of `system` that has a coherence entry in `params`.
std::vector<std::pair<Operator, double>> collapse_set(
    const DeviceParams& params, const ModeSystem& system, bool driven);

// -- Damped-cosine fit ---------------------------------------------------------

/// P(t) = A exp(-kappa1 t) (1 + exp(-kappa_phi t) cos(2*pi*(2 g1) t + phi0)) + B
struct DampedCosineFit {
  double amplitude = 0.0;       ///< A
  double offset = 0.0;          ///< B
  double kappa1_per_us = 0.0;   ///< subspace leakage rate
  double kappa_phi_per_us = 0.0;///< subspace dephasing rate
  double g1_MHz = 0.0;          ///< half the population oscillation frequency
  double phi0_rad = 0.0;
  Eigen::MatrixXd covariance;   ///< 6x6, parameter order as above
  double residual_rms = 0.0;
  int iterations = 0;

  double evaluate(double t_us) const;
};

/// Nonlinear least squares (Levenberg-Marquardt) fit of the damped-cosine
/// exchange model. Needs >= 8 samples spanning at least one oscillation.
DampedCosineFit fit_damped_cosine(const std::vector<double>& times_us,
                                  const std::vector<double>& values);

}  // namespace crosskerr
