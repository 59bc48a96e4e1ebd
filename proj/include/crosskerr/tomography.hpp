#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crosskerr/hilbert.hpp"

namespace crosskerr {

/// Product grid of per-mode displacements with a fixed photon-number
/// projector per mode; the raw observable set of the excitation-sampling
/// reconstruction.
struct DisplacementPlan {
  int dim_a = 2;  ///< reconstruction dimension of mode a
  int dim_b = 2;
  int photon_a = 1;  ///< measured Fock projector |n><n| per mode
  int photon_b = 1;
  std::vector<Complex> alphas_a;
  std::vector<Complex> alphas_b;

  std::size_t size() const { return alphas_a.size() * alphas_b.size(); }
  int joint_dim() const { return dim_a * dim_b; }
  std::pair<Complex, Complex> pair(std::size_t i) const;
  ModeSystem reconstruction_system() const;
};

/// Linear map from the D^2 real state parameters to the plan's outcome
/// probabilities.
struct MeasurementMatrix {
  Eigen::MatrixXd map;  ///< size() x joint_dim()^2
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  bool full_rank(double tol = 1e-9) const {
    return sigma_min > tol * std::max(1.0, sigma_max);
  }
};

/// Real parameterization of a Hermitian matrix: diagonal first, then
/// (re, im) of the upper triangle row by row.
Eigen::VectorXd hermitian_to_params(const Matrix& m);
Matrix params_to_hermitian(const Eigen::VectorXd& y, int dim);

/// Displaced Fock projector D(alpha)|n><n|D(alpha)^dag truncated to the
/// reconstruction dimension (computed in an enlarged space).
Matrix displaced_projector(int dim, Complex alpha, int n);

MeasurementMatrix build_measurement_matrix(const DisplacementPlan& plan);

/// Iterative ascent of sigma_min(M) over the per-mode displacement sets.
/// `count` is the total number of product pairs and must be a perfect
/// square with sqrt(count)^2 >= dim^2 observables per mode pair.
DisplacementPlan optimize_displacements(int dim_per_mode, int count,
                                        std::uint64_t seed);

/// Probability of the joint photon-number outcome after the product
/// displacement.
double measurement_probability(const DensityMatrix& rho,
                               std::pair<Complex, Complex> alpha_pair,
                               std::pair<int, int> n_pair);

/// Joint two-outcome-per-mode distribution (gg, ge, eg, ee) where "e" means
/// the mode's selective probe fired (the mode held exactly n photons).
Eigen::Vector4d measurement_outcome_distribution(
    const DensityMatrix& rho, std::pair<Complex, Complex> alpha_pair,
    std::pair<int, int> n_pair);

/// Least-squares inversion of the plan probabilities; the result is a
/// faithful data image and may be unphysical.
DensityMatrix linear_inversion(const std::vector<double>& probabilities,
                               const DisplacementPlan& plan);

struct PosteriorSummary {
  int retained = 0;
  int thinning = 0;
  double acceptance_rate = 0.0;
  double step_size = 0.0;
  DensityMatrix rho_bme;
  DensityMatrix rho_ls;
};

/// Preconditioned Crank-Nicolson Metropolis-Hastings over physical density
/// matrices rho(theta) = G G^dag / tr with the pseudo-likelihood
/// exp(-N/2 ||rho - rho_LS||_F^2). Returns the Bayesian mean estimator.
PosteriorSummary bayesian_refine(const DensityMatrix& rho_ls,
                                 double total_events, int retained = 1 << 10,
                                 int thinning = 1 << 7,
                                 std::uint64_t seed = 0);

enum class ConfusionDirection { kForward, kInverse };

/// Applies a readout confusion matrix (rows: true outcome, columns: measured
/// outcome, rows summing to 1) to an outcome distribution.
std::vector<double> apply_confusion(const std::vector<double>& probabilities,
                                    const Eigen::Matrix2d& confusion,
                                    ConfusionDirection direction);

/// Product-confusion version for the joint (gg, ge, eg, ee) distribution.
Eigen::Vector4d apply_confusion_joint(const Eigen::Vector4d& probabilities,
                                      const Eigen::Matrix2d& confusion_a,
                                      const Eigen::Matrix2d& confusion_b,
                                      ConfusionDirection direction);

/// Measured auxiliary-transmon confusion matrices.
Eigen::Matrix2d alice_confusion();
Eigen::Matrix2d bob_confusion();

/// Simulated finite-statistics acquisition: multinomial sampling of the
/// confused outcome distribution per plan point, followed by the inverse
/// confusion correction. Returns corrected joint-excitation probabilities
/// aligned with the plan.
std::vector<double> simulate_measurement(
    const DensityMatrix& rho, const DisplacementPlan& plan, long shots,
    const std::optional<std::pair<Eigen::Matrix2d, Eigen::Matrix2d>>&
        confusions,
    std::uint64_t seed);

/// Exact probabilities (infinite statistics), no readout errors.
std::vector<double> exact_probabilities(const DensityMatrix& rho,
                                        const DisplacementPlan& plan);

}  // namespace crosskerr
