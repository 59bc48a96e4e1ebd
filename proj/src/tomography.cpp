#include "crosskerr/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "crosskerr/random.hpp"

namespace crosskerr {

std::pair<Complex, Complex> DisplacementPlan::pair(std::size_t i) const {
  const std::size_t nb = alphas_b.size();
  return {alphas_a[i / nb], alphas_b[i % nb]};
}

ModeSystem DisplacementPlan::reconstruction_system() const {
  return ModeSystem({{"a", dim_a}, {"b", dim_b}});
}

Eigen::VectorXd hermitian_to_params(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd y(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) y(idx++) = m(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      y(idx++) = m(i, j).real();
      y(idx++) = m(i, j).imag();
    }
  }
  return y;
}

Matrix params_to_hermitian(const Eigen::VectorXd& y, int dim) {
  if (y.size() != dim * dim) {
    throw std::invalid_argument("params_to_hermitian: size mismatch");
  }
  Matrix m = Matrix::Zero(dim, dim);
  int idx = 0;
  for (int i = 0; i < dim; ++i) m(i, i) = y(idx++);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = y(idx++);
      const double im = y(idx++);
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return m;
}

Matrix displaced_projector(int dim, Complex alpha, int n) {
  const int ext = std::max({dim + 8, int(std::ceil(4.0 * std::norm(alpha))) + 10,
                            n + 6});
  ModeSystem sys({{"m", ext}});
  const Matrix d = displacement(sys, "m", alpha).matrix();
  const Vector column = d.col(n);  // D(alpha)|n>
  const Matrix proj = column * column.adjoint();
  return proj.topLeftCorner(dim, dim);
}

namespace {

// Per-point joint projector cache for a plan.
std::vector<Matrix> joint_projectors(const DisplacementPlan& plan) {
  std::vector<Matrix> pa, pb;
  pa.reserve(plan.alphas_a.size());
  pb.reserve(plan.alphas_b.size());
  for (const Complex a : plan.alphas_a) {
    pa.push_back(displaced_projector(plan.dim_a, a, plan.photon_a));
  }
  for (const Complex b : plan.alphas_b) {
    pb.push_back(displaced_projector(plan.dim_b, b, plan.photon_b));
  }
  std::vector<Matrix> joint;
  joint.reserve(plan.size());
  for (const auto& a : pa) {
    for (const auto& b : pb) {
      Matrix k(plan.joint_dim(), plan.joint_dim());
      for (int i = 0; i < plan.dim_a; ++i) {
        for (int j = 0; j < plan.dim_a; ++j) {
          k.block(i * plan.dim_b, j * plan.dim_b, plan.dim_b, plan.dim_b) =
              a(i, j) * b;
        }
      }
      joint.push_back(std::move(k));
    }
  }
  return joint;
}

}  // namespace

MeasurementMatrix build_measurement_matrix(const DisplacementPlan& plan) {
  const int d = plan.joint_dim();
  const auto projectors = joint_projectors(plan);
  MeasurementMatrix out;
  out.map.resize(projectors.size(), d * d);
  for (std::size_t r = 0; r < projectors.size(); ++r) {
    // tr(P B_p) for each parameter basis matrix B_p.
    const Matrix& p = projectors[r];
    int idx = 0;
    for (int i = 0; i < d; ++i) out.map(r, idx++) = p(i, i).real();
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        out.map(r, idx++) = 2.0 * p(j, i).real();
        out.map(r, idx++) = -2.0 * p(j, i).imag();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.map);
  out.sigma_min = svd.singularValues().minCoeff();
  out.sigma_max = svd.singularValues().maxCoeff();
  return out;
}

namespace {

// Two-ring-plus-origin pattern; a well-conditioned deterministic start.
std::vector<Complex> ring_set(int per_mode, double r1, double r2) {
  std::vector<Complex> v;
  v.push_back(0.0);
  const int n1 = (per_mode - 1) / 2;
  const int n2 = per_mode - 1 - n1;
  for (int k = 0; k < n1; ++k) {
    v.push_back(r1 * std::exp(Complex(0, 2 * M_PI * k / n1 + 0.3)));
  }
  for (int k = 0; k < n2; ++k) {
    v.push_back(r2 * std::exp(Complex(0, 2 * M_PI * k / n2)));
  }
  return v;
}

DisplacementPlan ascend_plan(int dim_per_mode, int per_mode, int photon,
                             int budget, bool ring_start, std::mt19937_64& rng,
                             double* score) {
  DisplacementPlan plan;
  plan.dim_a = plan.dim_b = dim_per_mode;
  plan.photon_a = plan.photon_b = photon;
  auto random_set = [&] {
    std::vector<Complex> set(per_mode);
    for (auto& a : set) {
      a = 0.8 * Complex(normal_draw(rng), normal_draw(rng));
    }
    return set;
  };
  if (ring_start) {
    plan.alphas_a = ring_set(per_mode, 0.7, 1.2);
    plan.alphas_b = ring_set(per_mode, 0.7, 1.2);
  } else {
    plan.alphas_a = random_set();
    plan.alphas_b = random_set();
  }

  auto objective = [&](const DisplacementPlan& p) {
    return build_measurement_matrix(p).sigma_min;
  };

  double best = objective(plan);
  double step = 0.2;
  for (int it = 0; it < budget && step > 1e-3; ++it) {
    // Coordinate-wise finite-difference ascent on the per-mode points.
    DisplacementPlan trial = plan;
    bool improved = false;
    for (int mode = 0; mode < 2; ++mode) {
      auto& set = mode == 0 ? trial.alphas_a : trial.alphas_b;
      for (auto& alpha : set) {
        for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
          const Complex saved = alpha;
          alpha = saved + step * dir;
          double up = objective(trial);
          if (up > best) {
            best = up;
            improved = true;
            continue;
          }
          alpha = saved - step * dir;
          up = objective(trial);
          if (up > best) {
            best = up;
            improved = true;
            continue;
          }
          alpha = saved;
        }
      }
    }
    plan = trial;
    if (!improved) step *= 0.5;
  }
  *score = best;
  return plan;
}

}  // namespace

DisplacementPlan optimize_displacements(int dim_per_mode, int count,
                                        std::uint64_t seed) {
  const int per_mode = static_cast<int>(std::lround(std::sqrt(double(count))));
  if (per_mode * per_mode != count) {
    throw std::invalid_argument(
        "optimize_displacements: count must be a perfect square (product "
        "grid of per-mode sets)");
  }
  const int d2 = dim_per_mode * dim_per_mode;
  if (count < d2 * d2) {
    throw std::invalid_argument(
        "optimize_displacements: plan smaller than the observable minimum");
  }

  // The probed photon number is part of the plan; pick it by the same
  // conditioning objective (n = 1 and n = dim-1 are the useful candidates).
  // Starts: a structured ring pattern plus one seeded random draw.
  std::mt19937_64 rng(seed);
  const int budget = dim_per_mode <= 2 ? 120 : 100;
  double best_score = -1.0;
  DisplacementPlan best_plan;
  for (const int photon : {1, dim_per_mode - 1}) {
    for (const bool ring : {true, false}) {
      double score = 0.0;
      DisplacementPlan plan = ascend_plan(dim_per_mode, per_mode, photon,
                                          budget, ring, rng, &score);
      if (score > best_score) {
        best_score = score;
        best_plan = std::move(plan);
      }
    }
    if (dim_per_mode - 1 == 1) break;
  }

  const MeasurementMatrix m = build_measurement_matrix(best_plan);
  if (!m.full_rank()) {
    throw std::runtime_error(
        "optimize_displacements: rank-deficient plan after optimization "
        "budget (sigma_min = " +
        std::to_string(m.sigma_min) + ")");
  }
  return best_plan;
}

double measurement_probability(const DensityMatrix& rho,
                               std::pair<Complex, Complex> alpha_pair,
                               std::pair<int, int> n_pair) {
  const ModeSystem& sys = rho.system();
  if (sys.num_modes() != 2) {
    throw std::invalid_argument(
        "measurement_probability: two-mode state expected");
  }
  const Matrix pa =
      displaced_projector(sys.mode(0).dim, alpha_pair.first, n_pair.first);
  const Matrix pb =
      displaced_projector(sys.mode(1).dim, alpha_pair.second, n_pair.second);
  const Operator joint =
      embed(sys, sys.mode(0).label, pa) * embed(sys, sys.mode(1).label, pb);
  return std::clamp(std::real(rho.expectation(joint)), 0.0, 1.0);
}

Eigen::Vector4d measurement_outcome_distribution(
    const DensityMatrix& rho, std::pair<Complex, Complex> alpha_pair,
    std::pair<int, int> n_pair) {
  const ModeSystem& sys = rho.system();
  const Matrix pa =
      displaced_projector(sys.mode(0).dim, alpha_pair.first, n_pair.first);
  const Matrix pb =
      displaced_projector(sys.mode(1).dim, alpha_pair.second, n_pair.second);
  const Operator oa = embed(sys, sys.mode(0).label, pa);
  const Operator ob = embed(sys, sys.mode(1).label, pb);
  const double p_a = std::real(rho.expectation(oa));
  const double p_b = std::real(rho.expectation(ob));
  const double p_ab = std::real(rho.expectation(oa * ob));
  Eigen::Vector4d out;  // (gg, ge, eg, ee)
  out(3) = p_ab;
  out(2) = p_a - p_ab;
  out(1) = p_b - p_ab;
  out(0) = 1.0 - p_a - p_b + p_ab;
  return out;
}

DensityMatrix linear_inversion(const std::vector<double>& probabilities,
                               const DisplacementPlan& plan) {
  if (probabilities.size() != plan.size()) {
    throw std::invalid_argument(
        "linear_inversion: counts not aligned with the plan");
  }
  const MeasurementMatrix m = build_measurement_matrix(plan);
  if (!m.full_rank()) {
    throw std::runtime_error("linear_inversion: rank-deficient plan");
  }
  Eigen::VectorXd x(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    x(i) = probabilities[i];
  }
  const Eigen::VectorXd y =
      m.map.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(x);
  return DensityMatrix(plan.reconstruction_system(),
                       params_to_hermitian(y, plan.joint_dim()));
}

namespace {

Matrix theta_to_state(const Eigen::VectorXd& theta, int dim) {
  Matrix g(dim, dim);
  int idx = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(theta(idx), theta(idx + 1));
      idx += 2;
    }
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace

PosteriorSummary bayesian_refine(const DensityMatrix& rho_ls,
                                 double total_events, int retained,
                                 int thinning, std::uint64_t seed) {
  if (total_events <= 0) {
    throw std::invalid_argument("bayesian_refine: total_events must be > 0");
  }
  const int dim = rho_ls.dim();
  const int nparam = 2 * dim * dim;
  std::mt19937_64 rng(seed);

  auto loglike = [&](const Matrix& rho) {
    return -0.5 * total_events * (rho - rho_ls.matrix()).squaredNorm();
  };

  // Start the walk at the physical projection of rho_LS; a cold random start
  // cannot reach a sharp likelihood within the burn-in budget.
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      0.5 * (rho_ls.matrix() + rho_ls.matrix().adjoint()));
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(1e-6);
  vals /= vals.sum();
  const Matrix g0 = es.eigenvectors() *
                    vals.cwiseSqrt().asDiagonal().toDenseMatrix().cast<Complex>();
  Eigen::VectorXd theta(nparam);
  {
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        theta(idx++) = g0(i, j).real();
        theta(idx++) = g0(i, j).imag();
      }
    }
  }
  Matrix rho = theta_to_state(theta, dim);
  double ll = loglike(rho);

  // Posterior width in theta scales like 1/sqrt(N); start the walk there
  // and let the burn-in adaptation refine toward 25% acceptance.
  double beta = std::clamp(3.0 / std::sqrt(total_events), 1e-5, 0.3);
  Eigen::VectorXd proposal(nparam);

  auto pcn_step = [&] {
    const double keep = std::sqrt(1.0 - beta * beta);
    for (int i = 0; i < nparam; ++i) {
      proposal(i) = keep * theta(i) + beta * normal_draw(rng);
    }
    const Matrix rho_new = theta_to_state(proposal, dim);
    const double ll_new = loglike(rho_new);
    if (std::log(uniform_draw(rng)) < ll_new - ll) {
      theta.swap(proposal);
      rho = rho_new;
      ll = ll_new;
      return true;
    }
    return false;
  };

  // Burn-in with step-size adaptation toward 25% acceptance.
  const int burn = 10 * thinning;
  int window_acc = 0, window_n = 0;
  for (int i = 0; i < burn; ++i) {
    window_acc += pcn_step() ? 1 : 0;
    if (++window_n == 32) {
      const double rate = double(window_acc) / window_n;
      double factor = std::exp(0.8 * (rate - 0.25));
      if (rate < 0.05) factor = 0.4;
      beta = std::clamp(beta * factor, 1e-5, 0.999);
      window_acc = window_n = 0;
    }
  }

  Matrix mean = Matrix::Zero(dim, dim);
  long accepted = 0;
  const long proposals = static_cast<long>(retained) * thinning;
  int kept = 0;
  for (long i = 0; i < proposals; ++i) {
    accepted += pcn_step() ? 1 : 0;
    if ((i + 1) % thinning == 0) {
      mean += rho;
      ++kept;
    }
  }
  mean /= double(kept);

  PosteriorSummary out;
  out.retained = kept;
  out.thinning = thinning;
  out.acceptance_rate = double(accepted) / double(proposals);
  out.step_size = beta;
  out.rho_ls = rho_ls;
  out.rho_bme = DensityMatrix(rho_ls.system(), mean);
  // High acceptance at the maximal step is healthy: a flat likelihood makes
  // the walk an independent prior sampler. Anything else outside the band
  // means the adaptation failed.
  const bool prior_limited = beta > 0.99 && out.acceptance_rate > 0.9;
  if (!prior_limited &&
      (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.9)) {
    throw std::runtime_error(
        "bayesian_refine: acceptance rate " +
        std::to_string(out.acceptance_rate) +
        " outside [0.05, 0.9] after adaptation");
  }
  return out;
}

std::vector<double> apply_confusion(const std::vector<double>& probabilities,
                                    const Eigen::Matrix2d& confusion,
                                    ConfusionDirection direction) {
  if (probabilities.size() != 2) {
    throw std::invalid_argument("apply_confusion: two-outcome vector expected");
  }
  for (int r = 0; r < 2; ++r) {
    if (std::abs(confusion.row(r).sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("apply_confusion: rows must sum to 1");
    }
  }
  Eigen::Vector2d p(probabilities[0], probabilities[1]);
  Eigen::Vector2d q;
  if (direction == ConfusionDirection::kForward) {
    q = confusion.transpose() * p;
  } else {
    if (std::abs(confusion.determinant()) < 1e-12) {
      throw std::invalid_argument("apply_confusion: singular confusion matrix");
    }
    q = confusion.transpose().inverse() * p;
  }
  return {q(0), q(1)};
}

Eigen::Vector4d apply_confusion_joint(const Eigen::Vector4d& probabilities,
                                      const Eigen::Matrix2d& confusion_a,
                                      const Eigen::Matrix2d& confusion_b,
                                      ConfusionDirection direction) {
  Eigen::Matrix4d joint;
  for (int ta = 0; ta < 2; ++ta) {
    for (int tb = 0; tb < 2; ++tb) {
      for (int ma = 0; ma < 2; ++ma) {
        for (int mb = 0; mb < 2; ++mb) {
          joint(ta * 2 + tb, ma * 2 + mb) =
              confusion_a(ta, ma) * confusion_b(tb, mb);
        }
      }
    }
  }
  if (direction == ConfusionDirection::kForward) {
    return joint.transpose() * probabilities;
  }
  if (std::abs(joint.determinant()) < 1e-12) {
    throw std::invalid_argument(
        "apply_confusion_joint: singular confusion matrix");
  }
  return joint.transpose().inverse() * probabilities;
}

Eigen::Matrix2d alice_confusion() {
  Eigen::Matrix2d m;
  m << 0.975, 0.025, 0.028, 0.972;
  return m;
}

Eigen::Matrix2d bob_confusion() {
  Eigen::Matrix2d m;
  m << 0.959, 0.041, 0.064, 0.936;
  return m;
}

std::vector<double> simulate_measurement(
    const DensityMatrix& rho, const DisplacementPlan& plan, long shots,
    const std::optional<std::pair<Eigen::Matrix2d, Eigen::Matrix2d>>&
        confusions,
    std::uint64_t seed) {
  if (shots <= 0) {
    throw std::invalid_argument("simulate_measurement: shots must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> corrected;
  corrected.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Eigen::Vector4d p = measurement_outcome_distribution(
        rho, plan.pair(i), {plan.photon_a, plan.photon_b});
    p = p.cwiseMax(0.0);
    p /= p.sum();
    if (confusions) {
      p = apply_confusion_joint(p, confusions->first, confusions->second,
                                ConfusionDirection::kForward);
    }
    // Multinomial draw over the four outcomes.
    Eigen::Vector4d counts = Eigen::Vector4d::Zero();
    for (long s = 0; s < shots; ++s) {
      const double u = uniform_draw(rng);
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        acc += p(k);
        if (u <= acc || k == 3) {
          counts(k) += 1.0;
          break;
        }
      }
    }
    Eigen::Vector4d freq = counts / double(shots);
    if (confusions) {
      freq = apply_confusion_joint(freq, confusions->first, confusions->second,
                                   ConfusionDirection::kInverse);
    }
    corrected.push_back(freq(3));
  }
  return corrected;
}

std::vector<double> exact_probabilities(const DensityMatrix& rho,
                                        const DisplacementPlan& plan) {
  std::vector<double> out;
  out.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.push_back(measurement_probability(rho, plan.pair(i),
                                          {plan.photon_a, plan.photon_b}));
  }
  return out;
}

}  // namespace crosskerr
