#include "crosskerr/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace crosskerr {

LindbladModel LindbladModel::closed(const Operator& h) {
  DrivenHamiltonian dh;
  dh.system = h.system();
  dh.h0 = h.matrix();
  return {std::move(dh), {}};
}

namespace {

class LindbladRhs {
 public:
  explicit LindbladRhs(const LindbladModel& model) : model_(model) {
    for (const auto& [op, rate] : model.collapse_ops) {
      if (rate < 0) {
        throw std::invalid_argument("LindbladModel: negative collapse rate");
      }
      if (rate == 0.0) continue;
      scaled_l_.push_back(std::sqrt(rate) * op.matrix());
      ldl_.push_back(scaled_l_.back().adjoint() * scaled_l_.back());
    }
    constant_ = model.hamiltonian.is_constant();
    if (constant_) h_ = model.hamiltonian.h0;
  }

  void operator()(double t, const Matrix& rho, Matrix& drho) const {
    const Matrix& h = constant_ ? h_ : (h_scratch_ = model_.hamiltonian.at(t));
    drho.noalias() = Complex(0, -1) * (h * rho - rho * h);
    for (std::size_t k = 0; k < scaled_l_.size(); ++k) {
      drho.noalias() += scaled_l_[k] * rho * scaled_l_[k].adjoint();
      drho.noalias() -= 0.5 * (ldl_[k] * rho + rho * ldl_[k]);
    }
  }

 private:
  const LindbladModel& model_;
  std::vector<Matrix> scaled_l_;
  std::vector<Matrix> ldl_;
  bool constant_ = false;
  Matrix h_;
  mutable Matrix h_scratch_;
};

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695,
                           393.0 / 640,       -92097.0 / 339200,
                           187.0 / 2100,      1.0 / 40};

}  // namespace

Trajectory evolve_lindblad(
    const LindbladModel& model, const DensityMatrix& rho0,
    const std::vector<double>& times_us,
    const std::vector<std::pair<std::string, Operator>>& observables,
    const EvolveOptions& options) {
  if (times_us.size() < 1) {
    throw std::invalid_argument("evolve_lindblad: empty time list");
  }
  for (std::size_t i = 0; i + 1 < times_us.size(); ++i) {
    if (times_us[i + 1] <= times_us[i]) {
      throw std::invalid_argument("evolve_lindblad: times not increasing");
    }
  }

  const LindbladRhs rhs(model);
  Trajectory traj;
  traj.times_us = times_us;
  for (const auto& [name, op] : observables) {
    traj.expectations[name].reserve(times_us.size());
  }

  auto record = [&](const Matrix& rho) {
    DensityMatrix state(rho0.system(), rho);
    for (const auto& [name, op] : observables) {
      traj.expectations[name].push_back(std::real(state.expectation(op)));
    }
    if (options.store_states) traj.states.push_back(std::move(state));
  };

  Matrix y = rho0.matrix();
  double t = times_us.front();
  record(y);

  std::array<Matrix, 7> k;
  Matrix ytmp, y5, y4;
  double h_nat = 0.0;  // controller step, independent of sample clamping
  bool have_k0 = false;
  std::size_t steps = 0;

  for (std::size_t target = 1; target < times_us.size(); ++target) {
    const double t_end = times_us[target];
    while (t < t_end) {
      if (h_nat <= 0.0) h_nat = std::min(1e-3, t_end - t);
      const double h = std::min(h_nat, t_end - t);
      if (t + h == t) throw StepSizeUnderflow(t);
      if (++steps > options.max_steps) {
        throw std::runtime_error("evolve_lindblad: max step count exceeded");
      }

      if (!have_k0) {
        rhs(t, y, k[0]);
        have_k0 = true;
      }
      for (int s = 1; s < 7; ++s) {
        ytmp = y;
        for (int j = 0; j < s; ++j) {
          if (kA[s][j] != 0.0) ytmp.noalias() += (h * kA[s][j]) * k[j];
        }
        rhs(t + kC[s] * h, ytmp, k[s]);
      }
      y5 = y;
      y4 = y;
      for (int s = 0; s < 7; ++s) {
        if (kB5[s] != 0.0) y5.noalias() += (h * kB5[s]) * k[s];
        if (kB4[s] != 0.0) y4.noalias() += (h * kB4[s]) * k[s];
      }

      double err = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale =
            options.atol +
            options.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
        const double e = std::abs(y5(i) - y4(i)) / scale;
        err += e * e;
      }
      err = std::sqrt(err / double(y.size()));

      const double factor =
          std::clamp(0.9 * std::pow(1.0 / std::max(err, 1e-12), 0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t += h;
        y.swap(y5);
        k[0] = k[6];  // first-same-as-last
        if (h == h_nat || factor < 1.0) h_nat = h * factor;
      } else {
        h_nat = h * factor;
        if (h_nat < 1e-14 * std::max(1.0, std::abs(t))) {
          throw StepSizeUnderflow(t);
        }
      }
    }
    record(y);
  }
  return traj;
}

DensityMatrix evolve_lindblad_final(const LindbladModel& model,
                                    const DensityMatrix& rho0, double t_us,
                                    const EvolveOptions& options) {
  EvolveOptions opts = options;
  opts.store_states = true;
  const Trajectory traj =
      evolve_lindblad(model, rho0, {0.0, t_us}, {}, opts);
  return traj.states.back();
}

Operator period_propagator(const DrivenHamiltonian& h, double period_us,
                           int substeps) {
  if (period_us <= 0 || substeps < 1) {
    throw std::invalid_argument("period_propagator: bad period or substeps");
  }
  const int n = h.h0.rows();
  Matrix u = Matrix::Identity(n, n);
  const double dt = period_us / substeps;
  const double root3 = std::sqrt(3.0);
  const double c1 = 0.5 - root3 / 6.0, c2 = 0.5 + root3 / 6.0;
  const double a1 = (3.0 - 2.0 * root3) / 12.0;
  const double a2 = (3.0 + 2.0 * root3) / 12.0;
  for (int s = 0; s < substeps; ++s) {
    const double t0 = s * dt;
    const Matrix h1 = h.at(t0 + c1 * dt);
    const Matrix h2 = h.at(t0 + c2 * dt);
    const Matrix e1 = expm_unitary(a1 * h1 + a2 * h2, dt);
    const Matrix e2 = expm_unitary(a2 * h1 + a1 * h2, dt);
    u = (e1 * e2 * u).eval();
  }
  return Operator(h.system, u);
}

Operator period_propagator_adaptive(const DrivenHamiltonian& h,
                                    double period_us, double tol,
                                    int initial_substeps, int max_substeps) {
  Operator prev = period_propagator(h, period_us, initial_substeps);
  for (int n = 2 * initial_substeps; n <= max_substeps; n *= 2) {
    Operator next = period_propagator(h, period_us, n);
    const double move =
        (next.matrix() - prev.matrix()).cwiseAbs().maxCoeff();
    if (move < tol) return next;
    prev = std::move(next);
  }
  throw std::runtime_error(
      "period_propagator_adaptive: substep refinement did not converge");
}

std::vector<std::pair<Operator, double>> collapse_set(
    const DeviceParams& params, const ModeSystem& system, bool driven) {
  std::vector<std::pair<Operator, double>> out;
  for (const auto& mode : system.modes()) {
    const CoherencePair& c = params.coherence(mode.label, driven);
    if (std::isfinite(c.t1_us)) {
      if (c.t1_us <= 0) {
        throw std::invalid_argument("collapse_set: T1 must be > 0 for '" +
                                    mode.label + "'");
      }
      out.emplace_back(annihilation(system, mode.label), 1.0 / c.t1_us);
    }
    if (std::isfinite(c.tphi_us)) {
      if (c.tphi_us <= 0) {
        throw std::invalid_argument("collapse_set: Tphi must be > 0 for '" +
                                    mode.label + "'");
      }
      // Rate 1/Tphi on a^dag a: the 0-1 coherence dephases as e^{-t/(2 Tphi)}.
      // This reading of the quoted driven Tphi values reproduces the
      // measured per-gate infidelity band.
      out.emplace_back(number(system, mode.label), 1.0 / c.tphi_us);
    }
  }
  return out;
}

}  // namespace crosskerr
