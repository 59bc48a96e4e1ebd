#include "crosskerr/floquet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace crosskerr {

namespace {

// I_k(x) = integral_0^1 u^k e^{i x u} du, stable for all real x.
std::array<Complex, 5> phasor_moments(double x) {
  std::array<Complex, 5> out{};
  if (std::abs(x) < 0.5) {
    // Taylor in ix: I_k = sum_j (ix)^j / (j! (k+j+1))
    for (int k = 0; k <= 4; ++k) {
      Complex term(1.0, 0.0);
      Complex acc = term / double(k + 1);
      for (int j = 1; j <= 22; ++j) {
        term *= Complex(0, x) / double(j);
        acc += term / double(k + j + 1);
      }
      out[k] = acc;
    }
    return out;
  }
  const Complex ix(0, x);
  const Complex eix = std::exp(ix);
  out[0] = (eix - 1.0) / ix;
  for (int k = 1; k <= 4; ++k) {
    out[k] = (eix - double(k) * out[k - 1]) / ix;
  }
  return out;
}

// I_0(x) = (e^{ix} - 1)/(i x) alone, cheap path.
Complex phasor_moment0(double x) {
  if (std::abs(x) < 1e-4) {
    return Complex(1.0 - x * x / 6.0, x * 0.5 - x * x * x / 24.0);
  }
  const Complex ix(0, x);
  return (std::exp(ix) - 1.0) / ix;
}

// E(mu) = integral_{t0}^{t0+h} e^{i mu t} dt
Complex window_integral(double mu, double t0, double h) {
  return std::exp(Complex(0, mu * t0)) * h * phasor_moment0(mu * h);
}

// G0(p, q) = int_{t0}^{t0+h} dt1 e^{i p t1} int_{t0}^{t1} dt2 e^{i q t2},
// series branch for small |q h|:
// G0 = e^{i(p+q)t0} sum_{k>=1} (iq)^{k-1} h^{k+1} I_k(p h) / k!
Complex nested_integral_series(double p, double q, double t0, double h) {
  const auto ip = phasor_moments(p * h);
  const Complex iq(0, q);
  const Complex phase = std::exp(Complex(0, (p + q) * t0));
  Complex acc(0, 0);
  double hk = h * h;
  double fact = 1.0;
  Complex iqj(1.0, 0.0);
  for (int k = 1; k <= 4; ++k) {
    fact *= double(k);
    acc += iqj * (hk / fact) * ip[k];
    iqj *= iq;
    hk *= h;
  }
  return phase * acc;
}

}  // namespace

double fold_into_zone(double x, double zone) {
  if (zone == 0.0) return x;
  return x - zone * std::round(x / zone);
}

int FloquetSpectrum::find(const FloquetLabel& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

double FloquetSpectrum::quasi_energy(const FloquetLabel& label) const {
  const int i = find(label);
  if (i < 0) {
    throw std::runtime_error("FloquetSpectrum: label not present");
  }
  return quasi_energies_MHz[i];
}

double FloquetSpectrum::confidence(const FloquetLabel& label) const {
  const int i = find(label);
  if (i < 0) return 0.0;
  return overlaps[i];
}

bool FloquetSpectrum::flagged(const FloquetLabel& label) const {
  const int i = find(label);
  return i < 0 || overlaps[i] < min_confidence;
}

FloquetEngine::FloquetEngine(const DeviceParams& params,
                             const ModeSystem& system)
    : system_(system) {
  const DrivenHamiltonian h0 =
      build_full_squid_hamiltonian(params, system, std::nullopt);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0.h0);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("FloquetEngine: static diagonalization failed");
  }
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
  coupling_ = evecs_.adjoint() *
              (annihilation(system, "c").matrix() +
               creation(system, "c").matrix()) *
              evecs_;

  // Assign every bare Fock label to its dressed eigenvector.
  const int n = system.total_dim();
  bare_to_dressed_.assign(n, -1);
  bare_overlap_.assign(n, 0.0);
  for (int bare = 0; bare < n; ++bare) {
    int best = 0;
    double best_w = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = std::norm(evecs_(bare, j));
      if (w > best_w) {
        best_w = w;
        best = j;
      }
    }
    bare_to_dressed_[bare] = best;
    bare_overlap_[bare] = best_w;
  }
}

double FloquetEngine::static_energy_MHz(const FloquetLabel& label) const {
  const int bare =
      system_.basis_index({label.n_a, label.n_b, label.n_c});
  return evals_(bare_to_dressed_[bare]) / kTwoPi;
}

DressedParams FloquetEngine::dressed_params() const {
  auto e = [&](int na, int nb, int nc) {
    return static_energy_MHz({na, nb, nc});
  };
  DressedParams d;
  const double e000 = e(0, 0, 0);
  d.omega_a_MHz = e(1, 0, 0) - e000;
  d.omega_b_MHz = e(0, 1, 0) - e000;
  d.omega_c_MHz = e(0, 0, 1) - e000;
  d.chi_a_MHz = -(e(1, 0, 1) - e(1, 0, 0) - e(0, 0, 1) + e000);
  d.chi_b_MHz = -(e(0, 1, 1) - e(0, 1, 0) - e(0, 0, 1) + e000);
  d.kerr_a_MHz = -(e(2, 0, 0) - 2 * e(1, 0, 0) + e000);
  d.kerr_b_MHz = -(e(0, 2, 0) - 2 * e(0, 1, 0) + e000);
  d.kerr_ab_MHz = -(e(1, 1, 0) - e(1, 0, 0) - e(0, 1, 0) + e000);
  d.anharmonicity_MHz = -(e(0, 0, 2) - 2 * e(0, 0, 1) + e000);
  return d;
}

Matrix FloquetEngine::period_propagator(double eps_MHz, double omega_d_MHz,
                                        int steps) const {
  const int n = system_.total_dim();
  const double omega = kTwoPi * omega_d_MHz;  // rad/us
  const double eps = kTwoPi * eps_MHz;
  const double period = kTwoPi / omega;
  const double h = period / steps;
  const double mask_tol = 1e-3;  // |q h| below this: series branch

  // Frequency-difference helpers. delta(j,k) = evals_(j) - evals_(k).
  Matrix u = Matrix::Identity(n, n);
  Matrix omega1(n, n), omega2(n, n);
  Matrix y_plus(n, n), y_minus(n, n), v_plus(n, n), v_minus(n, n);
  Matrix z_plus(n, n), z_minus(n, n);
  Matrix e_2plus(n, n), e_zero(n, n), e_2minus(n, n);
  std::vector<std::pair<int, int>> masked_plus, masked_minus;

  for (int step = 0; step < steps; ++step) {
    const double t0 = step * h;

    masked_plus.clear();
    masked_minus.clear();
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double d = evals_(j) - evals_(k);
        const Complex x = coupling_(j, k);
        const double qp = d + omega;
        const double qm = d - omega;
        const Complex ep = window_integral(qp, t0, h);
        const Complex em = window_integral(qm, t0, h);
        omega1(j, k) = Complex(0, -0.5 * eps) * x * (ep + em);
        z_plus(j, k) = x * ep;
        z_minus(j, k) = x * em;
        if (std::abs(qp * h) < mask_tol) {
          y_plus(j, k) = 0.0;
          v_plus(j, k) = 0.0;
          if (x != Complex(0, 0)) masked_plus.emplace_back(j, k);
        } else {
          const Complex inv = 1.0 / Complex(0, qp);
          y_plus(j, k) = x * inv;
          v_plus(j, k) = x * inv * std::exp(Complex(0, qp * t0));
        }
        if (std::abs(qm * h) < mask_tol) {
          y_minus(j, k) = 0.0;
          v_minus(j, k) = 0.0;
          if (x != Complex(0, 0)) masked_minus.emplace_back(j, k);
        } else {
          const Complex inv = 1.0 / Complex(0, qm);
          y_minus(j, k) = x * inv;
          v_minus(j, k) = x * inv * std::exp(Complex(0, qm * t0));
        }
        e_2plus(j, k) = window_integral(d + 2 * omega, t0, h);
        e_zero(j, k) = window_integral(d, t0, h);
        e_2minus(j, k) = window_integral(d - 2 * omega, t0, h);
      }
    }

    // W^{sr}_{jk} = sum_m X_jm X_mk G0(d_jm + s w, d_mk + r w) and the
    // order-swapped W'. Outer-window parts factor through matmuls; the
    // near-resonant (masked) pairs are added exactly below.
    const Matrix xy_p = coupling_ * y_plus;
    const Matrix xy_m = coupling_ * y_minus;
    const Matrix yx_p = y_plus * coupling_;
    const Matrix yx_m = y_minus * coupling_;

    Matrix w = Matrix::Zero(n, n);
    w += e_2plus.cwiseProduct(xy_p) - z_plus * v_plus;     // s=+, r=+
    w += e_zero.cwiseProduct(xy_m) - z_plus * v_minus;     // s=+, r=-
    w += e_zero.cwiseProduct(xy_p) - z_minus * v_plus;     // s=-, r=+
    w += e_2minus.cwiseProduct(xy_m) - z_minus * v_minus;  // s=-, r=-
    // order-swapped (inner frequency on the jm leg)
    w -= e_2plus.cwiseProduct(yx_p) - v_plus * z_plus;
    w -= e_zero.cwiseProduct(yx_m) - v_minus * z_plus;
    w -= e_zero.cwiseProduct(yx_p) - v_plus * z_minus;
    w -= e_2minus.cwiseProduct(yx_m) - v_minus * z_minus;

    // Exact contributions of the masked near-resonant pairs.
    auto add_masked = [&](const std::vector<std::pair<int, int>>& pairs,
                          double r_sign) {
      for (const auto& [m, k] : pairs) {
        const double q = evals_(m) - evals_(k) + r_sign * omega;
        const Complex xmk = coupling_(m, k);
        for (int j = 0; j < n; ++j) {
          const Complex xjm = coupling_(j, m);
          if (xjm == Complex(0, 0)) continue;
          for (double s_sign : {1.0, -1.0}) {
            const double p = evals_(j) - evals_(m) + s_sign * omega;
            w(j, k) += xjm * xmk * nested_integral_series(p, q, t0, h);
          }
        }
        // swapped order: the masked pair is the inner (t2) leg
        for (int kk = 0; kk < n; ++kk) {
          const Complex xk = coupling_(k, kk);
          if (xk == Complex(0, 0)) continue;
          for (double s_sign : {1.0, -1.0}) {
            const double p = evals_(k) - evals_(kk) + s_sign * omega;
            w(m, kk) -= xmk * xk * nested_integral_series(p, q, t0, h);
          }
        }
      }
    };
    add_masked(masked_plus, 1.0);
    add_masked(masked_minus, -1.0);

    omega2 = (-0.125 * eps * eps) * w;  // -(1/2) (eps/2)^2
    Matrix gen = omega1 + omega2;
    gen = 0.5 * (gen - gen.adjoint().eval());  // keep exactly anti-Hermitian
    u = (expm_unitary(Complex(0, 1) * gen, 1.0) * u).eval();
  }

  // Back to the Schrodinger picture (static eigenbasis).
  const double period_total = kTwoPi / omega;
  for (int j = 0; j < n; ++j) {
    u.row(j) *= std::exp(Complex(0, -evals_(j) * period_total));
  }
  return u;
}

namespace {

struct AssignedModes {
  std::vector<double> quasi_MHz;
  std::vector<double> confidence;
  Matrix vectors;  // columns aligned with requested labels
};

AssignedModes assign_modes(const Matrix& u, double zone_MHz, double period_us,
                           const std::vector<int>& dressed_indices) {
  Eigen::ComplexEigenSolver<Matrix> es(u);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("floquet: propagator diagonalization failed");
  }
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const int n = static_cast<int>(u.rows());

  AssignedModes out;
  out.vectors.resize(n, static_cast<Eigen::Index>(dressed_indices.size()));
  std::vector<bool> taken(n, false);
  for (std::size_t t = 0; t < dressed_indices.size(); ++t) {
    const int row = dressed_indices[t];
    int best = -1;
    double best_w = -1.0;
    for (int k = 0; k < n; ++k) {
      if (taken[k]) continue;
      const double w = std::norm(vecs(row, k));
      if (w > best_w) {
        best_w = w;
        best = k;
      }
    }
    taken[best] = true;
    const double quasi =
        -std::arg(vals(best)) / (kTwoPi * period_us);  // MHz, in zone
    out.quasi_MHz.push_back(fold_into_zone(quasi, zone_MHz));
    out.confidence.push_back(best_w / vecs.col(best).squaredNorm());
    out.vectors.col(static_cast<Eigen::Index>(t)) = vecs.col(best);
  }
  return out;
}

}  // namespace

FloquetSpectrum FloquetEngine::static_spectrum(
    const std::vector<FloquetLabel>& requested) const {
  FloquetSpectrum spec;
  spec.labels = requested;
  spec.zone_MHz = 0.0;
  for (const auto& label : requested) {
    const int bare = system_.basis_index({label.n_a, label.n_b, label.n_c});
    spec.quasi_energies_MHz.push_back(evals_(bare_to_dressed_[bare]) / kTwoPi);
    spec.overlaps.push_back(bare_overlap_[bare]);
  }
  return spec;
}

FloquetSpectrum FloquetEngine::spectrum(double eps_MHz, double omega_d_MHz,
                                        const std::vector<FloquetLabel>& requested,
                                        const FloquetOptions& options) const {
  if (eps_MHz == 0.0) {
    FloquetSpectrum spec = static_spectrum(requested);
    spec.min_confidence = options.min_confidence;
    return spec;
  }
  if (omega_d_MHz <= 0.0) {
    throw std::invalid_argument("FloquetEngine: drive frequency must be > 0");
  }
  std::vector<int> dressed;
  dressed.reserve(requested.size());
  for (const auto& label : requested) {
    dressed.push_back(
        bare_to_dressed_[system_.basis_index({label.n_a, label.n_b, label.n_c})]);
  }
  const double period = 1.0 / omega_d_MHz;  // us

  // Step refinement tracked through the dressed-diagonal phases: their
  // leakage bias is step-independent, so the N vs 2N difference measures the
  // true quasi-energy motion without an eigensolve per stage.
  auto diag_estimate = [&](const Matrix& u) {
    std::vector<double> q(dressed.size());
    for (std::size_t i = 0; i < dressed.size(); ++i) {
      q[i] = -std::arg(u(dressed[i], dressed[i])) / (kTwoPi * period);
    }
    return q;
  };

  Matrix u = period_propagator(eps_MHz, omega_d_MHz, options.initial_steps);
  std::vector<double> est = diag_estimate(u);
  bool converged = false;
  for (int steps = 2 * options.initial_steps; steps <= options.max_steps;
       steps *= 2) {
    const Matrix u2 = period_propagator(eps_MHz, omega_d_MHz, steps);
    const std::vector<double> est2 = diag_estimate(u2);
    double move = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      move = std::max(
          move, std::abs(fold_into_zone(est2[i] - est[i], omega_d_MHz)));
    }
    u = u2;
    est = est2;
    if (move < options.convergence_tol_MHz) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error(
        "FloquetEngine: quasi-energy refinement did not converge");
  }

  const AssignedModes modes = assign_modes(u, omega_d_MHz, period, dressed);
  FloquetSpectrum spec;
  spec.labels = requested;
  spec.quasi_energies_MHz = modes.quasi_MHz;
  spec.overlaps = modes.confidence;
  spec.zone_MHz = omega_d_MHz;
  spec.min_confidence = options.min_confidence;
  return spec;
}

FloquetSpectrum quasi_energy_spectrum(const DeviceParams& params,
                                      const ModeSystem& system,
                                      const std::optional<DriveSpec>& drive,
                                      const std::vector<FloquetLabel>& requested,
                                      const FloquetOptions& options) {
  FloquetEngine engine(params, system);
  std::vector<FloquetLabel> labels = requested;
  if (labels.empty()) {
    labels = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {0, 1, 1}};
  }
  if (!drive || drive->amplitude == 0.0) {
    FloquetSpectrum spec = engine.static_spectrum(labels);
    spec.min_confidence = options.min_confidence;
    return spec;
  }
  double eps = drive->amplitude;
  if (drive->amplitude_mode == DriveSpec::AmplitudeMode::kEffectiveXi) {
    eps = epsilon_from_xi(params, drive->amplitude, drive->frequency_MHz);
  }
  return engine.spectrum(eps, drive->frequency_MHz, labels, options);
}

double crosskerr_from_spectrum(const FloquetSpectrum& spectrum) {
  const FloquetLabel l00{0, 0, 0}, l10{1, 0, 0}, l01{0, 1, 0}, l11{1, 1, 0};
  for (const auto& l : {l00, l10, l01, l11}) {
    if (spectrum.find(l) < 0) {
      throw std::runtime_error("crosskerr_from_spectrum: missing label");
    }
    if (spectrum.flagged(l)) {
      throw std::runtime_error(
          "crosskerr_from_spectrum: unassigned label (level collision)");
    }
  }
  const double comb = spectrum.quasi_energy(l11) - spectrum.quasi_energy(l10) -
                      spectrum.quasi_energy(l01) + spectrum.quasi_energy(l00);
  return fold_into_zone(comb, spectrum.zone_MHz);
}

double calibrate_drive_amplitude(const FloquetEngine& engine,
                                 double omega_d_MHz, double target_shift_MHz,
                                 double eps_max_MHz,
                                 const FloquetOptions& options) {
  if (target_shift_MHz == 0.0) return 0.0;
  const std::vector<FloquetLabel> labels = {{0, 0, 0}, {0, 0, 1}};
  const double wc0 = engine.static_energy_MHz({0, 0, 1}) -
                     engine.static_energy_MHz({0, 0, 0});
  auto shift = [&](double eps) {
    if (eps == 0.0) return 0.0;
    const FloquetSpectrum s =
        engine.spectrum(eps, omega_d_MHz, labels, options);
    const double wc = fold_into_zone(
        s.quasi_energy({0, 0, 1}) - s.quasi_energy({0, 0, 0}), s.zone_MHz);
    return fold_into_zone(wc - wc0, s.zone_MHz);
  };
  double lo = 0.0, hi = eps_max_MHz;
  const double s_lo = 0.0;
  const double s_hi = shift(hi);
  if ((target_shift_MHz - s_lo) * (target_shift_MHz - s_hi) > 0.0) {
    throw std::runtime_error(
        "calibrate_drive_amplitude: target shift outside bracket");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s_mid = shift(mid);
    if (std::abs(s_mid - target_shift_MHz) < 1e-3) return mid;
    if ((s_mid - target_shift_MHz) * (s_hi - target_shift_MHz) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ResonanceResult find_driven_resonance(const FloquetEngine& engine,
                                      double eps_MHz, double omega_lo_MHz,
                                      double omega_hi_MHz, double tol_MHz,
                                      const FloquetOptions& options) {
  const std::vector<FloquetLabel> labels = {{1, 0, 0}, {0, 1, 1}};
  auto gap = [&](double omega_d) {
    const FloquetSpectrum s =
        engine.spectrum(eps_MHz, omega_d, labels, options);
    return std::abs(fold_into_zone(
        s.quasi_energy({1, 0, 0}) - s.quasi_energy({0, 1, 1}), s.zone_MHz));
  };
  // Golden-section minimization; the gap is a hyperbola in the detuning.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = omega_lo_MHz, b = omega_hi_MHz;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = gap(c), fd = gap(d);
  while (b - a > tol_MHz) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = gap(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = gap(d);
    }
  }
  const double omega = 0.5 * (a + b);
  return {omega, gap(omega)};
}

namespace {

const std::vector<FloquetLabel>& sweep_labels() {
  static const std::vector<FloquetLabel> labels = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {0, 1, 1}};
  return labels;
}

}  // namespace

double effective_detuning(const FloquetSpectrum& spectrum,
                          double omega_d_MHz) {
  auto q = [&](const FloquetLabel& l) { return spectrum.quasi_energy(l); };
  const double e000 = q({0, 0, 0});
  const double wa = fold_into_zone(q({1, 0, 0}) - e000, spectrum.zone_MHz);
  const double wb = fold_into_zone(q({0, 1, 0}) - e000, spectrum.zone_MHz);
  const double wc = fold_into_zone(q({0, 0, 1}) - e000, spectrum.zone_MHz);
  const double chib = -fold_into_zone(
      q({0, 1, 1}) - q({0, 1, 0}) - q({0, 0, 1}) + e000, spectrum.zone_MHz);
  return fold_into_zone(omega_d_MHz - (wc + wb - wa - chib),
                        spectrum.zone_MHz);
}

TunedPoint tune_drive_frequency(const FloquetEngine& engine, double eps_MHz,
                                double delta_target_MHz,
                                double omega_guess_MHz,
                                const FloquetOptions& options, double tol_MHz) {
  TunedPoint pt;
  pt.omega_d_MHz = omega_guess_MHz;
  for (int it = 0; it < 12; ++it) {
    pt.spectrum =
        engine.spectrum(eps_MHz, pt.omega_d_MHz, sweep_labels(), options);
    const double delta = effective_detuning(pt.spectrum, pt.omega_d_MHz);
    if (std::abs(delta - delta_target_MHz) < tol_MHz) return pt;
    // The detuning moves nearly one-for-one with the drive frequency.
    pt.omega_d_MHz += delta_target_MHz - delta;
  }
  throw std::runtime_error(
      "tune_drive_frequency: did not reach the requested detuning");
}

DrivenCalibration calibrate_exchange(const FloquetEngine& engine,
                                     double eps_MHz,
                                     const FloquetOptions& options) {
  const DressedParams d = engine.dressed_params();
  DrivenCalibration cal;
  if (eps_MHz == 0.0) {
    cal.resonance_MHz = d.exchange_resonance_MHz();
    return cal;
  }

  // Near the resonance the measured detuning saturates at the hybridization
  // gap but its sign flips across it (the branch assignment swaps), so the
  // resonance is the sign change of the measured detuning.
  auto measured = [&](double omega_d) {
    const FloquetSpectrum s =
        engine.spectrum(eps_MHz, omega_d, sweep_labels(), options);
    return std::make_pair(effective_detuning(s, omega_d), s);
  };

  double lo = d.exchange_resonance_MHz();
  auto [dlo, slo] = measured(lo);
  // Walk with the Stark shift until the resonance is bracketed.
  double step = -dlo;
  double hi = lo;
  double dhi = dlo;
  for (int it = 0; it < 24 && dlo * dhi > 0.0; ++it) {
    hi = lo + step;
    std::tie(dhi, slo) = measured(hi);
    if (dlo * dhi > 0.0) {
      lo = hi;
      dlo = dhi;
      step = -dhi;
      if (std::abs(step) < 0.25) step = std::copysign(0.5, step);
    }
  }
  if (dlo * dhi > 0.0) {
    throw std::runtime_error(
        "calibrate_exchange: failed to bracket the driven resonance");
  }
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(dlo, dhi);
  }
  FloquetSpectrum at_res = slo;
  double omega_res = 0.5 * (lo + hi);
  for (int it = 0; it < 24 && hi - lo > 0.005; ++it) {
    omega_res = 0.5 * (lo + hi);
    auto [dm, sm] = measured(omega_res);
    at_res = sm;
    if (dm * dlo > 0.0) {
      lo = omega_res;
      dlo = dm;
    } else {
      hi = omega_res;
      dhi = dm;
    }
  }

  cal.resonance_MHz = omega_res;
  const double gap = std::abs(
      fold_into_zone(at_res.quasi_energy({1, 0, 0}) -
                         at_res.quasi_energy({0, 1, 1}),
                     at_res.zone_MHz));
  cal.g1_MHz = 0.5 * gap;
  const double wc_driven = fold_into_zone(
      at_res.quasi_energy({0, 0, 1}) - at_res.quasi_energy({0, 0, 0}),
      at_res.zone_MHz);
  cal.stark_shift_MHz =
      fold_into_zone(wc_driven - d.omega_c_MHz, at_res.zone_MHz);
  cal.xi_op =
      std::sqrt(std::abs(cal.stark_shift_MHz) / (2.0 * d.anharmonicity_MHz));
  return cal;
}

std::vector<CrossKerrPoint> crosskerr_sweep(const FloquetEngine& engine,
                                            double eps_MHz,
                                            const std::vector<double>& deltas,
                                            const FloquetOptions& options) {
  const DressedParams dressed = engine.dressed_params();
  std::vector<CrossKerrPoint> out;
  out.reserve(deltas.size());
  double guess_offset = 0.0;  // running Stark estimate carried along the sweep
  for (const double delta : deltas) {
    CrossKerrPoint pt;
    pt.delta_MHz = delta;
    try {
      const TunedPoint tuned = tune_drive_frequency(
          engine, eps_MHz, delta,
          dressed.exchange_resonance_MHz() + guess_offset + delta, options);
      guess_offset = tuned.omega_d_MHz - delta -
                     dressed.exchange_resonance_MHz();
      pt.omega_d_MHz = tuned.omega_d_MHz;
      pt.confidence = 1.0;
      for (const auto& l : sweep_labels()) {
        pt.confidence = std::min(pt.confidence, tuned.spectrum.confidence(l));
      }
      if (pt.confidence < options.min_confidence) {
        pt.flagged = true;
      } else {
        pt.g_ab_MHz = crosskerr_from_spectrum(tuned.spectrum);
      }
    } catch (const std::runtime_error&) {
      pt.flagged = true;  // level collision or tuning failure: emit a gap
    }
    out.push_back(pt);
  }
  // Continuity check: flag jumps far beyond the local slope estimate.
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    if (out[i].flagged || out[i - 1].flagged || out[i + 1].flagged) continue;
    const double slope = (out[i + 1].g_ab_MHz - out[i - 1].g_ab_MHz) /
                         (out[i + 1].delta_MHz - out[i - 1].delta_MHz);
    const double step = out[i].delta_MHz - out[i - 1].delta_MHz;
    const double expected = out[i - 1].g_ab_MHz + slope * step;
    const double scale =
        std::max(std::abs(slope * step), 0.02 * std::abs(out[i].g_ab_MHz));
    if (std::abs(out[i].g_ab_MHz - expected) > 3.0 * scale + 1e-9) {
      out[i].flagged = true;
    }
  }
  return out;
}

}  // namespace crosskerr
