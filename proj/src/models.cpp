#include "crosskerr/models.hpp"

#include <cmath>
#include <stdexcept>

namespace crosskerr {

void DeviceParams::validate() const {
  if (omega_a_MHz <= 0 || omega_b_MHz <= 0 || omega_c_MHz <= 0) {
    throw std::invalid_argument("DeviceParams: mode frequencies must be > 0");
  }
  if (!(ej1_GHz >= ej2_GHz) || ej2_GHz <= 0) {
    throw std::invalid_argument("DeviceParams: requires EJ1 >= EJ2 > 0");
  }
  if (chi_a_MHz < 0 || chi_b_MHz < 0) {
    throw std::invalid_argument("DeviceParams: dispersive shifts must be >= 0");
  }
  if (ec_GHz <= 0) {
    throw std::invalid_argument("DeviceParams: EC must be > 0");
  }
}

const CoherencePair& DeviceParams::coherence(const std::string& label,
                                             bool driven) const {
  auto it = coherences.find(label);
  if (it == coherences.end()) {
    throw std::invalid_argument("DeviceParams: no coherence entry for mode '" +
                                label + "'");
  }
  return driven ? it->second.driven : it->second.idle;
}

namespace {

DeviceParams base_device() {
  DeviceParams p;
  p.kerr_a_MHz = 0.0013;
  p.kerr_b_MHz = 0.0024;
  p.anharmonicity_MHz = 196.0;
  p.kerr_ab_MHz = 0.0003;
  p.ej1_GHz = 19.0;
  p.ej2_GHz = 5.2;
  p.ec_GHz = 0.1814;
  p.g_ac_MHz = 43.07;
  p.g_bc_MHz = 22.56;
  // Idle dephasing from the measured (T1, T2) pairs through the
  // e^{-t/(2 Tphi)} coherence convention: 1/(2 Tphi) = 1/T2 - 1/(2 T1).
  p.coherences["a"] = {{800.0, 480.0}, {210.0, 70.0}};
  p.coherences["b"] = {{900.0, 720.0}, {388.0, 52.0}};
  p.coherences["c"] = {{50.0, 1.28}, {50.0, 13.0}};
  return p;
}

}  // namespace

DeviceParams fig3_bias() {
  DeviceParams p = base_device();
  p.omega_a_MHz = 4120.0;
  p.omega_b_MHz = 4410.0;
  p.omega_c_MHz = 5220.0;
  p.chi_a_MHz = 0.8;
  p.chi_b_MHz = 0.5;
  p.flux =
      flux_for_coupler_frequency(p.ej1_GHz, p.ej2_GHz, p.ec_GHz, p.omega_c_MHz);
  return p;
}

DeviceParams fig2_bias() {
  DeviceParams p = base_device();
  // Cavity spacing 284 MHz; coupler placed so the single-photon exchange
  // resonance omega_c + omega_b - omega_a - chi_b comes out at 5.20 GHz.
  p.omega_a_MHz = 4120.0;
  p.omega_b_MHz = 4404.0;
  p.omega_c_MHz = 4919.0;
  p.chi_a_MHz = 2.8;
  p.chi_b_MHz = 3.0;
  p.flux =
      flux_for_coupler_frequency(p.ej1_GHz, p.ej2_GHz, p.ec_GHz, p.omega_c_MHz);
  return p;
}

void use_ramsey_driven_coherences(DeviceParams& params) {
  // Driven T2* of 40 us (Alice) and 60 us (Bob) instead of the budget set.
  params.coherences["a"].driven = {210.0, 22.1};
  params.coherences["b"].driven = {388.0, 32.5};
}

double squid_ej(double flux, double ej1_GHz, double ej2_GHz,
                SquidConvention convention) {
  if (ej1_GHz < ej2_GHz || ej2_GHz <= 0) {
    throw std::invalid_argument("squid_ej: requires EJ1 >= EJ2 > 0");
  }
  const double sum = ej1_GHz + ej2_GHz;
  const double diff = ej1_GHz - ej2_GHz;
  const double c = std::cos(M_PI * flux);
  const double s = std::sin(M_PI * flux);
  // Stable form of sum*cos*sqrt(1 + r tan^2): no tan blowup at half flux.
  double under;
  if (convention == SquidConvention::kSquaredRatio) {
    under = sum * sum * c * c + diff * diff * s * s;
  } else {
    under = sum * sum * c * c + diff * sum * s * s;
  }
  return std::sqrt(std::max(0.0, under));
}

double plasma_frequency_MHz(const DeviceParams& params) {
  const double ej = squid_ej(params.flux, params.ej1_GHz, params.ej2_GHz);
  return 1e3 * std::sqrt(8.0 * ej * params.ec_GHz);
}

namespace {

// 0-1 transition of the bare SQUID transmon 4 E_C n^2 - E_J cos(phi), MHz.
double squid_transition_MHz(double ej_GHz, double ec_GHz, int dim = 24) {
  if (ej_GHz <= 0) return 0.0;
  const double ej = 1e3 * ej_GHz;
  const double ec = 1e3 * ec_GHz;
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Matrix adag = a.adjoint();
  const double phi_zpf = std::pow(2.0 * ec / ej, 0.25);
  const double n_zpf = std::pow(ej / (32.0 * ec), 0.25);
  const Matrix phi = phi_zpf * (a + adag);
  const Matrix qdiff = adag - a;  // n = i n_zpf (a^dag - a)
  const Matrix n2 = -n_zpf * n_zpf * qdiff * qdiff;
  const Matrix cos_phi =
      hermitian_function(phi, [](double x) { return std::cos(x); });
  const Matrix h = 4.0 * ec * n2 - ej * cos_phi;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

}  // namespace

double flux_for_coupler_frequency(double ej1_GHz, double ej2_GHz,
                                  double ec_GHz, double target_MHz) {
  auto freq = [&](double flux) {
    return squid_transition_MHz(squid_ej(flux, ej1_GHz, ej2_GHz), ec_GHz);
  };
  double lo = 0.0, hi = 0.499;
  if (target_MHz > freq(lo) || target_MHz < freq(hi)) {
    throw std::invalid_argument(
        "flux_for_coupler_frequency: target outside tunability range");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (freq(mid) > target_MHz) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void DriveSpec::validate() const {
  if (duration_us <= 0) {
    throw std::invalid_argument("DriveSpec: duration must be > 0");
  }
  if (ramp_us < 0 || ramp_us > duration_us / 2) {
    throw std::invalid_argument("DriveSpec: ramp must be in [0, duration/2]");
  }
}

double xi_from_drive(const DeviceParams& params, const DriveSpec& drive) {
  if (drive.amplitude_mode == DriveSpec::AmplitudeMode::kEffectiveXi) {
    return drive.amplitude;
  }
  const double det = drive.frequency_MHz - plasma_frequency_MHz(params);
  if (det == 0.0) {
    throw std::invalid_argument("xi_from_drive: drive on the bare plasma "
                                "frequency, displaced frame undefined");
  }
  return drive.amplitude / det;
}

double epsilon_from_xi(const DeviceParams& params, double xi,
                       double omega_d_MHz) {
  return xi * (omega_d_MHz - plasma_frequency_MHz(params));
}

double ramp_envelope(double t_us, double duration_us, double ramp_us) {
  if (t_us <= 0.0 || t_us >= duration_us) return 0.0;
  if (ramp_us <= 0.0) return 1.0;
  if (t_us < ramp_us) {
    const double s = std::sin(0.5 * M_PI * t_us / ramp_us);
    return s * s;
  }
  if (t_us > duration_us - ramp_us) {
    const double s = std::sin(0.5 * M_PI * (duration_us - t_us) / ramp_us);
    return s * s;
  }
  return 1.0;
}

Matrix DrivenHamiltonian::at(double t_us) const {
  Matrix h = h0;
  for (const auto& term : terms) {
    double amp = term.amplitude * std::cos(term.omega * t_us + term.phase);
    if (term.envelope) amp *= term.envelope(t_us);
    if (amp != 0.0) h += amp * term.op;
  }
  return h;
}

double DrivenHamiltonian::period_us() const {
  if (terms.size() != 1 || terms[0].omega == 0.0) {
    throw std::invalid_argument(
        "DrivenHamiltonian: period defined for a single harmonic term");
  }
  return kTwoPi / std::abs(terms[0].omega);
}

Operator build_dispersive_hamiltonian(const DeviceParams& params,
                                      const ModeSystem& system, Frame frame,
                                      double omega_d_MHz,
                                      const std::optional<DriveSpec>& drive) {
  for (const char* l : {"a", "b", "c"}) {
    if (!system.has_mode(l)) {
      throw std::invalid_argument(
          std::string("build_dispersive_hamiltonian: system lacks mode '") +
          l + "'");
    }
  }
  double wa = params.omega_a_MHz;
  double wb = params.omega_b_MHz;
  double wc = params.omega_c_MHz;
  if (drive) {
    const double xi2 = std::norm(xi_from_drive(params, *drive));
    wa -= params.chi_a_MHz * xi2;
    wb -= params.chi_b_MHz * xi2;
    wc -= 2.0 * params.anharmonicity_MHz * xi2;
  }
  if (frame == Frame::kDriveRotating) wc -= omega_d_MHz;

  const int n = system.total_dim();
  const std::size_t ia = system.mode_index("a");
  const std::size_t ib = system.mode_index("b");
  const std::size_t ic = system.mode_index("c");
  Matrix h = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double na = system.occupation(i, ia);
    const double nb = system.occupation(i, ib);
    const double nc = system.occupation(i, ic);
    double e = wa * na - 0.5 * params.kerr_a_MHz * na * (na - 1) +
               wb * nb - 0.5 * params.kerr_b_MHz * nb * (nb - 1) +
               wc * nc - 0.5 * params.anharmonicity_MHz * nc * (nc - 1) -
               params.chi_a_MHz * na * nc - params.chi_b_MHz * nb * nc -
               params.kerr_ab_MHz * na * nb;
    h(i, i) = kTwoPi * e;
  }
  return Operator(system, h);
}

namespace {

Matrix exchange_op(const ModeSystem& system) {
  // a^dag b |g><e| on the coupler's lowest two levels.
  Matrix sigma = Matrix::Zero(system.dim_of("c"), system.dim_of("c"));
  sigma(0, 1) = 1.0;
  const Operator op = creation(system, "a") * annihilation(system, "b") *
                      embed(system, "c", sigma);
  return op.matrix();
}

}  // namespace

DrivenHamiltonian build_exchange_hamiltonian(
    const ModeSystem& system, double g1_MHz, double delta_MHz,
    std::function<double(double)> envelope) {
  const Matrix ex = exchange_op(system);
  DrivenHamiltonian h;
  h.system = system;
  h.h0 = Matrix::Zero(system.total_dim(), system.total_dim());
  const double amp = kTwoPi * g1_MHz;
  const double omega = kTwoPi * delta_MHz;
  // e^{i w t} A + h.c. = cos(w t)(A + A^dag) + cos(w t - pi/2) i(A - A^dag)
  h.terms.push_back({ex + ex.adjoint(), amp, omega, 0.0, envelope});
  h.terms.push_back({Complex(0, 1) * (ex - ex.adjoint().eval()), amp, omega,
                     -0.5 * M_PI, envelope});
  return h;
}

DrivenHamiltonian build_exchange_hamiltonian_rotating(
    const ModeSystem& system, double g1_MHz, double delta_MHz,
    std::function<double(double)> envelope) {
  const Matrix ex = exchange_op(system);
  Matrix sigma_ee = Matrix::Zero(system.dim_of("c"), system.dim_of("c"));
  sigma_ee(1, 1) = 1.0;
  DrivenHamiltonian h;
  h.system = system;
  h.h0 = -kTwoPi * delta_MHz * embed(system, "c", sigma_ee).matrix();
  h.terms.push_back(
      {ex + ex.adjoint(), kTwoPi * g1_MHz, 0.0, 0.0, envelope});
  if (!envelope) {
    // Constant drive: fold the exchange into the static part.
    h.h0 += kTwoPi * g1_MHz * (ex + ex.adjoint());
    h.terms.clear();
  }
  return h;
}

Operator build_effective_crosskerr(const ModeSystem& system, double g_ab_MHz) {
  Operator nn = number(system, "a") * number(system, "b");
  if (system.has_mode("c")) {
    nn = nn * fock_projector(system, "c", 0);
  }
  return Complex(kTwoPi * g_ab_MHz, 0) * nn;
}

namespace {

DrivenHamiltonian squid_hamiltonian_impl(const DeviceParams& params,
                                         const ModeSystem& system,
                                         const std::optional<DriveSpec>& drive,
                                         bool quartic) {
  for (const char* l : {"a", "b", "c"}) {
    if (!system.has_mode(l)) {
      throw std::invalid_argument(
          std::string("build_full_squid_hamiltonian: system lacks mode '") +
          l + "'");
    }
  }
  if (system.dim_of("c") < 4) {
    throw std::invalid_argument(
        "build_full_squid_hamiltonian: coupler truncation below 4");
  }
  const double ej =
      1e3 * squid_ej(params.flux, params.ej1_GHz, params.ej2_GHz);
  const double ec = 1e3 * params.ec_GHz;
  if (ej <= 0) {
    throw std::invalid_argument(
        "build_full_squid_hamiltonian: zero Josephson energy at this flux");
  }
  const double phi_zpf = std::pow(2.0 * ec / ej, 0.25);
  const double n_zpf = std::pow(ej / (32.0 * ec), 0.25);

  const Matrix c = annihilation(system, "c").matrix();
  const Matrix cd = c.adjoint();
  const Matrix a = annihilation(system, "a").matrix();
  const Matrix ad = a.adjoint();
  const Matrix b = annihilation(system, "b").matrix();
  const Matrix bd = b.adjoint();

  const Matrix phi = phi_zpf * (c + cd);
  const Matrix qdiff = cd - c;
  const Matrix n2 = -n_zpf * n_zpf * qdiff * qdiff;

  Matrix cos_phi;
  if (quartic) {
    const int n = system.total_dim();
    const Matrix phi2 = phi * phi;
    cos_phi = Matrix::Identity(n, n) - 0.5 * phi2 + phi2 * phi2 / 24.0;
  } else {
    cos_phi = hermitian_function(phi, [](double x) { return std::cos(x); });
  }

  Matrix h = 4.0 * ec * n2 - ej * cos_phi;
  h += params.omega_a_MHz * (ad * a).eval() +
       params.omega_b_MHz * (bd * b).eval();
  // Cavities participate in the junction phase, so the bilinear coupling is
  // between the position quadratures. This convention reproduces the
  // measured dispersive shifts with the fitted g values.
  h -= params.g_ac_MHz * ((ad + a) * (cd + c)).eval();
  h -= params.g_bc_MHz * ((bd + b) * (cd + c)).eval();

  DrivenHamiltonian out;
  out.system = system;
  out.h0 = kTwoPi * h;
  if (drive && drive->amplitude != 0.0) {
    double eps = drive->amplitude;
    if (drive->amplitude_mode == DriveSpec::AmplitudeMode::kEffectiveXi) {
      eps = epsilon_from_xi(params, drive->amplitude, drive->frequency_MHz);
    }
    out.terms.push_back({c + cd, kTwoPi * eps, kTwoPi * drive->frequency_MHz,
                         drive->phase_rad, nullptr});
  }
  return out;
}

}  // namespace

DrivenHamiltonian build_full_squid_hamiltonian(
    const DeviceParams& params, const ModeSystem& system,
    const std::optional<DriveSpec>& drive) {
  return squid_hamiltonian_impl(params, system, drive, false);
}

DrivenHamiltonian build_quartic_squid_hamiltonian(
    const DeviceParams& params, const ModeSystem& system,
    const std::optional<DriveSpec>& drive) {
  return squid_hamiltonian_impl(params, system, drive, true);
}

double drive_frequency(const DeviceParams& params, double delta_MHz,
                       int control_photons) {
  return params.omega_c_MHz + params.omega_b_MHz - params.omega_a_MHz -
         control_photons * params.chi_b_MHz + delta_MHz;
}

double snail_effective_crosskerr(double g3_MHz, double g5_MHz,
                                 double delta_MHz) {
  if (delta_MHz == 0.0) {
    throw std::invalid_argument(
        "snail_effective_crosskerr: delta = 0 is the resonant (non-Raman) "
        "condition");
  }
  return g3_MHz * g5_MHz / delta_MHz;
}

ModeSystem three_mode_system(int dim_a, int dim_b, int dim_c) {
  return ModeSystem({{"a", dim_a}, {"b", dim_b}, {"c", dim_c}});
}

ModeSystem two_mode_system(int dim_a, int dim_b) {
  return ModeSystem({{"a", dim_a}, {"b", dim_b}});
}

}  // namespace crosskerr
