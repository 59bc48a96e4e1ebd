#include <doctest.h>

#include <cmath>

#include "crosskerr/dynamics.hpp"
#include "crosskerr/effective.hpp"
#include "crosskerr/floquet.hpp"

using namespace crosskerr;

namespace {

const DeviceParams& params() {
  static const DeviceParams p = fig3_bias();
  return p;
}

// Small truncation keeps the unit suite fast; the acceptance suite runs the
// production sizes.
const FloquetEngine& small_engine() {
  static const FloquetEngine engine(params(), three_mode_system(3, 3, 10));
  return engine;
}

FloquetOptions fast_options() {
  FloquetOptions opt;
  opt.initial_steps = 4;
  opt.convergence_tol_MHz = 1e-4;
  return opt;
}

}  // namespace

TEST_CASE("fold into zone") {
  CHECK(fold_into_zone(0.3, 0.0) == 0.3);
  CHECK(fold_into_zone(5501.0, 5500.0) == doctest::Approx(1.0));
  CHECK(fold_into_zone(-2751.0, 5500.0) == doctest::Approx(2749.0));
  CHECK(std::abs(fold_into_zone(2750.0, 5500.0)) == doctest::Approx(2750.0));
}

TEST_CASE("undriven limit: quasi-energies are the dressed eigenvalues") {
  const FloquetEngine& eng = small_engine();
  const std::vector<FloquetLabel> labels = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}};
  const FloquetSpectrum s = eng.static_spectrum(labels);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(s.overlaps[i] > 0.97);
    CHECK(s.quasi_energies_MHz[i] ==
          doctest::Approx(eng.static_energy_MHz(labels[i])));
  }
  // Static cross-Kerr combination equals the dressed K_ab.
  CHECK(crosskerr_from_spectrum(s) ==
        doctest::Approx(-eng.dressed_params().kerr_ab_MHz).epsilon(1e-10));

  // The public entry point with a zero-amplitude drive takes the same path.
  const FloquetSpectrum s2 =
      quasi_energy_spectrum(params(), three_mode_system(3, 3, 10), std::nullopt,
                            labels);
  CHECK(crosskerr_from_spectrum(s2) ==
        doctest::Approx(crosskerr_from_spectrum(s)).epsilon(1e-12));
}

TEST_CASE("magnus propagator matches the generic integrator") {
  // Independent route: the fourth-order commutator-free stepper on the
  // lab-frame Hamiltonian.
  const ModeSystem sys = three_mode_system(2, 2, 6);
  const FloquetEngine eng(params(), sys);
  const double wd = 5506.9, eps = 40.0;

  const DrivenHamiltonian h0 =
      build_full_squid_hamiltonian(params(), sys, std::nullopt);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0.h0);
  const Matrix u_magnus = es.eigenvectors() *
                          eng.period_propagator(eps, wd, 16) *
                          es.eigenvectors().adjoint();

  DriveSpec drive;
  drive.frequency_MHz = wd;
  drive.amplitude = eps;
  drive.duration_us = 1.0;
  const DrivenHamiltonian lab =
      build_full_squid_hamiltonian(params(), sys, drive);
  const Matrix u_ref = period_propagator(lab, 1.0 / wd, 8192).matrix();

  CHECK((u_magnus - u_ref).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((u_magnus * u_magnus.adjoint() -
         Matrix::Identity(sys.total_dim(), sys.total_dim()))
            .cwiseAbs()
            .maxCoeff() < 1e-8);
}

TEST_CASE("driven spectrum basics") {
  const FloquetEngine& eng = small_engine();
  const DressedParams d = eng.dressed_params();
  const double wd = d.exchange_resonance_MHz() - 10.0;
  const std::vector<FloquetLabel> labels = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}, {0, 1, 1}};
  const FloquetSpectrum s = eng.spectrum(20.0, wd, labels, fast_options());

  SUBCASE("vacuum stays weakly dressed") {
    CHECK(s.confidence({0, 0, 0}) > 0.99);
  }
  SUBCASE("quasi-energies live in the first zone") {
    for (double q : s.quasi_energies_MHz) {
      CHECK(std::abs(q) <= 0.5 * s.zone_MHz + 1e-9);
    }
  }
  SUBCASE("stark shift is negative and even in the drive sign") {
    const double wc0 = d.omega_c_MHz;
    auto shift = [&](double eps) {
      const FloquetSpectrum sp = eng.spectrum(eps, wd, labels, fast_options());
      return fold_into_zone(
          fold_into_zone(sp.quasi_energy({0, 0, 1}) -
                             sp.quasi_energy({0, 0, 0}),
                         sp.zone_MHz) -
              wc0,
          sp.zone_MHz);
    };
    const double sp = shift(20.0);
    const double sm = shift(-20.0);
    CHECK(sp < 0.0);
    CHECK(std::abs(sp - sm) < 1e-3);
  }
}

TEST_CASE("weak-drive cross-check against the perturbative cross-Kerr") {
  const FloquetEngine& eng = small_engine();
  const DressedParams d = eng.dressed_params();
  const FloquetOptions opt = fast_options();
  const double eps = 25.0;

  const DrivenCalibration cal = calibrate_exchange(eng, eps, opt);
  CHECK(cal.g1_MHz > 0.0);
  CHECK(cal.stark_shift_MHz < 0.0);

  const auto pts = crosskerr_sweep(eng, eps, {-10.0}, opt);
  REQUIRE_FALSE(pts[0].flagged);

  SwtInputs in;
  in.g1_MHz = cal.g1_MHz;
  in.delta_MHz = -10.0;
  in.chi_b_MHz = d.chi_b_MHz;
  in.kerr_b_MHz = d.kerr_b_MHz;
  in.kerr_ab_MHz = d.kerr_ab_MHz;
  const double gs = engineered_crosskerr(in);
  CHECK(std::abs(pts[0].g_ab_MHz - gs) / std::abs(pts[0].g_ab_MHz) < 0.10);
}

TEST_CASE("resonance finders agree") {
  const FloquetEngine& eng = small_engine();
  const FloquetOptions opt = fast_options();
  const double eps = 25.0;
  const DrivenCalibration cal = calibrate_exchange(eng, eps, opt);
  const double guess = eng.dressed_params().exchange_resonance_MHz();
  const ResonanceResult golden =
      find_driven_resonance(eng, eps, guess - 3.0, guess + 1.0, 0.02, opt);
  CHECK(std::abs(golden.omega_d_MHz - cal.resonance_MHz) < 0.05);
  CHECK(golden.gap_MHz == doctest::Approx(2.0 * cal.g1_MHz).epsilon(0.02));
}

TEST_CASE("drive amplitude calibration") {
  const FloquetEngine& eng = small_engine();
  const FloquetOptions opt = fast_options();
  const double wd = eng.dressed_params().exchange_resonance_MHz() - 10.0;

  SUBCASE("zero target needs no drive") {
    CHECK(calibrate_drive_amplitude(eng, wd, 0.0, 50.0, opt) == 0.0);
  }
  SUBCASE("round trip through the measured shift") {
    const double eps = calibrate_drive_amplitude(eng, wd, -0.2, 60.0, opt);
    CHECK(eps > 0.0);
    const std::vector<FloquetLabel> labels = {{0, 0, 0}, {0, 0, 1}};
    const FloquetSpectrum s = eng.spectrum(eps, wd, labels, opt);
    const double wc = fold_into_zone(
        s.quasi_energy({0, 0, 1}) - s.quasi_energy({0, 0, 0}), s.zone_MHz);
    const double shift =
        fold_into_zone(wc - eng.dressed_params().omega_c_MHz, s.zone_MHz);
    CHECK(std::abs(shift - (-0.2)) < 1e-3);
  }
  SUBCASE("unreachable target fails the bracket") {
    CHECK_THROWS_AS(calibrate_drive_amplitude(eng, wd, -0.2, 1.0, opt),
                    std::runtime_error);
  }
}

TEST_CASE("detuning sweep magnitude grows toward small detuning") {
  const FloquetEngine& eng = small_engine();
  const auto pts =
      crosskerr_sweep(eng, 25.0, {-16.0, -8.0, -4.0}, fast_options());
  REQUIRE(pts.size() == 3);
  double prev = 0.0;
  for (const auto& pt : pts) {
    REQUIRE_FALSE(pt.flagged);
    CHECK(std::abs(pt.g_ab_MHz) > prev);
    prev = std::abs(pt.g_ab_MHz);
  }
}

TEST_CASE("positive detunings are asymmetric against negative ones") {
  const FloquetEngine& eng = small_engine();
  const auto pts = crosskerr_sweep(eng, 25.0, {-6.0, 6.0}, fast_options());
  REQUIRE_FALSE(pts[0].flagged);
  REQUIRE_FALSE(pts[1].flagged);
  // The chi_b interplay skews the two branches away from a mirror image.
  const double asym = std::abs(pts[1].g_ab_MHz + pts[0].g_ab_MHz) /
                      std::abs(pts[0].g_ab_MHz);
  CHECK(asym > 0.05);
}
