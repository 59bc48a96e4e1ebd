#include <doctest.h>

#include <cmath>
#include <random>

#include "crosskerr/effective.hpp"
#include "crosskerr/hilbert.hpp"
#include "crosskerr/models.hpp"

using namespace crosskerr;

namespace {

SwtInputs paper_inputs() {
  SwtInputs in;
  in.g1_MHz = 0.8;
  in.delta_MHz = -6.0;
  in.chi_b_MHz = 0.5;
  return in;
}

}  // namespace

TEST_CASE("beta coefficient") {
  SwtInputs in = paper_inputs();
  SUBCASE("no excitation to exchange") {
    CHECK(beta_coefficient(in, 0, 0) == 0.0);
    CHECK(beta_coefficient(in, 0, 3) == 0.0);
  }
  SUBCASE("leading-order limit g1/delta") {
    SwtInputs bare;
    bare.g1_MHz = 0.8;
    bare.delta_MHz = -6.0;
    CHECK(beta_coefficient(bare, 1, 0) ==
          doctest::Approx(0.8 / -6.0).epsilon(1e-12));
    // (1,0) is independent of chi_b: the -chi_b frame constant cancels the
    // chi_b (n_b + 1) term.
    CHECK(beta_coefficient(in, 1, 0) ==
          doctest::Approx(0.8 / -6.0).epsilon(1e-12));
  }
  SUBCASE("next photon block picks up chi_b + K_b - K_ab") {
    in.kerr_b_MHz = 0.0024;
    in.kerr_ab_MHz = 0.0003;
    const double den = -6.0 + 0.5 + 0.0024 - 0.0003;
    CHECK(beta_coefficient(in, 1, 1) ==
          doctest::Approx(std::sqrt(2.0) * 0.8 / den).epsilon(1e-12));
  }
  SUBCASE("resonant denominator is an error") {
    SwtInputs res;
    res.g1_MHz = 0.5;
    res.delta_MHz = 0.0;
    CHECK_THROWS_AS(beta_coefficient(res, 1, 0), std::domain_error);
  }
}

TEST_CASE("energy shifts reproduce the closed forms") {
  SwtInputs in = paper_inputs();
  SUBCASE("(1,0) Kerr-free: g1^2/delta") {
    CHECK(energy_shift(in, 1, 0) ==
          doctest::Approx(0.64 / -6.0).epsilon(1e-12));
    CHECK(energy_shift(in, 1, 0) == doctest::Approx(-0.1067).epsilon(2e-4));
  }
  SUBCASE("(1,1) with chi_b only: 2 g1^2/(delta + chi_b)") {
    CHECK(energy_shift(in, 1, 1) ==
          doctest::Approx(2.0 * 0.64 / (-6.0 + 0.5)).epsilon(1e-12));
    CHECK(energy_shift(in, 1, 1) == doctest::Approx(-0.2327).epsilon(2e-4));
  }
  SUBCASE("(0, n_b) vanishes") {
    for (int nb = 0; nb < 4; ++nb) CHECK(energy_shift(in, 0, nb) == 0.0);
  }
}

TEST_CASE("engineered cross-Kerr total") {
  SUBCASE("paper bias point value") {
    CHECK(engineered_crosskerr(paper_inputs()) ==
          doctest::Approx((0.64 / -6.0) * (-6.5 / -5.5)).epsilon(1e-12));
    CHECK(engineered_crosskerr(paper_inputs()) ==
          doctest::Approx(-0.1261).epsilon(1e-3));
  }
  SUBCASE("off state at large detuning") {
    SwtInputs in = paper_inputs();
    in.kerr_ab_MHz = 0.0003;
    in.delta_MHz = 1e9;
    CHECK(engineered_crosskerr(in) == doctest::Approx(-0.0003).epsilon(1e-6));
    in.delta_MHz = -1e9;
    CHECK(engineered_crosskerr(in) == doctest::Approx(-0.0003).epsilon(1e-6));
  }
  SUBCASE("reduces to the chi_b-only form when K_b = K_ab = 0") {
    std::mt19937_64 rng(41);
    auto u = [&](double lo, double hi) {
      return lo + (hi - lo) * double(rng() >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
      SwtInputs in;
      in.g1_MHz = u(0.05, 1.5);
      in.delta_MHz = u(-25.0, -2.0);
      in.chi_b_MHz = u(0.0, 3.0);
      const double expected = (in.g1_MHz * in.g1_MHz / in.delta_MHz) *
                              (in.delta_MHz - in.chi_b_MHz) /
                              (in.delta_MHz + in.chi_b_MHz);
      CHECK(engineered_crosskerr(in) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("the two printed routes agree for random parameters") {
    std::mt19937_64 rng(42);
    auto u = [&](double lo, double hi) {
      return lo + (hi - lo) * double(rng() >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
      SwtInputs in;
      in.g1_MHz = u(0.05, 1.5);
      in.delta_MHz = u(-25.0, -2.0);
      in.chi_b_MHz = u(0.0, 3.0);
      in.kerr_a_MHz = u(0.0, 0.01);
      in.kerr_b_MHz = u(0.0, 0.01);
      in.kerr_ab_MHz = u(0.0, 0.001);
      in.chi_a_MHz = u(0.0, 3.0);
      const double via_shifts = energy_shift(in, 1, 1) -
                                energy_shift(in, 1, 0) -
                                energy_shift(in, 0, 1) - in.kerr_ab_MHz;
      CHECK(engineered_crosskerr(in) ==
            doctest::Approx(via_shifts).epsilon(1e-10));
    }
  }
  SUBCASE("sweep magnitude grows monotonically toward small |delta|") {
    SwtInputs in = paper_inputs();
    double prev = 0.0;
    for (double delta = -20.0; delta <= -2.0; delta += 1.0) {
      in.delta_MHz = delta;
      const double g = std::abs(engineered_crosskerr(in));
      CHECK(g > prev);
      prev = g;
    }
    in.delta_MHz = -20.0;
    const double lo = std::abs(engineered_crosskerr(in));
    in.delta_MHz = -2.0;
    const double hi = std::abs(engineered_crosskerr(in));
    CHECK(hi / lo > 10.0);  // tens of kHz to hundreds of kHz
  }
}

TEST_CASE("weak-coupling oracle: exact diagonalization of the dispersive "
          "model plus exchange") {
  DeviceParams p = fig3_bias();
  const ModeSystem sys = three_mode_system(3, 3, 2);
  const double g1 = 0.1, delta = -5.0;  // g1/|delta| = 0.02

  const double omega_d = drive_frequency(p, delta, 1);
  Matrix h0 =
      build_dispersive_hamiltonian(p, sys, Frame::kDriveRotating, omega_d)
          .matrix();
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 1) = 1.0;
  const Matrix ex = (creation(sys, "a") * annihilation(sys, "b") *
                     embed(sys, "c", sigma))
                        .matrix();
  const Matrix v = kTwoPi * g1 * (ex + ex.adjoint());

  Eigen::SelfAdjointEigenSolver<Matrix> bare(h0);
  Eigen::SelfAdjointEigenSolver<Matrix> pert(h0 + v);

  SwtInputs in;
  in.g1_MHz = g1;
  in.delta_MHz = delta;
  in.chi_b_MHz = p.chi_b_MHz;
  in.chi_a_MHz = p.chi_a_MHz;
  in.kerr_a_MHz = p.kerr_a_MHz;
  in.kerr_b_MHz = p.kerr_b_MHz;
  in.kerr_ab_MHz = p.kerr_ab_MHz;

  auto shift_of = [&](int na, int nb) {
    const int bare_idx = sys.basis_index({na, nb, 0});
    // Match eigenvalues through eigenvector overlap with the bare state.
    auto find = [&](const Eigen::SelfAdjointEigenSolver<Matrix>& es) {
      int best = 0;
      double w = 0.0;
      for (int k = 0; k < sys.total_dim(); ++k) {
        const double o = std::norm(es.eigenvectors()(bare_idx, k));
        if (o > w) {
          w = o;
          best = k;
        }
      }
      return es.eigenvalues()(best);
    };
    return (find(pert) - find(bare)) / kTwoPi;
  };

  for (auto [na, nb] : {std::pair{1, 0}, {1, 1}, {2, 1}}) {
    const double predicted = energy_shift(in, na, nb);
    const double exact = shift_of(na, nb);
    CHECK(std::abs(predicted - exact) / std::abs(exact) < 0.01);
  }
}

TEST_CASE("coupler excitation bound") {
  CHECK(max_coupler_excitation(0.8, 0.0) == 1.0);
  CHECK(max_coupler_excitation(0.8, -6.0) ==
        doctest::Approx(0.64 / 36.64).epsilon(1e-12));
  CHECK(max_coupler_excitation(0.8, -6.0) == doctest::Approx(0.0175).epsilon(2e-3));
  CHECK(max_coupler_excitation(0.8, 1e9) < 1e-15);
  double prev = 1.0;
  for (double d = 1.0; d < 40.0; d += 1.0) {
    const double v = max_coupler_excitation(0.8, -d);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("gate times") {
  SUBCASE("full CZ at the calibrated coupling") {
    CHECK(gate_time(0.09535, 1, 1, M_PI) ==
          doctest::Approx(5.2438).epsilon(2e-4));
    CHECK(gate_time_for_code(0.09535, 1, 1) ==
          doctest::Approx(gate_time(0.09535, 1, 1, M_PI)).epsilon(1e-12));
  }
  SUBCASE("controlled-S at half the phase") {
    CHECK(gate_time(0.09535, 1, 1, M_PI / 2) ==
          doctest::Approx(2.6219).epsilon(2e-4));
  }
  SUBCASE("photon-number enhancement") {
    const double t1 = gate_time(0.09535, 1, 1, M_PI);
    const double t2 = gate_time(0.09535, 1, 2, M_PI);
    CHECK(t1 / t2 == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("zero coupling is an error") {
    CHECK_THROWS_AS(gate_time(0.0, 1, 1, M_PI), std::invalid_argument);
  }
}

TEST_CASE("dressed lifetime estimate") {
  CHECK(dressed_lifetime_estimate(0.1, 2.0) == doctest::Approx(200.0));
  CHECK(dressed_lifetime_estimate(0.05, 2.0) ==
        doctest::Approx(4.0 * dressed_lifetime_estimate(0.1, 2.0)));
  CHECK_THROWS_AS(dressed_lifetime_estimate(0.0, 2.0), std::domain_error);
}
