#include <doctest.h>

#include <cmath>
#include <random>

#include "crosskerr/dynamics.hpp"
#include "test_support.hpp"

using namespace crosskerr;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("unitary limit conserves purity and matches the exact propagator") {
  std::mt19937_64 rng(3);
  const ModeSystem sys({{"m", 4}});
  Matrix h = test_support::ginibre(4, rng);
  h = (h + h.adjoint()).eval();
  const DensityMatrix rho0 = test_support::random_state(sys, rng);

  LindbladModel model = LindbladModel::closed(Operator(sys, h));
  const auto times = linspace(0.0, 2.0, 9);
  EvolveOptions opts;
  opts.store_states = true;
  const Trajectory traj = evolve_lindblad(model, rho0, times, {}, opts);

  const double p0 = rho0.purity();
  for (const auto& state : traj.states) {
    CHECK(std::abs(state.purity() - p0) < 1e-8);
    CHECK(std::abs(state.trace() - 1.0) < 1e-8);
    CHECK(state.min_eigenvalue() > -1e-7);
  }
  const Matrix u = expm_unitary(h, 2.0);
  const Matrix exact = u * rho0.matrix() * u.adjoint();
  CHECK((traj.states.back().matrix() - exact).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("amplitude damping of a single photon") {
  const ModeSystem sys({{"m", 3}});
  const double t1 = 800.0;
  LindbladModel model = LindbladModel::closed(
      Operator(sys, Matrix::Zero(3, 3)));
  model.collapse_ops.emplace_back(annihilation(sys, "m"), 1.0 / t1);

  const Trajectory traj = evolve_lindblad(
      model, basis_state(sys, {1}), linspace(0.0, 800.0, 5),
      {{"p1", fock_projector(sys, "m", 1)}});
  CHECK(traj.expectations.at("p1").back() ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
}

TEST_CASE("pure-dephasing convention: coherence dephases as exp(-t/(2 Tphi))") {
  const ModeSystem sys({{"m", 2}});
  const double tphi = 52.0;
  DeviceParams p = fig3_bias();
  p.coherences["m"] = {{kInfTime, tphi}, {kInfTime, tphi}};
  const auto ops = collapse_set(p, sys, false);
  REQUIRE(ops.size() == 1);
  LindbladModel model =
      LindbladModel::closed(Operator(sys, Matrix::Zero(2, 2)));
  model.collapse_ops = ops;

  Matrix rho = Matrix::Constant(2, 2, 0.5);
  EvolveOptions opts;
  opts.store_states = true;
  const Trajectory traj = evolve_lindblad(model, DensityMatrix(sys, rho),
                                          linspace(0.0, 2.0 * 52.0, 3), {}, opts);
  CHECK(std::abs(traj.states.back().matrix()(0, 1)) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-6));
  // Populations untouched by pure dephasing.
  CHECK(traj.states.back().matrix()(1, 1).real() ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("driven exchange at resonance: full transfer and revival") {
  const ModeSystem sys = three_mode_system(2, 2, 2);
  const double g1 = 1.024;
  const DrivenHamiltonian h = build_exchange_hamiltonian(sys, g1, 0.0);
  const DensityMatrix rho0 = basis_state(sys, {1, 0, 0});
  const double t_revival = 1.0 / (2.0 * g1);

  const Trajectory traj = evolve_lindblad(
      LindbladModel{h, {}}, rho0,
      {0.0, 0.5 * t_revival, t_revival},
      {{"p100", Operator(sys, basis_state(sys, {1, 0, 0}).matrix())},
       {"p011", Operator(sys, basis_state(sys, {0, 1, 1}).matrix())}});

  // Half way: complete transfer to |0,1,e>; full period: back to |1,0,g>.
  CHECK(traj.expectations.at("p011")[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(traj.expectations.at("p100")[2] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lab-frame and detuning-frame exchange models agree on populations") {
  const ModeSystem sys = three_mode_system(2, 2, 2);
  const double g1 = 0.8, delta = -4.0;
  const DensityMatrix rho0 = basis_state(sys, {1, 0, 0});
  const auto times = linspace(0.0, 1.5, 7);
  const std::vector<std::pair<std::string, Operator>> obs = {
      {"pe", fock_projector(sys, "c", 1)}};

  const Trajectory lab = evolve_lindblad(
      LindbladModel{build_exchange_hamiltonian(sys, g1, delta), {}}, rho0,
      times, obs);
  const Trajectory rot = evolve_lindblad(
      LindbladModel{build_exchange_hamiltonian_rotating(sys, g1, delta), {}},
      rho0, times, obs);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(lab.expectations.at("pe")[i] -
                   rot.expectations.at("pe")[i]) < 1e-6);
  }
}

TEST_CASE("detuned exchange contrast follows the Rabi formula") {
  const ModeSystem sys = three_mode_system(2, 2, 2);
  const double g1 = 0.8, delta = -4.0;
  const DrivenHamiltonian h =
      build_exchange_hamiltonian_rotating(sys, g1, delta);
  const double rabi = std::sqrt(4.0 * g1 * g1 + delta * delta);
  const auto times = linspace(0.0, 2.0 / rabi, 200);
  const Trajectory traj =
      evolve_lindblad(LindbladModel{h, {}}, basis_state(sys, {1, 0, 0}), times,
                      {{"pe", fock_projector(sys, "c", 1)}});
  double peak = 0.0;
  for (double v : traj.expectations.at("pe")) peak = std::max(peak, v);
  const double contrast = 4.0 * g1 * g1 / (4.0 * g1 * g1 + delta * delta);
  CHECK(peak == doctest::Approx(contrast).epsilon(1e-3));
}

TEST_CASE("step-size underflow is reported with the failing time") {
  const ModeSystem sys({{"m", 2}});
  Matrix huge = Matrix::Zero(2, 2);
  huge(0, 1) = huge(1, 0) = 1e18;
  LindbladModel model = LindbladModel::closed(Operator(sys, huge));
  CHECK_THROWS_AS(
      evolve_lindblad(model, basis_state(sys, {0}), {0.0, 1.0}),
      StepSizeUnderflow);
}

TEST_CASE("period propagator") {
  std::mt19937_64 rng(17);
  const ModeSystem sys({{"m", 3}});

  SUBCASE("constant hamiltonian: U = exp(-i H T)") {
    Matrix h = test_support::ginibre(3, rng);
    h = (h + h.adjoint()).eval();
    DrivenHamiltonian dh;
    dh.system = sys;
    dh.h0 = h;
    const Operator u = period_propagator(dh, 0.7, 16);
    CHECK((u.matrix() - expm_unitary(h, 0.7)).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("unitarity and start-phase covariance of the spectrum") {
    DrivenHamiltonian dh;
    dh.system = sys;
    dh.h0 = kTwoPi * 3.0 * number(sys, "m").matrix();
    const Matrix a = annihilation(sys, "m").matrix();
    const double omega = kTwoPi * 10.0;
    dh.terms.push_back({a + a.adjoint().eval(), kTwoPi * 1.3, omega, 0.0, nullptr});
    DrivenHamiltonian shifted = dh;
    shifted.terms[0].phase = 1.1;  // start phase moved within the period

    const double period = kTwoPi / omega;
    const Matrix u1 = period_propagator_adaptive(dh, period, 1e-11).matrix();
    const Matrix u2 =
        period_propagator_adaptive(shifted, period, 1e-11).matrix();
    CHECK((u1 * u1.adjoint() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-8);

    auto phases = [](const Matrix& u) {
      Eigen::ComplexEigenSolver<Matrix> es(u);
      std::vector<double> p;
      for (int i = 0; i < u.rows(); ++i) {
        p.push_back(std::arg(es.eigenvalues()(i)));
      }
      std::sort(p.begin(), p.end());
      return p;
    };
    const auto p1 = phases(u1);
    const auto p2 = phases(u2);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(std::abs(p1[i] - p2[i]) < 1e-7);
    }
  }

  SUBCASE("two-level cosine drive vs a fine-step reference") {
    ModeSystem qubit({{"m", 2}});
    DrivenHamiltonian dh;
    dh.system = qubit;
    dh.h0 = Matrix::Zero(2, 2);
    Matrix sx = Matrix::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    const double omega = kTwoPi * 5.0;
    dh.terms.push_back({sx, kTwoPi * 0.7, omega, 0.0, nullptr});
    const double period = kTwoPi / omega;

    // Independent reference: brute-force product of midpoint exponentials.
    const int fine = 200000;
    Matrix ref = Matrix::Identity(2, 2);
    const double dt = period / fine;
    for (int i = 0; i < fine; ++i) {
      ref = (expm_unitary(dh.at((i + 0.5) * dt), dt) * ref).eval();
    }
    const Matrix u = period_propagator_adaptive(dh, period, 1e-12).matrix();
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("collapse sets from device coherences") {
  DeviceParams p = fig3_bias();
  const ModeSystem sys = two_mode_system(3, 3);

  SUBCASE("idle Alice decay rate") {
    const auto ops = collapse_set(p, sys, false);
    REQUIRE(ops.size() == 4);  // damping + dephasing per cavity
    CHECK(ops[0].second == doctest::Approx(1.0 / 800.0));
  }
  SUBCASE("driven set uses the budget coherences") {
    const auto ops = collapse_set(p, sys, true);
    CHECK(ops[0].second == doctest::Approx(1.0 / 210.0));
    CHECK(ops[1].second == doctest::Approx(1.0 / 70.0));
    CHECK(ops[2].second == doctest::Approx(1.0 / 388.0));
    CHECK(ops[3].second == doctest::Approx(1.0 / 52.0));
  }
  SUBCASE("absent Tphi emits no dephasing operator") {
    DeviceParams q = p;
    q.coherences["a"].idle.tphi_us = kInfTime;
    q.coherences["b"].idle.tphi_us = kInfTime;
    const auto ops = collapse_set(q, sys, false);
    CHECK(ops.size() == 2);
  }
  SUBCASE("missing coherence entry is an error") {
    DeviceParams q = p;
    q.coherences.erase("b");
    CHECK_THROWS_AS(collapse_set(q, sys, false), std::invalid_argument);
  }
}

TEST_CASE("damped cosine fit") {
  auto sample = [](const DampedCosineFit& truth, double t_max, int n,
                   double noise, std::mt19937_64* rng) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (int i = 0; i < n; ++i) {
      const double t = t_max * i / (n - 1);
      double v = truth.evaluate(t);
      if (rng) v += noise * test_support::normal_draw(*rng);
      out.first.push_back(t);
      out.second.push_back(v);
    }
    return out;
  };

  DampedCosineFit truth;
  truth.amplitude = 0.5;
  truth.offset = 0.02;
  truth.g1_MHz = 1.024;
  truth.phi0_rad = 0.0;

  SUBCASE("noise-free recovery of the driven-subspace parameters") {
    truth.kappa1_per_us = 1.0 / 94.0;
    truth.kappa_phi_per_us = 1.0 / 28.0;
    const auto [t, v] = sample(truth, 4.0, 300, 0.0, nullptr);
    const DampedCosineFit fit = fit_damped_cosine(t, v);
    CHECK(std::abs(fit.g1_MHz - truth.g1_MHz) / truth.g1_MHz < 1e-3);
    CHECK(std::abs(fit.kappa1_per_us - truth.kappa1_per_us) /
              truth.kappa1_per_us <
          1e-3);
    CHECK(std::abs(fit.kappa_phi_per_us - truth.kappa_phi_per_us) /
              truth.kappa_phi_per_us <
          1e-3);
    CHECK(std::abs(fit.amplitude - truth.amplitude) / truth.amplitude < 1e-3);
  }

  SUBCASE("pure cosine frequency recovery") {
    truth.kappa1_per_us = 0.0;
    truth.kappa_phi_per_us = 0.0;
    const auto [t, v] = sample(truth, 3.0, 120, 0.0, nullptr);
    const DampedCosineFit fit = fit_damped_cosine(t, v);
    CHECK(std::abs(fit.g1_MHz - truth.g1_MHz) / truth.g1_MHz < 1e-4);
  }

  SUBCASE("median error under gaussian noise over many seeds") {
    truth.kappa1_per_us = 1.0 / 94.0;
    truth.kappa_phi_per_us = 1.0 / 28.0;
    std::vector<double> errors;
    for (int seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      const auto [t, v] = sample(truth, 4.0, 200, 0.02, &rng);
      const DampedCosineFit fit = fit_damped_cosine(t, v);
      errors.push_back(std::abs(fit.g1_MHz - truth.g1_MHz) / truth.g1_MHz);
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[50] < 0.01);
  }

  SUBCASE("round trip through its own forward model") {
    truth.kappa1_per_us = 0.02;
    truth.kappa_phi_per_us = 0.05;
    truth.phi0_rad = 0.4;
    const auto [t, v] = sample(truth, 5.0, 250, 0.0, nullptr);
    const DampedCosineFit fit = fit_damped_cosine(t, v);
    for (double tt : {0.3, 1.7, 4.2}) {
      CHECK(fit.evaluate(tt) == doctest::Approx(truth.evaluate(tt)).epsilon(1e-6));
    }
  }

  SUBCASE("degenerate input is rejected") {
    std::vector<double> t(20), v(20, 0.7);
    for (int i = 0; i < 20; ++i) t[i] = i * 0.1;
    CHECK_THROWS_AS(fit_damped_cosine(t, v), std::invalid_argument);
    CHECK_THROWS_AS(fit_damped_cosine({0, 1, 2}, {0.1, 0.2, 0.3}),
                    std::invalid_argument);
  }
}
