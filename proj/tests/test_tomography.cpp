#include <doctest.h>

#include <cmath>

#include "crosskerr/tomography.hpp"
#include "test_support.hpp"

using namespace crosskerr;

TEST_CASE("hermitian parameterization round trip") {
  std::mt19937_64 rng(2);
  Matrix m = test_support::ginibre(4, rng);
  m = (0.5 * (m + m.adjoint())).eval();
  const Eigen::VectorXd y = hermitian_to_params(m);
  CHECK((params_to_hermitian(y, 4) - m).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("displaced projector matches the closed-form overlaps") {
  const Complex alpha(0.5, -0.2);
  const Matrix p = displaced_projector(4, alpha, 1);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Complex expected =
          test_support::displaced_fock_element(i, 1, alpha) *
          std::conj(test_support::displaced_fock_element(j, 1, alpha));
      CHECK(std::abs(p(i, j) - expected) < 1e-9);
    }
  }
}

TEST_CASE("measurement probabilities") {
  const ModeSystem sys({{"a", 2}, {"b", 2}});
  const DensityMatrix vac = basis_state(sys, {0, 0});

  CHECK(measurement_probability(vac, {0.0, 0.0}, {0, 0}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(measurement_probability(vac, {0.0, 0.0}, {1, 1}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // |1><1| x |0><0| probed at (0.5, 0): closed-form displaced-Fock overlap.
  const DensityMatrix one = basis_state(sys, {1, 0});
  const double expected =
      std::norm(test_support::displaced_fock_element(1, 1, Complex(0.5, 0)));
  CHECK(measurement_probability(one, {Complex(0.5, 0), 0.0}, {1, 0}) ==
        doctest::Approx(expected).epsilon(1e-9));

  const Eigen::Vector4d dist =
      measurement_outcome_distribution(one, {Complex(0.5, 0), 0.0}, {1, 0});
  CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dist.minCoeff() > -1e-12);
}

TEST_CASE("optimized plans beat random ones") {
  std::vector<double> optimized, random;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DisplacementPlan plan = optimize_displacements(2, 25, seed);
    optimized.push_back(build_measurement_matrix(plan).sigma_min);
    CHECK(build_measurement_matrix(plan).full_rank());

    std::mt19937_64 rng(seed * 7919 + 13);
    DisplacementPlan rnd = plan;
    for (auto& a : rnd.alphas_a) {
      a = 0.8 * Complex(test_support::normal_draw(rng),
                        test_support::normal_draw(rng));
    }
    for (auto& a : rnd.alphas_b) {
      a = 0.8 * Complex(test_support::normal_draw(rng),
                        test_support::normal_draw(rng));
    }
    random.push_back(build_measurement_matrix(rnd).sigma_min);
  }
  std::sort(optimized.begin(), optimized.end());
  std::sort(random.begin(), random.end());
  CHECK(optimized[10] > random[10]);  // median comparison

  SUBCASE("determinism under a fixed seed") {
    const DisplacementPlan p1 = optimize_displacements(2, 25, 42);
    const DisplacementPlan p2 = optimize_displacements(2, 25, 42);
    for (std::size_t i = 0; i < p1.alphas_a.size(); ++i) {
      CHECK(p1.alphas_a[i] == p2.alphas_a[i]);
    }
  }
  SUBCASE("non-square plan size is rejected") {
    CHECK_THROWS_AS(optimize_displacements(2, 24, 0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_displacements(3, 25, 0), std::invalid_argument);
  }
}

TEST_CASE("noiseless inversion recovers the state exactly") {
  const DisplacementPlan plan = optimize_displacements(2, 25, 7);
  std::mt19937_64 rng(9);
  const DensityMatrix rho =
      test_support::random_state(plan.reconstruction_system(), rng);
  const DensityMatrix rec = linear_inversion(exact_probabilities(rho, plan), plan);
  CHECK((rec.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("corrupted counts can go unphysical; refinement restores physicality") {
  const DisplacementPlan plan = optimize_displacements(2, 25, 7);
  std::mt19937_64 rng(10);
  const DensityMatrix rho =
      test_support::random_state(plan.reconstruction_system(), rng);
  std::vector<double> probs = exact_probabilities(rho, plan);
  probs[3] = std::min(1.0, probs[3] + 0.25);  // single corrupted record

  const DensityMatrix ls = linear_inversion(probs, plan);
  CHECK(ls.min_eigenvalue() < -1e-4);  // the failure mode refinement exists for
  CHECK((ls.matrix() - ls.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  const PosteriorSummary post = bayesian_refine(ls, 25 * 500, 256, 32, 5);
  CHECK(post.rho_bme.is_physical());
  CHECK(post.acceptance_rate > 0.05);
  CHECK(post.acceptance_rate < 0.9);
}

TEST_CASE("posterior concentrates on a physical least-squares point") {
  const DisplacementPlan plan = optimize_displacements(2, 25, 3);
  std::mt19937_64 rng(11);
  const DensityMatrix rho =
      test_support::random_state(plan.reconstruction_system(), rng);
  const PosteriorSummary post = bayesian_refine(rho, 1e9, 512, 32, 17);
  CHECK((post.rho_bme.matrix() - rho.matrix()).norm() < 1e-3);
}

TEST_CASE("weak data pulls the estimate toward the flat prior mean") {
  const ModeSystem two({{"a", 2}, {"b", 2}});
  const DensityMatrix mixed(two, 0.25 * Matrix::Identity(4, 4));
  const PosteriorSummary post = bayesian_refine(mixed, 1e-3, 256, 16, 23);
  CHECK(post.rho_bme.is_physical());
  // No usable data: stays in the bulk of the prior, far from any pure state.
  CHECK(post.rho_bme.purity() < 0.6);
}

TEST_CASE("estimator variance shrinks with more retained samples") {
  const DisplacementPlan plan = optimize_displacements(2, 25, 3);
  std::mt19937_64 rng(12);
  const DensityMatrix rho =
      test_support::random_state(plan.reconstruction_system(), rng);
  auto spread = [&](int retained) {
    std::vector<Matrix> means;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      means.push_back(
          bayesian_refine(rho, 2e4, retained, 16, 100 + seed).rho_bme.matrix());
    }
    double s = 0.0;
    for (std::size_t i = 1; i < means.size(); ++i) {
      s += (means[i] - means[0]).norm();
    }
    return s;
  };
  CHECK(spread(1024) < spread(64));
}

TEST_CASE("confusion matrices") {
  const Eigen::Matrix2d ca = alice_confusion();

  SUBCASE("identity confusion is a no-op") {
    const auto out = apply_confusion({0.3, 0.7}, Eigen::Matrix2d::Identity(),
                                     ConfusionDirection::kForward);
    CHECK(out[0] == doctest::Approx(0.3));
    CHECK(out[1] == doctest::Approx(0.7));
  }
  SUBCASE("ideal excited outcome through the measured matrix") {
    const auto out =
        apply_confusion({0.0, 1.0}, ca, ConfusionDirection::kForward);
    CHECK(out[0] == doctest::Approx(0.028));
    CHECK(out[1] == doctest::Approx(0.972));
  }
  SUBCASE("forward then inverse is the identity") {
    const auto fwd =
        apply_confusion({0.41, 0.59}, ca, ConfusionDirection::kForward);
    const auto back = apply_confusion(fwd, ca, ConfusionDirection::kInverse);
    CHECK(back[0] == doctest::Approx(0.41).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(0.59).epsilon(1e-12));

    Eigen::Vector4d p(0.1, 0.2, 0.3, 0.4);
    const Eigen::Vector4d round = apply_confusion_joint(
        apply_confusion_joint(p, ca, bob_confusion(),
                              ConfusionDirection::kForward),
        ca, bob_confusion(), ConfusionDirection::kInverse);
    CHECK((round - p).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("bad rows are rejected") {
    Eigen::Matrix2d bad;
    bad << 0.9, 0.2, 0.1, 0.9;
    CHECK_THROWS_AS(
        apply_confusion({0.5, 0.5}, bad, ConfusionDirection::kForward),
        std::invalid_argument);
  }
}

TEST_CASE("finite-statistics round trip keeps good fidelity") {
  const DisplacementPlan plan = optimize_displacements(2, 25, 1);
  std::mt19937_64 rng(31);
  const DensityMatrix rho =
      test_support::random_state(plan.reconstruction_system(), rng);
  const auto probs = simulate_measurement(
      rho, plan, 2000, std::make_pair(alice_confusion(), bob_confusion()), 77);
  const DensityMatrix ls = linear_inversion(probs, plan);
  const PosteriorSummary post = bayesian_refine(ls, 2000.0 * plan.size(), 512, 64, 7);
  CHECK(post.rho_bme.is_physical());
  CHECK(uhlmann_fidelity(post.rho_bme, rho) > 0.9);
}
