#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hyq/example_models.hpp"
#include "hyq/propagation.hpp"
#include "hyq/states.hpp"
#include "test_support.hpp"

using namespace hyq;
using hyq_test::random_valid_model;
using hyq_test::random_vector;

TEST_CASE("propagator basics") {
  CHECK((propagator(Mat::Zero(3, 3), 2.7) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CounterRng rng(21, 0, 0);
  const Mat Z = hyq_test::random_matrix(rng, 4, 4);
  for (int i = 0; i < 10; ++i) {
    const double t = rng.uniform() * 2.0, s = rng.uniform() * 2.0;
    CHECK((propagator(Z, t + s) - propagator(Z, t) * propagator(Z, s)).cwiseAbs().maxCoeff() <
          1e-12 * propagator(Z, t + s).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("capital_psi: constant drift limit") {
  CounterRng rng(22, 0, 0);
  const Dims dims = make_dims(1, 1);
  auto model = random_valid_model(rng, 1, 1);
  // Rebuild with Z = 0: the integrand is constant, Psi_t = t psi.
  model = HybridModel::build(dims, Mat::Zero(3, 3), model.triplet);
  for (int i = 0; i < 5; ++i) {
    const Vec xi = random_vector(rng, 3, 2.0);
    const double t = 0.3 + rng.uniform();
    CHECK(hyq_test::cdist(capital_psi(model, t, xi), t * model.psi(xi)) < 1e-11);
  }
}

TEST_CASE("capital_psi: semigroup identity on random models") {
  CounterRng rng(23, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_valid_model(rng, 1, trial % 3);
    const Vec xi = random_vector(rng, model.dims.d, 2.0);
    const double t = 0.2 + rng.uniform(), s = 0.2 + rng.uniform();
    const cplx whole = capital_psi(model, t + s, xi);
    const cplx split =
        capital_psi(model, t, xi) + capital_psi(model, s, propagator(model.Z, t) * xi);
    CHECK(hyq_test::cdist(whole, split) <= 1e-8 * (1.0 + std::abs(whole)));
  }
}

TEST_CASE("capital_psi: exact zero at the origin and at t = 0") {
  CounterRng rng(24, 0, 0);
  const auto model = random_valid_model(rng, 1, 1);
  CHECK(capital_psi(model, 1.3, Vec::Zero(3)) == cplx(0.0, 0.0));
  CHECK(capital_psi(model, 0.0, random_vector(rng, 3)) == cplx(0.0, 0.0));
}

TEST_CASE("noise function is a characteristic function") {
  CounterRng rng(25, 0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = random_valid_model(rng, 1, 1);
    const Vec xi = random_vector(rng, 3, 2.0);
    const double t = rng.uniform() * 2.0;
    const cplx f = noise_function(model, t, xi);
    CHECK(std::abs(f) <= 1.0 + 1e-12);
    CHECK(hyq_test::cdist(noise_function(model, t, -xi), std::conj(f)) < 1e-12);
    CHECK(noise_function(model, 0.0, xi) == cplx(1.0, 0.0));
    CHECK(capital_psi(model, t, xi).real() <= 1e-12);
  }
}

TEST_CASE("pure Gaussian noise function against the covariance integral") {
  // Independent route: A_t and the drift integral evaluated by plain
  // Simpson refinement, then exponentiated.
  CounterRng rng(26, 0, 0);
  const auto base = random_valid_model(rng, 1, 1, /*with_jumps=*/false);
  const double t = 1.3;
  auto simpson = [&](auto&& f, int n) {
    auto acc = (0.0 * f(0.0)).eval();
    const double h = t / n;
    for (int i = 0; i < n; ++i) {
      const double a = i * h;
      acc += (h / 6.0) * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    return acc;
  };
  const Mat At = simpson(
      [&](double tau) {
        const Mat S = propagator(base.Z, tau);
        return Mat(S.transpose() * base.triplet.A * S);
      },
      4000);
  const Vec at = simpson(
      [&](double tau) { return Vec(propagator(base.Z, tau).transpose() * base.triplet.alpha); },
      4000);
  for (int i = 0; i < 5; ++i) {
    const Vec xi = random_vector(rng, 3, 2.0);
    const cplx expected = std::exp(cplx(-0.5 * xi.dot(At * xi), at.dot(xi)));
    CHECK(hyq_test::cdist(noise_function(base, t, xi), expected) < 1e-9);
  }
  CHECK((gaussian_cov_integral(base, t) - At).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("evolve_cf") {
  CounterRng rng(27, 0, 0);
  const auto model = random_valid_model(rng, 1, 1, /*with_jumps=*/false);
  GaussianHybridState state;
  state.mean = random_vector(rng, 3, 0.5);
  Mat G = hyq_test::random_matrix(rng, 3, 3, 0.4);
  state.cov = G * G.transpose() + Mat::Identity(3, 3);
  const CfFn chi0 = gaussian_cf_fn(state);

  SUBCASE("t = 0 returns the initial CF, normalization exact") {
    const Vec xi = random_vector(rng, 3, 1.5);
    CHECK(hyq_test::cdist(evolve_cf(model, chi0, 0.0, xi), chi0(xi)) == 0.0);
    CHECK(evolve_cf(model, chi0, 1.7, Vec::Zero(3)) == cplx(1.0, 0.0));
  }
  SUBCASE("Gaussian pushforward: mean and covariance transport") {
    const double t = 0.9;
    const Mat St = propagator(model.Z, t);
    const Mat cov_t = St.transpose() * state.cov * St + gaussian_cov_integral(model, t);
    const Vec mean_t = St.transpose() * state.mean + drift_integral(model, t, model.triplet.alpha);
    for (int i = 0; i < 5; ++i) {
      const Vec xi = random_vector(rng, 3, 1.5);
      const cplx expected = std::exp(cplx(-0.5 * xi.dot(cov_t * xi), mean_t.dot(xi)));
      CHECK(hyq_test::cdist(evolve_cf(model, chi0, t, xi), expected) < 1e-9);
    }
  }
}

TEST_CASE("Liouville transport: conservative noiseless classical flow") {
  // s = 2 with one canonical pair; the conservation constraints reduce to a
  // trace-free Z00, under which det S_t = 1 and the density is transported.
  const Dims dims = make_dims(0, 2);
  Mat Z(2, 2);
  Z << 0.4, 1.1, -0.7, -0.4;
  CHECK(std::abs(Z.trace()) == 0.0);
  Vec alpha(2);
  alpha << 0.3, -0.2;
  const auto model = HybridModel::build(dims, Z, GeneratingTriplet{Mat::Zero(2, 2), {}, alpha});
  const double t = 1.4;
  const Mat St = propagator(model.Z, t);
  CHECK(std::abs(St.determinant() - 1.0) < 1e-12);

  GaussianHybridState p0;
  p0.mean = Vec::Zero(2);
  p0.cov = Mat::Identity(2, 2);
  const CfFn p0_cf = gaussian_cf_fn(p0);
  CounterRng rng(28, 0, 0);
  for (int i = 0; i < 10; ++i) {
    const Vec k = random_vector(rng, 2, 2.0);
    const cplx phase = std::exp(cplx(0.0, drift_integral(model, t, alpha).dot(k)));
    CHECK(hyq_test::cdist(evolve_cf(model, p0_cf, t, k), phase * p0_cf(St * k)) < 1e-10);
  }
}

TEST_CASE("equilibrium") {
  SUBCASE("classical oscillator Gaussian part") {
    examples::ClassicalOscillatorParams p;
    const auto model = examples::build_classical_oscillator(p);
    const Mat a_inf = equilibrium_gaussian_cov(model);
    CHECK((a_inf - examples::classical_oscillator_equilibrium_cov(p)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("independence of the initial state") {
    const auto model = examples::build_optomechanical({});
    GaussianHybridState s1{Vec::Zero(2), 0.5 * Mat::Identity(2, 2)};
    Vec m2(2);
    m2 << 1.5, -0.7;
    GaussianHybridState s2{m2, 2.0 * Mat::Identity(2, 2)};
    const double T = 150.0;  // gamma/2 envelope: |S_T| ~ 2e-10, well under tolerance
    CounterRng rng(29, 0, 0);
    for (int i = 0; i < 5; ++i) {
      const Vec zeta = random_vector(rng, 2, 1.5);
      const cplx a = evolve_cf(model, gaussian_cf_fn(s1), T, zeta);
      const cplx b = evolve_cf(model, gaussian_cf_fn(s2), T, zeta);
      const cplx eq = equilibrium_cf(model, zeta);
      CHECK(hyq_test::cdist(a, b) < 1e-6);
      CHECK(hyq_test::cdist(a, eq) < 1e-6);
    }
  }
  SUBCASE("direction-wise decay in a non-contracting model") {
    const auto model = examples::build_quantum_boltzmann({});
    Vec momentum_probe = Vec::Zero(6);
    momentum_probe(4) = 1.0;
    const auto val = equilibrium_psi(model, momentum_probe);  // decays: fine
    CHECK(std::isfinite(val.psi_inf.real()));
    Vec position_probe = Vec::Zero(6);
    position_probe(0) = 1.0;  // transported into a conserved direction
    CHECK_THROWS_AS(equilibrium_psi(model, position_probe), NoEquilibriumError);
  }
  SUBCASE("undamped oscillator is refused") {
    const Dims dims = make_dims(1, 0);
    Mat Z(2, 2);
    Z << 0, -1, 1, 0;  // purely imaginary spectrum
    const auto model =
        HybridModel::build(dims, Z, GeneratingTriplet{0.5 * Mat::Identity(2, 2), {}, Vec::Zero(2)});
    CHECK_THROWS_AS(equilibrium_psi(model, Vec::Ones(2)), NoEquilibriumError);
  }
}

TEST_CASE("mean evolution") {
  SUBCASE("zero drift, no jumps") {
    const Dims dims = make_dims(1, 0);
    Vec alpha(2);
    alpha << 0.4, -0.1;
    const auto model =
        HybridModel::build(dims, Mat::Zero(2, 2), GeneratingTriplet{Mat::Identity(2, 2), {}, alpha});
    Vec m0(2);
    m0 << 1.0, 2.0;
    const Vec m = mean_evolution(model, m0, 2.5);
    CHECK((m - (m0 + 2.5 * alpha)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("closed form against RK4 of the moment ODE") {
    CounterRng rng(30, 0, 0);
    for (int trial = 0; trial < 5; ++trial) {
      const auto model = random_valid_model(rng, 1, 1);
      const Vec m0 = random_vector(rng, 3);
      const double t = 1.7;
      const Vec direct = mean_evolution(model, m0, t);
      const Vec ode = hyq_test::rk4(
          [&](double, const Vec& m) { return mean_evolution_rhs(model, m); }, m0, 0.0, t, 4000);
      CHECK((direct - ode).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("jump force feeds only the momentum of the classical oscillator") {
    examples::ClassicalOscillatorParams p;
    p.momentum_nodes = {{0.6, 0.5}, {-1.4, 0.2}};
    const auto model = examples::build_classical_oscillator(p);
    const Vec beta = model.beta_tilde();
    CHECK(beta(0) == 0.0);
    CHECK(beta(1) == doctest::Approx(0.5 * 0.6 + 0.2 * -1.4));
  }
}

TEST_CASE("generator symbol") {
  CounterRng rng(31, 0, 0);
  SUBCASE("exact for frozen transport") {
    const Dims dims = make_dims(1, 0);
    const auto base = random_valid_model(rng, 1, 0);
    const auto model = HybridModel::build(dims, Mat::Zero(2, 2), base.triplet);
    const Vec xi = random_vector(rng, 2, 2.0);
    CHECK(hyq_test::cdist(generator_symbol(model, xi), model.psi(xi)) == 0.0);
    CHECK(generator_symbol(model, Vec::Zero(2)) == cplx(0.0, 0.0));
  }
  SUBCASE("first-order convergence of the difference quotient") {
    const auto model = random_valid_model(rng, 1, 1);
    const Vec xi = random_vector(rng, 3, 2.0);
    const cplx psi = model.psi(xi);
    const double e3 = std::abs(capital_psi(model, 1e-3, xi) / 1e-3 - psi);
    const double e4 = std::abs(capital_psi(model, 1e-4, xi) / 1e-4 - psi);
    CHECK(e4 < 0.2 * e3);  // ~ linear decay in h
    CHECK_NOTHROW(generator_symbol(model, xi));
  }
}

TEST_CASE("accumulated Gaussian covariance stays admissible") {
  CounterRng rng(32, 0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = random_valid_model(rng, 1, trial % 2);
    const double t = 0.3 + 2.0 * rng.uniform();
    const Mat At = gaussian_cov_integral(model, t);
    const Mat St = propagator(model.Z, t);
    const Mat twist = 0.5 * (St.transpose() * model.sigma * St - model.sigma);
    for (double sign : {1.0, -1.0}) {
      Eigen::SelfAdjointEigenSolver<CMat> es(At.cast<cplx>() + sign * kI * twist.cast<cplx>(),
                                             Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("twisted positive definiteness of a propagated Gaussian state") {
  CounterRng rng(33, 0, 0);
  const auto model = random_valid_model(rng, 1, 1);
  GaussianHybridState state;
  state.mean = Vec::Zero(3);
  state.cov = Mat::Identity(3, 3);
  // Quantum-admissible by construction (cov >= sigma/2 spectrally).
  const double t = 0.8;
  const CfFn chi_t = [&](const Vec& xi) { return evolve_cf(model, gaussian_cf_fn(state), t, xi); };
  std::vector<Vec> points;
  for (int i = 0; i < 6; ++i) points.push_back(random_vector(rng, 3, 1.2));
  CHECK(state_cf_psd_diagnostic(chi_t, model.sigma, points) >= -1e-8);
}

TEST_CASE("FrozenPsi agrees with the adaptive evaluation") {
  CounterRng rng(34, 0, 0);
  const auto model = random_valid_model(rng, 1, 2);
  const double t = 1.1;
  std::vector<Vec> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(random_vector(rng, 5, 3.0));
  const FrozenPsi frozen(model, t, probes);
  for (int i = 0; i < 10; ++i) {
    const Vec xi = random_vector(rng, 5, 2.5);
    CHECK(hyq_test::cdist(frozen(xi), capital_psi(model, t, xi)) < 1e-8);
  }
}
