#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyq/example_models.hpp"
#include "hyq/instruments.hpp"
#include "test_support.hpp"

using namespace hyq;
using hyq_test::random_valid_model;
using hyq_test::random_vector;

namespace {

GaussianHybridState product_state(const Dims& dims) {
  GaussianHybridState st;
  st.mean = Vec::Zero(dims.d);
  st.cov = Mat::Identity(dims.d, dims.d);
  return st;
}

}  // namespace

TEST_CASE("characteristic operator") {
  const auto model = examples::build_hybrid_opto({});
  CounterRng rng(61, 0, 0);
  SUBCASE("t = 0 is the identity action") {
    const Vec k = random_vector(rng, 2), zeta = random_vector(rng, 2);
    const auto action = characteristic_operator(model, 0.0, k, zeta);
    CHECK(action.coefficient == cplx(1.0, 0.0));
    CHECK((action.out_zeta - zeta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((action.x_phase - k).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("k = 0 reduces to the quasi-free quantum action") {
    const Vec zeta = random_vector(rng, 2);
    const double t = 0.8;
    const auto action = characteristic_operator(model, t, Vec::Zero(2), zeta);
    const Vec xi = embed_quantum(model.dims, zeta);
    CHECK(hyq_test::cdist(action.coefficient, noise_function(model, t, xi)) < 1e-12);
    const Vec pushed = propagator(model.Z, t) * xi;
    CHECK((action.out_zeta - pushed.head(2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("output probe matches the closed-form flow") {
    examples::HybridOptoParams p;
    const double kappa = 0.9;
    Vec k(2);
    k << 0.0, kappa;
    for (double t : {0.3, 1.1, 2.6}) {
      const auto action = characteristic_operator(model, t, k, Vec::Zero(2));
      const Vec flow = examples::hybrid_opto_flow(p, t, (Vec(4) << 0, 0, 0, kappa).finished());
      CHECK((action.out_zeta - flow.head(2)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((action.x_phase - flow.tail(2)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("input-noise probes never touch the quantum block") {
    // The first classical coordinate evolves autonomously.
    Vec k(2);
    k << 1.3, 0.0;
    for (double t : {0.5, 2.0, 7.0}) {
      const auto action = characteristic_operator(model, t, k, Vec::Zero(2));
      CHECK(action.out_zeta.cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(std::abs(action.x_phase(1)) <= 1e-12);
    }
  }
}

TEST_CASE("multi-time CF") {
  const auto model = examples::build_hybrid_opto({});
  const auto initial = product_state(model.dims);
  CounterRng rng(62, 0, 0);

  SUBCASE("single time agrees with evolve_cf") {
    const Vec k = random_vector(rng, 2), zeta = random_vector(rng, 2);
    const double t = 0.9;
    Vec xi(4);
    xi << zeta(0), zeta(1), k(0), k(1);
    const cplx via_instrument = multi_time_cf(model, initial, {{t}}, {{k}}, zeta);
    const cplx direct = evolve_cf(model, gaussian_cf_fn(initial), t, xi);
    CHECK(hyq_test::cdist(via_instrument, direct) < 1e-11);
  }
  SUBCASE("normalization and hermitian symmetry") {
    const std::vector<double> times{0.4, 1.0, 1.7};
    const std::vector<Vec> zeros(3, Vec::Zero(2));
    CHECK(multi_time_cf(model, initial, times, zeros, Vec::Zero(2)) == cplx(1.0, 0.0));
    std::vector<Vec> ks, neg;
    for (int i = 0; i < 3; ++i) {
      ks.push_back(random_vector(rng, 2));
      neg.push_back(-ks.back());
    }
    const Vec zeta = random_vector(rng, 2);
    const cplx a = multi_time_cf(model, initial, times, ks, zeta);
    const cplx b = multi_time_cf(model, initial, times, neg, -zeta);
    CHECK(hyq_test::cdist(b, std::conj(a)) < 1e-12);
  }
  SUBCASE("marginal consistency: zero probes drop out") {
    const Vec k1 = random_vector(rng, 2), k2 = random_vector(rng, 2);
    const double t1 = 0.6, t2 = 1.4;
    const cplx both_k2_zero =
        multi_time_cf(model, initial, {{t1, t2}}, {{k1, Vec::Zero(2)}}, Vec::Zero(2));
    const cplx single_t1 = multi_time_cf(model, initial, {{t1}}, {{k1}}, Vec::Zero(2));
    CHECK(hyq_test::cdist(both_k2_zero, single_t1) < 1e-10);

    const Vec zeta = random_vector(rng, 2);
    const cplx k1_zero = multi_time_cf(model, initial, {{t1, t2}}, {{Vec::Zero(2), k2}}, zeta);
    const cplx single_t2 = multi_time_cf(model, initial, {{t2}}, {{k2}}, zeta);
    CHECK(hyq_test::cdist(k1_zero, single_t2) < 1e-10);

    // Middle probe dropped from a three-time function.
    const Vec k3 = random_vector(rng, 2);
    const cplx middle_zero = multi_time_cf(model, initial, {{t1, 1.0, t2}},
                                           {{k1, Vec::Zero(2), k3}}, zeta);
    const cplx two_times = multi_time_cf(model, initial, {{t1, t2}}, {{k1, k3}}, zeta);
    CHECK(hyq_test::cdist(middle_zero, two_times) < 1e-10);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(multi_time_cf(model, initial, {{1.0, 0.5}},
                                  {{Vec::Zero(2), Vec::Zero(2)}}, Vec::Zero(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(multi_time_cf(model, initial, {{-0.1}}, {{Vec::Zero(2)}}, Vec::Zero(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("instrument composition law") {
  CounterRng rng(63, 0, 0);
  SUBCASE("random valid models") {
    for (int trial = 0; trial < 5; ++trial) {
      const auto model = random_valid_model(rng, 1, 1);
      std::vector<Vec> probes;
      for (int i = 0; i < 4; ++i) probes.push_back(random_vector(rng, 1, 2.0));
      CHECK(composition_check(model, 0.7, 0.5, probes, random_vector(rng, 2)) <= 1e-9);
    }
  }
  SUBCASE("degenerate cases are exact") {
    const auto model = examples::build_hybrid_opto({});
    std::vector<Vec> probes{(Vec(2) << 0.5, -1.0).finished()};
    CHECK(composition_check(model, 0.9, 0.0, probes, Vec::Zero(2)) < 1e-12);
    const Dims dims = make_dims(1, 0);
    const auto trivial =
        HybridModel::build(dims, Mat::Zero(2, 2), GeneratingTriplet{Mat::Zero(2, 2), {}, Vec::Zero(2)});
    std::vector<Vec> empty_probe{Vec::Zero(0)};
    CHECK(composition_check(trivial, 1.0, 2.0, empty_probe, (Vec(2) << 1.0, 0.5).finished()) ==
          0.0);
  }
}

TEST_CASE("conditional probability") {
  const auto model = examples::build_hybrid_opto({});
  GaussianHybridState rho0{Vec::Zero(2), 0.5 * Mat::Identity(2, 2)};
  const double t = 0.8;
  const Vec x = Vec::Zero(2);

  SUBCASE("a box covering the law is certain") {
    const Box huge = make_box((Vec(2) << -6.0, -6.0).finished(), (Vec(2) << 6.0, 6.0).finished());
    const auto p = conditional_probability(model, rho0, t, huge, x);
    CHECK(std::abs(p.raw - 1.0) < 1e-6);
    CHECK(p.probability == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("short times concentrate on the start point") {
    const Box around = make_box((Vec(2) << -0.5, -0.5).finished(), (Vec(2) << 0.5, 0.5).finished());
    KGridSettings grid;
    grid.count = 512;
    grid.radius = 100.0;
    const auto p = conditional_probability(model, rho0, 0.01, around, x, grid);
    CHECK(p.probability > 0.99);
  }
  SUBCASE("probabilities live in [0, 1] and complements add up") {
    const Box left = make_box((Vec(2) << -6.0, -6.0).finished(), (Vec(2) << 0.0, 6.0).finished());
    const Box right = make_box((Vec(2) << 0.0, -6.0).finished(), (Vec(2) << 6.0, 6.0).finished());
    const auto pl = conditional_probability(model, rho0, t, left, x);
    const auto pr = conditional_probability(model, rho0, t, right, x);
    CHECK(pl.probability >= 0.0);
    CHECK(pl.probability <= 1.0);
    CHECK(std::abs(pl.raw + pr.raw - 1.0) < 1e-6);
  }
  SUBCASE("decoupled dynamics ignores the quantum state") {
    examples::HybridOptoParams p;
    p.g = 0.0;   // no information flow to the classical component
    p.A24 = 0.0;
    const auto decoupled = examples::build_hybrid_opto(p);
    const Box box = make_box((Vec(2) << -1.0, -1.0).finished(), (Vec(2) << 1.0, 0.6).finished());
    GaussianHybridState other{(Vec(2) << 2.0, -1.0).finished(), 3.0 * Mat::Identity(2, 2)};
    const auto pa = conditional_probability(decoupled, rho0, t, box, x);
    const auto pb = conditional_probability(decoupled, other, t, box, x);
    CHECK(std::abs(pa.raw - pb.raw) < 1e-10);
  }
}

TEST_CASE("conditional state CF") {
  const auto model = examples::build_hybrid_opto({});
  GaussianHybridState rho0{(Vec(2) << 0.4, -0.1).finished(), 0.6 * Mat::Identity(2, 2)};
  const double t = 0.7;
  const Vec x = (Vec(2) << 0.2, 0.0).finished();
  CounterRng rng(64, 0, 0);

  SUBCASE("normalized at zeta = 0") {
    const Box box = make_box((Vec(2) << -1.0, -0.8).finished(), (Vec(2) << 0.9, 1.1).finished());
    CHECK(hyq_test::cdist(conditional_state_cf(model, rho0, t, box, x, Vec::Zero(2)),
                          cplx(1.0, 0.0)) < 1e-10);
  }
  SUBCASE("a huge box recovers the unconditional quantum marginal") {
    const Box huge = make_box((Vec(2) << -6.0, -6.0).finished(), (Vec(2) << 6.0, 6.0).finished());
    // Unconditional: evolve the product initial state delta_x (x) rho0.
    const CfFn initial_cf = [&](const Vec& xi) {
      return gaussian_cf(rho0, xi.head(2)) * std::polar(1.0, x.dot(xi.tail(2)));
    };
    for (int i = 0; i < 4; ++i) {
      const Vec zeta = random_vector(rng, 2, 1.2);
      const cplx conditioned = conditional_state_cf(model, rho0, t, huge, x, zeta);
      const cplx marginal =
          evolve_cf(model, initial_cf, t, embed_quantum(model.dims, zeta));
      CHECK(hyq_test::cdist(conditioned, marginal) < 1e-6);
    }
  }
  SUBCASE("t = 0 with a box around x returns the initial quantum CF") {
    const Box around = make_box((Vec(2) << -1.0, -1.0).finished(), (Vec(2) << 1.0, 1.0).finished());
    KGridSettings grid;
    grid.count = 512;
    grid.radius = 80.0;
    for (int i = 0; i < 3; ++i) {
      const Vec zeta = random_vector(rng, 2, 1.0);
      const cplx conditioned = conditional_state_cf(model, rho0, 0.0, around, x, zeta, grid);
      CHECK(hyq_test::cdist(conditioned, gaussian_cf(rho0, zeta)) < 1e-4);
    }
  }
  SUBCASE("no information flow: conditioning is irrelevant") {
    examples::HybridOptoParams p;  // fully decoupled: Psi separates in (zeta, k)
    p.g = 0.0;
    p.A24 = 0.0;
    p.b = 0.0;
    const auto decoupled = examples::build_hybrid_opto(p);
    const Box a = make_box((Vec(2) << -0.7, -0.7).finished(), (Vec(2) << 0.7, 0.7).finished());
    const Box b = make_box((Vec(2) << -0.2, 0.0).finished(), (Vec(2) << 1.5, 2.0).finished());
    const Vec zeta = random_vector(rng, 2, 1.0);
    const cplx ca = conditional_state_cf(decoupled, rho0, t, a, x, zeta);
    const cplx cb = conditional_state_cf(decoupled, rho0, t, b, x, zeta);
    CHECK(hyq_test::cdist(ca, cb) < 1e-8);
  }
  SUBCASE("vanishing probability is an error") {
    const Box far = make_box((Vec(2) << 30.0, 30.0).finished(), (Vec(2) << 31.0, 31.0).finished());
    CHECK_THROWS_AS(conditional_state_cf(model, rho0, t, far, x, Vec::Zero(2)),
                    std::runtime_error);
  }
}

TEST_CASE("increment statistics of the observed output") {
  // Two-time CF at t1 = 0, t2 = Delta with probes +-kappa/Delta on the output
  // coordinate: after removing the white-noise factor e^{-A44 kappa^2/2Delta},
  // the limit is the quantum position CF at g kappa, at first order in Delta.
  examples::HybridOptoParams params;
  const auto model = examples::build_hybrid_opto(params);
  GaussianHybridState initial = product_state(model.dims);
  initial.mean(0) = 0.6;  // displaced oscillator makes the limit nontrivial
  const double kappa = 0.8;
  const cplx limit =
      gaussian_cf(initial, (Vec(4) << params.g * kappa, 0.0, 0.0, 0.0).finished());
  auto increment_cf = [&](double delta) {
    Vec k2(2), k1(2);
    k2 << 0.0, kappa / delta;
    k1 << 0.0, -kappa / delta;
    const cplx value =
        multi_time_cf(model, initial, {{0.0, delta}}, {{k1, k2}}, Vec::Zero(2));
    return value * std::exp(params.A44 * kappa * kappa / (2.0 * delta));
  };
  const double e2 = std::abs(increment_cf(1e-2) - limit);
  const double e3 = std::abs(increment_cf(1e-3) - limit);
  const double order = std::log(e2 / e3) / std::log(10.0);
  CHECK(order >= 0.9);  // first-order convergence in Delta
}
