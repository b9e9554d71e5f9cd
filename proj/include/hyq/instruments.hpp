#pragma once

#include "hyq/propagation.hpp"
#include "hyq/states.hpp"

namespace hyq {

/// Action of the characteristic operator on a Weyl operator: the image is
/// coefficient * exp(i x . x_phase) * W_1(out_zeta) at classical point x.
struct WeylAction {
  cplx coefficient;
  Vec out_zeta;  // 2n-vector
  Vec x_phase;   // s-vector
};

/// Gamma_t(k|x)[W_1(zeta)] = e^{Psi_t(xi)} W(S_t xi)(x), xi = (zeta, k).
WeylAction characteristic_operator(const HybridModel& model, double t, const Vec& k,
                                   const Vec& zeta, const QuadratureSettings& settings = {});

/// Joint characteristic function of the observed classical component at the
/// times t_1 < ... < t_m (probes k_l), together with a final Weyl probe zeta,
/// closed against a Gaussian initial hybrid state. Backward recursion
/// xi_m = (zeta, k_m), xi_l = S_{t_{l+1}-t_l} xi_{l+1} + P0 k_l; the result is
/// exp(sum_l Psi_{t_l-t_{l-1}}(xi_l)) chi_0(S_{t_1} xi_1). t_1 = 0 is allowed
/// (instantaneous first probe, Psi_0 = 0).
cplx multi_time_cf(const HybridModel& model, const GaussianHybridState& initial,
                   const std::vector<double>& times, const std::vector<Vec>& ks, const Vec& zeta,
                   const QuadratureSettings& settings = {});

/// Axis-aligned box in the classical outcome space.
struct Box {
  Vec lo;
  Vec hi;
};

Box make_box(Vec lo, Vec hi);

/// Settings of the k-integration grid used for box probabilities.
struct KGridSettings {
  int count = 128;      // points per axis (even)
  double radius = 16.0; // grid covers [-radius, radius) per axis
};

struct ConditionalProbability {
  double probability = 0.0;  // clamped to [0, 1]
  double raw = 0.0;          // unclamped quadrature value
  double aliasing = 0.0;     // CF magnitude at the k-grid edge
};

/// P_t(E|x) for an initial quantum Gaussian state: Fourier inversion over k
/// of e^{Psi_t(P0 k) + i x . P0 S_t P0 k} chi_rho0(P1 S_t P0 k), integrated
/// over the box in closed form per axis.
ConditionalProbability conditional_probability(const HybridModel& model,
                                               const GaussianHybridState& rho0_quantum, double t,
                                               const Box& box, const Vec& x,
                                               const KGridSettings& grid = {},
                                               const QuadratureSettings& settings = {});

/// Characteristic function of the quantum state conditional on observing the
/// classical increment in the box; equals 1 at zeta = 0 up to quadrature.
cplx conditional_state_cf(const HybridModel& model, const GaussianHybridState& rho0_quantum,
                          double t, const Box& box, const Vec& x, const Vec& zeta,
                          const KGridSettings& grid = {}, const QuadratureSettings& settings = {},
                          double probability_floor = 1e-8);

/// Residual of the instrument composition law: applying the recursion with an
/// intermediate time and zero intermediate probe must reproduce the one-step
/// action at t + t'. Returns the max deviation over the probe set.
double composition_check(const HybridModel& model, double t, double tprime,
                         const std::vector<Vec>& k_probes, const Vec& zeta,
                         const QuadratureSettings& settings = {});

}  // namespace hyq
