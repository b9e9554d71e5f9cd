#pragma once

#include "hyq/model.hpp"

namespace hyq::examples {

/// Translation/rotation covariant free particle in a noisy medium, n = 3.
/// The rotationally invariant jump measure is approximated by symmetric atom
/// shells (+- pairs on every coordinate axis), which makes all compensator
/// and mean-drift sums cancel exactly by construction.
struct QuantumBoltzmannParams {
  double mass = 1.0;
  double gamma = 0.5;
  double a1 = 0.4;
  double a2 = 0.4;
  double a3 = 0.05;
  struct Shell {
    double radius = 0.0;
    double total_weight = 0.0;
  };
  std::vector<Shell> shells;  // default: no jump component
};
HybridModel build_quantum_boltzmann(const QuantumBoltzmannParams& params);

/// Damped quantum oscillator with momentum kicks, n = 1 (underdamped).
struct OptomechanicalParams {
  double Omega = 1.0;
  double gamma = 0.3;
  double a1 = 0.18;
  double a2 = 0.18;
  double a3 = 0.05;
  std::vector<LineNode> momentum_nodes;  // jump sizes along the P axis
};
HybridModel build_optomechanical(const OptomechanicalParams& params);
/// Closed-form S_t^T of the damped oscillator block (eigenvalue form).
Mat damped_oscillator_propagator_transpose(double Omega, double gamma, double t);

/// Classical damped oscillator with force noise on the momentum only, s = 2.
struct ClassicalOscillatorParams {
  double Omega = 1.0;
  double gamma = 0.4;
  double a22 = 0.8;              // Gaussian force-noise intensity
  double mean_drift = 0.0;       // deterministic force on the momentum
  std::vector<LineNode> momentum_nodes;
};
HybridModel build_classical_oscillator(const ClassicalOscillatorParams& params);
/// Equilibrium Gaussian covariance (a22 / 2 gamma) * I.
Mat classical_oscillator_equilibrium_cov(const ClassicalOscillatorParams& params);

/// Hybrid model: a classical OU coordinate injecting noise into a damped
/// quantum oscillator, whose position drives an observed classical output.
/// n = 1, s = 2, d = 4.
struct HybridOptoParams {
  double Omega = 1.0;
  double gamma = 0.3;
  double c = 0.7;   // relaxation of the classical input noise
  double b = 0.5;   // input-noise -> oscillator coupling
  double g = 0.2;   // oscillator -> output coupling
  // Gaussian noise entries; defaults sit at 1.2x the positivity boundary.
  double A11 = 0.3;
  double A12 = 0.05;
  double A22_1 = 0.1;     // pairs with (A11, A12, gamma)
  double A22_2 = 0.0654;  // pairs with (A44, A24, g)
  double A24 = 0.03;
  double A33 = 0.4;
  double A44 = 0.2;
  double alpha3 = 0.1;  // drift of the input-noise coordinate
  std::vector<LineNode> x1_nodes;  // jump sizes along the input coordinate
};
HybridModel build_hybrid_opto(const HybridOptoParams& params);

/// Closed-form xi(t) = S_t xi(0) for the hybrid model.
Vec hybrid_opto_flow(const HybridOptoParams& params, double t, const Vec& xi0);

/// Exact quadratic form of Psi_inf(zeta, 0, 0): the Gaussian covariance of
/// the reduced quantum equilibrium (Lyapunov solution, a33_total = A33 plus
/// any second moment added by jumps on the input coordinate).
Mat hybrid_opto_equilibrium_quantum_cov(const HybridOptoParams& params, double a33_total);
Mat hybrid_opto_equilibrium_quantum_cov(const HybridOptoParams& params);

/// Large-time limit of the output probe vector xi(t; kappa), and the output
/// channel's long-time symbol psi(xi(inf; kappa)).
Vec hybrid_opto_output_xi_infinity(const HybridOptoParams& params, double kappa);
cplx hybrid_opto_output_symbol_infinity(const HybridOptoParams& params, double kappa);

}  // namespace hyq::examples
