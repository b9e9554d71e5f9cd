#include "hyq/example_models.hpp"

#include <cmath>
#include <stdexcept>

namespace hyq::examples {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}


double node_mean_small(const std::vector<LineNode>& nodes) {
  double m = 0.0;
  for (const auto& n : nodes)
    if (std::abs(n.v) <= 1.0) m += n.weight * n.v;
  return m;
}

}  // namespace

HybridModel build_quantum_boltzmann(const QuantumBoltzmannParams& p) {
  require(p.mass > 0.0, "quantum_boltzmann: mass must be positive");
  require(p.gamma > 0.0, "quantum_boltzmann: gamma must be positive");
  require(p.a1 >= 0.0 && p.a2 >= 0.0, "quantum_boltzmann: a1, a2 must be nonnegative");
  require(!(p.gamma > 0.0 && p.a2 == 0.0),
          "quantum_boltzmann: friction requires momentum noise (a2 > 0)");
  require(p.a1 * p.a2 >= p.a3 * p.a3 + 0.25 * p.gamma * p.gamma,
          "quantum_boltzmann: a1 a2 >= a3^2 + gamma^2/4 violated");

  const Dims dims = make_dims(3, 0);
  Mat Z = Mat::Zero(6, 6);
  // Z^T has the (position <- momentum/mass, momentum <- -gamma momentum) form.
  Z.block(3, 0, 3, 3) = Mat::Identity(3, 3) / p.mass;
  Z.block(3, 3, 3, 3) = -p.gamma * Mat::Identity(3, 3);

  GeneratingTriplet triplet;
  triplet.A = Mat::Zero(6, 6);
  triplet.A.topLeftCorner(3, 3) = p.a1 * Mat::Identity(3, 3);
  triplet.A.bottomRightCorner(3, 3) = p.a2 * Mat::Identity(3, 3);
  triplet.A.topRightCorner(3, 3) = p.a3 * Mat::Identity(3, 3);
  triplet.A.bottomLeftCorner(3, 3) = p.a3 * Mat::Identity(3, 3);
  triplet.alpha = Vec::Zero(6);
  for (const auto& shell : p.shells) {
    require(shell.radius > 0.0 && shell.total_weight > 0.0,
            "quantum_boltzmann: shell radius and weight must be positive");
    const double w = shell.total_weight / 12.0;  // +- pairs on all six axes
    for (int axis = 0; axis < 6; ++axis)
      for (int sign : {-1, 1}) {
        Vec eta = Vec::Zero(6);
        eta(axis) = sign * shell.radius;
        triplet.nu.atoms.push_back({w, eta});
      }
  }
  return HybridModel::build(dims, Z, std::move(triplet));
}

HybridModel build_optomechanical(const OptomechanicalParams& p) {
  require(p.Omega > 0.0 && p.gamma > 0.0, "optomechanical: Omega, gamma must be positive");
  require(p.Omega * p.Omega > 0.25 * p.gamma * p.gamma,
          "optomechanical: overdamped parameters are out of scope (need Omega^2 > gamma^2/4)");
  require(p.a1 > 0.0 && p.a2 > 0.0, "optomechanical: a1, a2 must be positive");
  require(p.a1 * p.a2 >= p.a3 * p.a3 + 0.25 * p.gamma * p.gamma,
          "optomechanical: a1 a2 >= a3^2 + gamma^2/4 violated");

  const Dims dims = make_dims(1, 0);
  Mat Z(2, 2);
  Z << 0.0, -p.Omega, p.Omega, -p.gamma;

  GeneratingTriplet triplet;
  triplet.A = Mat(2, 2);
  triplet.A << p.a1, p.a3, p.a3, p.a2;
  // Only damping and momentum kicks: the drift cancels the jump compensator,
  // so the mean force is the uncompensated node mean (0, sum w v).
  triplet.alpha = Vec::Zero(2);
  triplet.alpha(1) = node_mean_small(p.momentum_nodes);
  if (!p.momentum_nodes.empty()) {
    LineMeasure line;
    line.direction = Vec::Zero(2);
    line.direction(1) = 1.0;
    line.nodes = p.momentum_nodes;
    triplet.nu.lines.push_back(std::move(line));
  }
  return HybridModel::build(dims, Z, std::move(triplet));
}

Mat damped_oscillator_propagator_transpose(double Omega, double gamma, double t) {
  const double om = std::sqrt(Omega * Omega - 0.25 * gamma * gamma);
  const cplx lp(-0.5 * gamma, om), lm(-0.5 * gamma, -om);
  const cplx denom(0.0, 2.0 * om);
  // S_t^T = e^{l+ t}/(2 i om) [[-l-, Om], [-Om, l+]] + e^{l- t}/(2 i om) [[l+, -Om], [Om, -l-]]
  const cplx f = std::exp(lp * t) / denom, g = std::exp(lm * t) / denom;
  Mat out(2, 2);
  out(0, 0) = (f * (-lm) + g * lp).real();
  out(0, 1) = (f * Omega - g * Omega).real();
  out(1, 0) = (-f * Omega + g * Omega).real();
  out(1, 1) = (f * lp - g * lm).real();
  return out;
}

HybridModel build_classical_oscillator(const ClassicalOscillatorParams& p) {
  require(p.Omega > 0.0 && p.gamma > 0.0, "classical_oscillator: Omega, gamma must be positive");
  require(p.a22 >= 0.0, "classical_oscillator: a22 must be nonnegative");

  const Dims dims = make_dims(0, 2);
  Mat Z(2, 2);
  Z << 0.0, -p.Omega, p.Omega, -p.gamma;  // Z^T matches the damped oscillator block

  GeneratingTriplet triplet;
  triplet.A = Mat::Zero(2, 2);
  triplet.A(1, 1) = p.a22;
  triplet.alpha = Vec::Zero(2);
  triplet.alpha(1) = p.mean_drift + node_mean_small(p.momentum_nodes);
  if (!p.momentum_nodes.empty()) {
    LineMeasure line;
    line.direction = Vec::Zero(2);
    line.direction(1) = 1.0;
    line.nodes = p.momentum_nodes;
    triplet.nu.lines.push_back(std::move(line));
  }
  return HybridModel::build(dims, Z, std::move(triplet));
}

Mat classical_oscillator_equilibrium_cov(const ClassicalOscillatorParams& p) {
  return (p.a22 / (2.0 * p.gamma)) * Mat::Identity(2, 2);
}

HybridModel build_hybrid_opto(const HybridOptoParams& p) {
  require(p.Omega > 0.0 && p.gamma > 0.0 && p.c > 0.0,
          "hybrid_opto: Omega, gamma, c must be positive");
  require(p.Omega * p.Omega > 0.25 * p.gamma * p.gamma,
          "hybrid_opto: overdamped parameters are out of scope");
  require(p.A11 >= 0.0 && p.A22_1 >= 0.0 && p.A22_2 >= 0.0 && p.A33 >= 0.0 && p.A44 >= 0.0,
          "hybrid_opto: diagonal noise entries must be nonnegative");
  require(p.A11 * p.A22_1 >= p.A12 * p.A12 + 0.25 * p.gamma * p.gamma,
          "hybrid_opto: A11 A22^1 >= A12^2 + gamma^2/4 violated");
  require(p.A22_2 * p.A44 >= p.A24 * p.A24 + 0.25 * p.g * p.g,
          "hybrid_opto: A22^2 A44 >= A24^2 + g^2/4 violated");

  const Dims dims = make_dims(1, 2);
  Mat Z(4, 4);
  Z << 0.0, -p.Omega, 0.0, p.g,
       p.Omega, -p.gamma, 0.0, 0.0,
       0.0, p.b, -p.c, 0.0,
       0.0, 0.0, 0.0, 0.0;

  GeneratingTriplet triplet;
  triplet.A = Mat::Zero(4, 4);
  const double a22 = p.A22_1 + p.A22_2;
  triplet.A(0, 0) = p.A11;
  triplet.A(0, 1) = triplet.A(1, 0) = p.A12;
  triplet.A(1, 1) = a22;
  triplet.A(1, 3) = triplet.A(3, 1) = p.A24;
  triplet.A(2, 2) = p.A33;
  triplet.A(3, 3) = p.A44;
  triplet.alpha = Vec::Zero(4);
  triplet.alpha(2) = p.alpha3;
  if (!p.x1_nodes.empty()) {
    LineMeasure line;
    line.direction = Vec::Zero(4);
    line.direction(2) = 1.0;
    line.nodes = p.x1_nodes;
    triplet.nu.lines.push_back(std::move(line));
  }
  return HybridModel::build(dims, Z, std::move(triplet));
}

Vec hybrid_opto_flow(const HybridOptoParams& p, double t, const Vec& xi0) {
  if (xi0.size() != 4) throw std::invalid_argument("hybrid_opto_flow: need a 4-vector");
  const double om = std::sqrt(p.Omega * p.Omega - 0.25 * p.gamma * p.gamma);
  const cplx lp(-0.5 * p.gamma, om), lm(-0.5 * p.gamma, -om);
  const double z1 = xi0(0), z2 = xi0(1), k1 = xi0(2), k2 = xi0(3);

  // Constant (particular) component driven by the conserved k2.
  const double part1 = p.gamma * p.g * k2 / (p.Omega * p.Omega);
  const double part2 = p.g * k2 / p.Omega;
  const double c1 = z1 - part1, c2 = z2 - part2;
  const cplx denom(0.0, 2.0 * om);
  const cplx xp = (-lm * c1 - p.Omega * c2) / denom;
  const cplx yp = (p.Omega * c1 + lp * c2) / denom;
  const cplx xm = std::conj(xp), ym = std::conj(yp);

  const cplx ep = std::exp(lp * t), em = std::exp(lm * t);
  const double ec = std::exp(-p.c * t);
  const cplx ell = yp * (ep - ec) / (lp + p.c) + ym * (em - ec) / (lm + p.c) +
                   p.g * k2 * (1.0 - ec) / (p.Omega * p.c);
  Vec out(4);
  out(0) = (xp * ep + xm * em).real() + part1;
  out(1) = (yp * ep + ym * em).real() + part2;
  out(2) = ec * k1 + p.b * ell.real();
  out(3) = k2;
  return out;
}

Mat hybrid_opto_equilibrium_quantum_cov(const HybridOptoParams& p, double a33_total) {
  const double a22 = p.A22_1 + p.A22_2;
  const double pole = p.Omega * p.Omega + p.c * p.gamma + p.c * p.c;
  Mat Aq(2, 2);
  Aq(1, 1) = (p.A11 + a22) / (2.0 * p.gamma) +
             a33_total * p.b * p.b / (2.0 * p.gamma * pole);
  Aq(0, 1) = Aq(1, 0) = -p.A11 / (2.0 * p.Omega);
  Aq(0, 0) = Aq(1, 1) + p.A12 / p.Omega + p.A11 * p.gamma / (2.0 * p.Omega * p.Omega) +
             a33_total * p.b * p.b / (2.0 * p.c * pole);
  return Aq;
}

Mat hybrid_opto_equilibrium_quantum_cov(const HybridOptoParams& p) {
  return hybrid_opto_equilibrium_quantum_cov(p, p.A33);
}

Vec hybrid_opto_output_xi_infinity(const HybridOptoParams& p, double kappa) {
  Vec out(4);
  out << p.g * p.gamma / (p.Omega * p.Omega), p.g / p.Omega, p.b * p.g / (p.c * p.Omega), 1.0;
  return kappa * out;
}

cplx hybrid_opto_output_symbol_infinity(const HybridOptoParams& p, double kappa) {
  return build_hybrid_opto(p).psi(hybrid_opto_output_xi_infinity(p, kappa));
}

}  // namespace hyq::examples
