#pragma once

#include <string>
#include <vector>

#include "hyq/phase_space.hpp"
#include "hyq/types.hpp"

namespace hyq {

/// A point mass of the Levy measure: weight * delta_eta, eta != 0.
struct Atom {
  double weight = 0.0;
  Vec eta;
};

struct LineNode {
  double v = 0.0;      // position along the line, v != 0
  double weight = 0.0;
};

/// A 1-D measure pushed onto phase space along a unit direction:
/// sum of weight * delta_{v * direction}.
struct LineMeasure {
  Vec direction;
  std::vector<LineNode> nodes;
};

/// Finite-activity Levy measure: a mixture of atoms and line measures.
/// Finite node sets make every psi-integral an exact finite sum.
struct LevyMeasure {
  std::vector<Atom> atoms;
  std::vector<LineMeasure> lines;

  bool empty() const { return atoms.empty() && lines.empty(); }
  /// All point masses with lines expanded to atoms at v * direction.
  std::vector<Atom> flatten() const;
};

struct LevyDiagnostics {
  bool ok = false;
  double small_ball_quadratic_sum = 0.0;  // sum over |eta| <= 1 of w |eta|^2
  double tail_mass = 0.0;                 // sum over |eta| > 1 of w
  double tail_first_moment = 0.0;         // sum over |eta| > 1 of w |eta|
  std::vector<std::string> issues;
};

/// Checks nu({0}) = 0 and weight positivity; reports the convergence sums.
LevyDiagnostics validate_levy_measure(const LevyMeasure& nu);

/// Jumps are compensated inside the closed unit ball |eta| <= 1. The
/// boundary assignment is a fixed convention; any cutoff equal to one near
/// the origin and vanishing at infinity parameterizes the same family.
inline bool jump_compensated(const Vec& eta) { return eta.norm() <= 1.0; }

struct GeneratingTriplet {
  Mat A;           // real symmetric d x d
  LevyMeasure nu;
  Vec alpha;       // d-vector
};

/// Drift matrix with block views in the fixed (Q, P, X) ordering.
struct DriftMatrix {
  Mat Z;
  Dims dims;

  Mat block11() const { return Z.topLeftCorner(2 * dims.n, 2 * dims.n); }
  Mat block10() const { return Z.topRightCorner(2 * dims.n, dims.s); }
  Mat block01() const { return Z.bottomLeftCorner(dims.s, 2 * dims.n); }
  Mat block00() const { return Z.bottomRightCorner(dims.s, dims.s); }
};

struct PositivityReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
  Mat B;  // antisymmetric part of sigma Z
};

/// Quantum positivity of the Gaussian noise: the Hermitian matrix A + iB,
/// B = (sigma Z - Z^T sigma^T)/2, must be positive semidefinite (A - iB is
/// its conjugate, so the single eigenvalue check suffices).
PositivityReport noise_positivity_check(const Mat& A, const DriftMatrix& Z, const Mat& sigma,
                                        double tol = 1e-10);

struct HamiltonianSplit {
  Mat D11;  // symmetric 2n x 2n, Hamiltonian part of the quantum drift
  Mat B;    // antisymmetric d x d, dissipative part
};

HamiltonianSplit hamiltonian_dissipative_split(const DriftMatrix& Z, const Mat& sigma);

/// Rebuilds Z from the split: Z11 = D11 sigma1^T - sigma1 B11,
/// Z10 = 2 sigma1^T B10; the purely classical blocks pass through.
DriftMatrix drift_from_split(const Mat& D11, const Mat& B11, const Mat& B10, const Mat& Z01,
                             const Mat& Z00, const Dims& dims);

struct InteractionFlags {
  bool k1 = false;  // classical -> quantum Hamiltonian coupling (Z01)
  bool k2 = false;  // quantum -> classical information flow (Z10)
  bool k3 = false;  // Gaussian cross noise (A10)
  bool k4 = false;  // jump component with mixed support
};

/// Expanded atom view used on hot paths.
struct JumpAtom {
  double weight;
  Vec eta;
  bool compensated;
};

/// The full dynamical datum (Z, A, nu, alpha) of a quasi-free hybrid
/// semigroup, held together with its validation diagnostics.
struct HybridModel {
  Dims dims;
  Mat sigma;
  DriftMatrix Z;
  GeneratingTriplet triplet;

  bool validated = false;
  PositivityReport positivity;
  LevyDiagnostics levy_diag;
  std::vector<JumpAtom> jump_atoms;  // flattened nu with compensation flags

  /// Levy symbol psi(xi); the exponent generator of the noise function.
  cplx psi(const Vec& xi) const;

  /// Uncompensated drift alpha - sum_{compensated} w eta (the SDE drift).
  Vec alpha_uncompensated() const;
  /// Mean drift alpha + sum_{uncompensated} w eta (enters first moments).
  Vec beta_tilde() const;

  static HybridModel build(const Dims& dims, Mat Z, GeneratingTriplet triplet, double tol = 1e-10);
};

/// Levy symbol from a bare triplet (convenience entry point; flattens nu).
cplx levy_symbol(const GeneratingTriplet& triplet, const Vec& xi);

InteractionFlags classify_interactions(const HybridModel& model, double zero_tol = 1e-14);

/// Restriction to the quantum component; requires Z01 = 0 (otherwise the
/// reduced dynamics is not autonomous). The Levy measure is pushed forward
/// by P1 and the drift picks up the compensator correction for atoms whose
/// projection enters the unit ball.
HybridModel reduce_quantum(const HybridModel& model, double zero_tol = 1e-12);

/// Restriction to the classical component; requires Z10 = 0.
HybridModel reduce_classical(const HybridModel& model, double zero_tol = 1e-12);

}  // namespace hyq
