#include "hyq/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace hyq {

std::vector<Atom> LevyMeasure::flatten() const {
  std::vector<Atom> out = atoms;
  for (const auto& line : lines)
    for (const auto& node : line.nodes) out.push_back({node.weight, node.v * line.direction});
  return out;
}

LevyDiagnostics validate_levy_measure(const LevyMeasure& nu) {
  LevyDiagnostics diag;
  auto account = [&diag](double w, double r, const std::string& where) {
    if (!(w > 0.0)) diag.issues.push_back(where + ": non-positive weight");
    if (r == 0.0) diag.issues.push_back(where + ": support at origin");
    if (r <= 1.0)
      diag.small_ball_quadratic_sum += w * r * r;
    else {
      diag.tail_mass += w;
      diag.tail_first_moment += w * r;
    }
  };
  for (std::size_t i = 0; i < nu.atoms.size(); ++i)
    account(nu.atoms[i].weight, nu.atoms[i].eta.norm(), "atom " + std::to_string(i));
  for (std::size_t i = 0; i < nu.lines.size(); ++i) {
    const auto& line = nu.lines[i];
    const std::string where = "line " + std::to_string(i);
    if (std::abs(line.direction.norm() - 1.0) > 1e-12)
      diag.issues.push_back(where + ": direction is not a unit vector");
    for (const auto& node : line.nodes) account(node.weight, std::abs(node.v), where);
  }
  diag.ok = diag.issues.empty();
  return diag;
}

PositivityReport noise_positivity_check(const Mat& A, const DriftMatrix& Z, const Mat& sigma,
                                        double tol) {
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("noise_positivity_check: A is not symmetric");
  PositivityReport report;
  report.B = 0.5 * (sigma * Z.Z - Z.Z.transpose() * sigma.transpose());
  CMat H = A.cast<cplx>() + kI * report.B.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.pass = report.min_eigenvalue >= -tol;
  return report;
}

HamiltonianSplit hamiltonian_dissipative_split(const DriftMatrix& Z, const Mat& sigma) {
  const int q = 2 * Z.dims.n;
  const Mat sigma1 = sigma.topLeftCorner(q, q);
  HamiltonianSplit split;
  split.D11 = 0.5 * (Z.block11() * sigma1 + sigma1.transpose() * Z.block11().transpose());
  split.B = 0.5 * (sigma * Z.Z - Z.Z.transpose() * sigma.transpose());
  return split;
}

DriftMatrix drift_from_split(const Mat& D11, const Mat& B11, const Mat& B10, const Mat& Z01,
                             const Mat& Z00, const Dims& dims) {
  const int q = 2 * dims.n;
  if (D11.rows() != q || D11.cols() != q || B11.rows() != q || B11.cols() != q ||
      B10.rows() != q || B10.cols() != dims.s || Z01.rows() != dims.s || Z01.cols() != q ||
      Z00.rows() != dims.s || Z00.cols() != dims.s)
    throw std::invalid_argument("drift_from_split: block shape mismatch");
  if ((D11 - D11.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + D11.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("drift_from_split: D11 is not symmetric");
  if ((B11 + B11.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + B11.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("drift_from_split: B11 is not antisymmetric");
  const Mat sigma1 = symplectic_form_quantum(dims);
  Mat Z = Mat::Zero(dims.d, dims.d);
  Z.topLeftCorner(q, q) = D11 * sigma1.transpose() - sigma1 * B11;
  Z.topRightCorner(q, dims.s) = 2.0 * sigma1.transpose() * B10;
  Z.bottomLeftCorner(dims.s, q) = Z01;
  Z.bottomRightCorner(dims.s, dims.s) = Z00;
  return DriftMatrix{Z, dims};
}

cplx HybridModel::psi(const Vec& xi) const {
  cplx value = cplx(0.0, triplet.alpha.dot(xi)) - cplx(0.5 * xi.dot(triplet.A * xi), 0.0);
  for (const auto& atom : jump_atoms) {
    const double phase = atom.eta.dot(xi);
    cplx term = std::polar(1.0, phase) - 1.0;
    if (atom.compensated) term -= cplx(0.0, phase);
    value += atom.weight * term;
  }
  return value;
}

Vec HybridModel::alpha_uncompensated() const {
  Vec out = triplet.alpha;
  for (const auto& atom : jump_atoms)
    if (atom.compensated) out -= atom.weight * atom.eta;
  return out;
}

Vec HybridModel::beta_tilde() const {
  Vec out = triplet.alpha;
  for (const auto& atom : jump_atoms)
    if (!atom.compensated) out += atom.weight * atom.eta;
  return out;
}

cplx levy_symbol(const GeneratingTriplet& triplet, const Vec& xi) {
  cplx value = cplx(0.0, triplet.alpha.dot(xi)) - cplx(0.5 * xi.dot(triplet.A * xi), 0.0);
  for (const auto& atom : triplet.nu.flatten()) {
    const double phase = atom.eta.dot(xi);
    cplx term = std::polar(1.0, phase) - 1.0;
    if (jump_compensated(atom.eta)) term -= cplx(0.0, phase);
    value += atom.weight * term;
  }
  return value;
}

HybridModel HybridModel::build(const Dims& dims, Mat Z, GeneratingTriplet triplet, double tol) {
  if (Z.rows() != dims.d || Z.cols() != dims.d)
    throw std::invalid_argument("HybridModel: Z must be d x d");
  if (triplet.A.rows() != dims.d || triplet.A.cols() != dims.d)
    throw std::invalid_argument("HybridModel: A must be d x d");
  if (triplet.alpha.size() != dims.d)
    throw std::invalid_argument("HybridModel: alpha must have length d");
  for (const auto& atom : triplet.nu.atoms)
    if (atom.eta.size() != dims.d) throw std::invalid_argument("HybridModel: atom dimension mismatch");
  for (const auto& line : triplet.nu.lines)
    if (line.direction.size() != dims.d)
      throw std::invalid_argument("HybridModel: line direction dimension mismatch");

  HybridModel model;
  model.dims = dims;
  model.sigma = symplectic_form(dims);
  model.Z = DriftMatrix{std::move(Z), dims};
  model.triplet = std::move(triplet);
  model.levy_diag = validate_levy_measure(model.triplet.nu);
  model.positivity = noise_positivity_check(model.triplet.A, model.Z, model.sigma, tol);
  for (const auto& atom : model.triplet.nu.flatten())
    model.jump_atoms.push_back({atom.weight, atom.eta, jump_compensated(atom.eta)});
  model.validated = model.levy_diag.ok && model.positivity.pass;
  return model;
}

InteractionFlags classify_interactions(const HybridModel& model, double zero_tol) {
  InteractionFlags flags;
  const auto nonzero = [zero_tol](const Mat& m) {
    return m.size() > 0 && m.cwiseAbs().maxCoeff() > zero_tol;
  };
  flags.k1 = nonzero(model.Z.block01());
  flags.k2 = nonzero(model.Z.block10());
  flags.k3 = nonzero(model.triplet.A.topRightCorner(2 * model.dims.n, model.dims.s));
  for (const auto& atom : model.jump_atoms) {
    const bool quantum =
        model.dims.n > 0 && atom.eta.head(2 * model.dims.n).cwiseAbs().maxCoeff() > zero_tol;
    const bool classical =
        model.dims.s > 0 && atom.eta.tail(model.dims.s).cwiseAbs().maxCoeff() > zero_tol;
    if (quantum && classical) flags.k4 = true;
  }
  return flags;
}

namespace {

// Shared pushforward of the Levy measure under a coordinate projection.
// keep = [offset, offset+len) selects the surviving block; the returned
// drift correction collects w * P eta over atoms newly entering the ball.
struct Reduction {
  LevyMeasure nu;
  Vec drift_correction;
};

Reduction project_measure(const LevyMeasure& nu, int offset, int len, double zero_tol) {
  Reduction red;
  red.drift_correction = Vec::Zero(len);
  auto push = [&](double w, const Vec& eta) {
    const Vec p = eta.segment(offset, len);
    if (p.cwiseAbs().maxCoeff() <= zero_tol) return;  // projects to zero: drop
    red.nu.atoms.push_back({w, p});
    if (p.norm() <= 1.0 && eta.norm() > 1.0) red.drift_correction += w * p;
  };
  for (const auto& atom : nu.atoms) push(atom.weight, atom.eta);
  for (const auto& line : nu.lines) {
    const Vec dir = line.direction.segment(offset, len);
    const double scale = dir.norm();
    if (scale <= zero_tol) continue;
    LineMeasure projected;
    projected.direction = dir / scale;
    for (const auto& node : line.nodes) {
      projected.nodes.push_back({node.v * scale, node.weight});
      const double r_new = std::abs(node.v) * scale;
      const double r_old = std::abs(node.v) * line.direction.norm();
      if (r_new <= 1.0 && r_old > 1.0)
        red.drift_correction += node.weight * node.v * projected.direction * scale;
    }
    red.nu.lines.push_back(std::move(projected));
  }
  return red;
}

}  // namespace

HybridModel reduce_quantum(const HybridModel& model, double zero_tol) {
  const Mat Z01 = model.Z.block01();
  if (Z01.size() > 0 && Z01.cwiseAbs().maxCoeff() > zero_tol)
    throw std::invalid_argument("reduce_quantum: reduced dynamics is not autonomous (Z01 != 0)");
  const Dims dims = make_dims(model.dims.n, 0);
  Reduction red = project_measure(model.triplet.nu, 0, 2 * model.dims.n, zero_tol);
  GeneratingTriplet triplet;
  triplet.A = model.triplet.A.topLeftCorner(dims.d, dims.d);
  triplet.alpha = model.triplet.alpha.head(dims.d) + red.drift_correction;
  triplet.nu = std::move(red.nu);
  return HybridModel::build(dims, model.Z.block11(), std::move(triplet));
}

HybridModel reduce_classical(const HybridModel& model, double zero_tol) {
  const Mat Z10 = model.Z.block10();
  if (Z10.size() > 0 && Z10.cwiseAbs().maxCoeff() > zero_tol)
    throw std::invalid_argument("reduce_classical: reduced dynamics is not autonomous (Z10 != 0)");
  const Dims dims = make_dims(0, model.dims.s);
  Reduction red = project_measure(model.triplet.nu, 2 * model.dims.n, model.dims.s, zero_tol);
  GeneratingTriplet triplet;
  triplet.A = model.triplet.A.bottomRightCorner(dims.d, dims.d);
  triplet.alpha = model.triplet.alpha.tail(dims.d) + red.drift_correction;
  triplet.nu = std::move(red.nu);
  return HybridModel::build(dims, model.Z.block00(), std::move(triplet));
}

}  // namespace hyq
