#include "hyq/propagation.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace hyq {

Mat propagator(const Mat& Z, double t) { return (Z * t).exp(); }

double spectral_abscissa(const Mat& Z) {
  Eigen::EigenSolver<Mat> es(Z, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

static void require_validated(const HybridModel& model, const char* who) {
  if (!model.validated)
    throw std::invalid_argument(std::string(who) + ": model failed validation");
}

cplx capital_psi(const HybridModel& model, double t, const Vec& xi,
                 const QuadratureSettings& settings) {
  require_validated(model, "capital_psi");
  if (t < 0.0) throw std::invalid_argument("capital_psi: t must be nonnegative");
  if (t == 0.0) return {0.0, 0.0};
  auto integrand = [&](double tau) { return model.psi(propagator(model.Z, tau) * xi); };
  return adaptive_gl<cplx>(integrand, 0.0, t, settings, cplx_norm);
}

cplx noise_function(const HybridModel& model, double t, const Vec& xi,
                    const QuadratureSettings& settings) {
  return std::exp(capital_psi(model, t, xi, settings));
}

cplx evolve_cf(const HybridModel& model, const CfFn& chi0, double t, const Vec& xi,
               const QuadratureSettings& settings) {
  return std::exp(capital_psi(model, t, xi, settings)) * chi0(propagator(model.Z, t) * xi);
}

static double mat_norm(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat gaussian_cov_integral(const HybridModel& model, double t, const QuadratureSettings& settings) {
  auto integrand = [&](double tau) -> Mat {
    const Mat S = propagator(model.Z, tau);
    return S.transpose() * model.triplet.A * S;
  };
  return adaptive_gl<Mat>(integrand, 0.0, t, settings, mat_norm);
}

Vec drift_integral(const HybridModel& model, double t, const Vec& v,
                   const QuadratureSettings& settings) {
  auto integrand = [&](double tau) -> Vec { return propagator(model.Z, tau).transpose() * v; };
  return adaptive_gl<Vec>(integrand, 0.0, t, settings,
                          [](const Vec& x) { return x.cwiseAbs().maxCoeff(); });
}

Vec mean_evolution(const HybridModel& model, const Vec& m0, double t,
                   const QuadratureSettings& settings) {
  require_validated(model, "mean_evolution");
  return propagator(model.Z, t).transpose() * m0 + drift_integral(model, t, model.beta_tilde(), settings);
}

Vec mean_evolution_rhs(const HybridModel& model, const Vec& m) {
  return model.Z.Z.transpose() * m + model.beta_tilde();
}

namespace {

struct DecayInfo {
  double rate;
  double horizon;
  double residual_norm;  // |S_T xi| at the horizon
};

// Decides whether S_t xi decays and along the way fixes the quadrature
// horizon: globally for a stable Z, direction-wise otherwise.
DecayInfo contraction_analysis(const HybridModel& model, const Vec& xi,
                               const EquilibriumSettings& settings) {
  DecayInfo info{};
  const double abscissa = spectral_abscissa(model.Z.Z);
  if (abscissa < -1e-10) {
    info.rate = -abscissa;
    info.horizon = std::max(10.0 / info.rate, 50.0);
  } else {
    const double norm0 = xi.norm();
    if (norm0 == 0.0) {
      info.rate = 1.0;
      info.horizon = 1.0;
      return info;
    }
    const double t0 = 0.5 * settings.probe_time;
    const double t1 = settings.probe_time;
    const double r0 = (propagator(model.Z, t0) * xi).norm() / norm0;
    const double r1 = (propagator(model.Z, t1) * xi).norm() / norm0;
    if (!(r1 < settings.decay_threshold) || !(r1 < r0))
      throw NoEquilibriumError("equilibrium_psi: no equilibrium along this direction");
    info.rate = std::log(r0 / r1) / (t1 - t0);
    info.horizon = std::max(10.0 / info.rate, 50.0);
  }
  info.residual_norm = (propagator(model.Z, info.horizon) * xi).norm();
  return info;
}

// |psi(eta)| <= C1 |eta| + C2 |eta|^2 for small eta: C1 from the drift plus
// uncompensated atoms (|e^{ix}-1| <= |x|), C2 from the Gaussian part plus
// compensated atoms (|e^{ix}-1-ix| <= x^2/2).
void small_argument_bounds(const HybridModel& model, double& c1, double& c2) {
  c1 = model.triplet.alpha.norm();
  Eigen::SelfAdjointEigenSolver<Mat> es(model.triplet.A, Eigen::EigenvaluesOnly);
  c2 = 0.5 * std::max(0.0, es.eigenvalues().maxCoeff());
  for (const auto& atom : model.jump_atoms) {
    const double r = atom.eta.norm();
    if (atom.compensated)
      c2 += 0.5 * atom.weight * r * r;
    else
      c1 += atom.weight * r;
  }
}

}  // namespace

EquilibriumValue equilibrium_psi(const HybridModel& model, const Vec& xi,
                                 const EquilibriumSettings& settings) {
  require_validated(model, "equilibrium_psi");
  EquilibriumValue out{};
  if (xi.cwiseAbs().maxCoeff() == 0.0) return out;
  const DecayInfo decay = contraction_analysis(model, xi, settings);
  auto integrand = [&](double tau) { return model.psi(propagator(model.Z, tau) * xi); };
  out.psi_inf = adaptive_gl<cplx>(integrand, 0.0, decay.horizon, settings.quadrature, cplx_norm);
  out.horizon = decay.horizon;
  out.decay_rate = decay.rate;
  double c1 = 0.0, c2 = 0.0;
  small_argument_bounds(model, c1, c2);
  const double r = decay.residual_norm;
  out.tail_bound = c1 * r / decay.rate + 0.5 * c2 * r * r / decay.rate;
  return out;
}

cplx equilibrium_cf(const HybridModel& model, const Vec& xi, const EquilibriumSettings& settings) {
  return std::exp(equilibrium_psi(model, xi, settings).psi_inf);
}

Mat equilibrium_gaussian_cov(const HybridModel& model, const EquilibriumSettings& settings) {
  const double abscissa = spectral_abscissa(model.Z.Z);
  if (!(abscissa < -1e-10))
    throw NoEquilibriumError("equilibrium_gaussian_cov: Z is not a contraction");
  const double horizon = std::max(10.0 / -abscissa, 50.0);
  return gaussian_cov_integral(model, horizon, settings.quadrature);
}

cplx generator_symbol(const HybridModel& model, const Vec& xi, double h, double check_tol) {
  require_validated(model, "generator_symbol");
  const cplx psi = model.psi(xi);
  const cplx d1 = capital_psi(model, h, xi) / h;
  const cplx d2 = capital_psi(model, 0.5 * h, xi) / (0.5 * h);
  const cplx richardson = 2.0 * d2 - d1;  // O(h^2) residual
  if (std::abs(richardson - psi) > check_tol * (1.0 + std::abs(psi)))
    throw std::runtime_error("generator_symbol: derivative check failed");
  return psi;
}

FrozenPsi::FrozenPsi(const HybridModel& model, double t, std::span<const Vec> probes,
                     const QuadratureSettings& settings)
    : model_(&model), t_(t) {
  require_validated(model, "FrozenPsi");
  if (t < 0.0) throw std::invalid_argument("FrozenPsi: t must be nonnegative");
  if (t == 0.0) return;
  std::vector<double> breakpoints;
  for (const auto& xi : probes) {
    auto integrand = [&](double tau) { return model.psi(propagator(model.Z, tau) * xi); };
    adaptive_gl<cplx>(integrand, 0.0, t, settings, cplx_norm, &breakpoints);
  }
  if (breakpoints.size() < 2) breakpoints = {0.0, t};
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int j = 0; j < 15; ++j) {
      const double tau = mid + half * detail::kGl15Nodes[j];
      weights_.push_back(half * detail::kGl15Weights[j]);
      transports_.push_back(propagator(model.Z, tau));
    }
  }
}

cplx FrozenPsi::operator()(const Vec& xi) const {
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < weights_.size(); ++j)
    acc += weights_[j] * model_->psi(transports_[j] * xi);
  return acc;
}

Mat negative_hessian_at_zero(const std::function<cplx(const Vec&)>& f, int dim, double h) {
  auto hessian = [&](double step) {
    Mat H(dim, dim);
    const double f0 = f(Vec::Zero(dim)).real();
    for (int i = 0; i < dim; ++i) {
      Vec e = Vec::Zero(dim);
      e(i) = step;
      H(i, i) = (f(e).real() + f(-e).real() - 2.0 * f0) / (step * step);
      for (int j = i + 1; j < dim; ++j) {
        Vec ej = Vec::Zero(dim);
        ej(j) = step;
        const double v = (f(e + ej).real() + f(-e - ej).real() - f(e - ej).real() - f(ej - e).real()) /
                         (4.0 * step * step);
        H(i, j) = H(j, i) = v;
      }
    }
    return H;
  };
  const Mat coarse = hessian(h);
  const Mat fine = hessian(0.5 * h);
  return -(4.0 * fine - coarse) / 3.0;
}

}  // namespace hyq
