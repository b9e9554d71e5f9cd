#pragma once

#include <span>

#include "hyq/model.hpp"
#include "hyq/quadrature.hpp"

namespace hyq {

/// S_t = exp(Z t) (scaling-and-squaring Pade). Negative t is admitted as a
/// numerical extension for oracle checks; the semigroup itself is t >= 0.
Mat propagator(const Mat& Z, double t);
inline Mat propagator(const DriftMatrix& Z, double t) { return propagator(Z.Z, t); }

/// Psi_t(xi) = int_0^t psi(S_tau xi) dtau by adaptive Gauss-Legendre.
cplx capital_psi(const HybridModel& model, double t, const Vec& xi,
                 const QuadratureSettings& settings = {});

/// f_t(xi) = exp(Psi_t(xi)); |f_t| <= 1, f_t(0) = 1.
cplx noise_function(const HybridModel& model, double t, const Vec& xi,
                    const QuadratureSettings& settings = {});

/// chi_t(xi) = exp(Psi_t(xi)) chi_0(S_t xi).
cplx evolve_cf(const HybridModel& model, const CfFn& chi0, double t, const Vec& xi,
               const QuadratureSettings& settings = {});

/// A_t = int_0^t S_tau^T A S_tau dtau, the Gaussian covariance accumulated
/// by the noise up to time t.
Mat gaussian_cov_integral(const HybridModel& model, double t,
                          const QuadratureSettings& settings = {});

/// int_0^t S_tau^T v dtau for a fixed vector v (drift transport).
Vec drift_integral(const HybridModel& model, double t, const Vec& v,
                   const QuadratureSettings& settings = {});

/// First moments: <R>_t = S_t^T m0 + int_0^t S_tau^T beta~ dtau.
Vec mean_evolution(const HybridModel& model, const Vec& m0, double t,
                   const QuadratureSettings& settings = {});
/// Right-hand side of the equivalent ODE d<R>/dt = Z^T <R> + beta~.
Vec mean_evolution_rhs(const HybridModel& model, const Vec& m);

class NoEquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EquilibriumValue {
  cplx psi_inf;       // Psi_infinity(xi)
  double horizon;     // quadrature horizon T
  double decay_rate;  // contraction rate used for the tail bound
  double tail_bound;  // analytic bound on the dropped tail integral
};

struct EquilibriumSettings {
  QuadratureSettings quadrature{};
  double probe_time = 50.0;     // horizon for direction-wise decay probing
  double decay_threshold = 1e-6;
};

/// Psi_infinity(xi) = int_0^inf psi(S_tau xi) dtau: finite quadrature to a
/// horizon set by the contraction rate plus an analytic tail bound. Requires
/// either a strictly negative spectral abscissa of Z or demonstrable decay
/// of S_t xi along the probe direction; otherwise NoEquilibriumError.
EquilibriumValue equilibrium_psi(const HybridModel& model, const Vec& xi,
                                 const EquilibriumSettings& settings = {});

/// exp(Psi_infinity(xi)); the equilibrium characteristic function.
cplx equilibrium_cf(const HybridModel& model, const Vec& xi,
                    const EquilibriumSettings& settings = {});

/// A_infinity = int_0^inf S_tau^T A S_tau dtau (needs a contracting Z).
Mat equilibrium_gaussian_cov(const HybridModel& model, const EquilibriumSettings& settings = {});

/// Returns psi(xi) after asserting agreement with the Richardson-extrapolated
/// derivative lim_{h->0} Psi_h(xi)/h.
cplx generator_symbol(const HybridModel& model, const Vec& xi, double h = 1e-3,
                      double check_tol = 1e-6);

/// max Re eig(Z).
double spectral_abscissa(const Mat& Z);

/// Fixed composite rule for Psi_t at one time, reusable across many xi.
/// Built from the union of adaptive subdivisions for the probe points, so
/// grid sweeps pay the matrix exponentials once.
class FrozenPsi {
 public:
  FrozenPsi(const HybridModel& model, double t, std::span<const Vec> probes,
            const QuadratureSettings& settings = {});
  cplx operator()(const Vec& xi) const;
  double t() const { return t_; }

 private:
  const HybridModel* model_;
  double t_;
  std::vector<double> weights_;
  std::vector<Mat> transports_;  // S_{tau_j}
};

/// Richardson-extrapolated negative Hessian of Re f at the origin; for a
/// characteristic-function exponent this is the covariance quadratic form.
Mat negative_hessian_at_zero(const std::function<cplx(const Vec&)>& f, int dim, double h = 1e-2);

}  // namespace hyq
