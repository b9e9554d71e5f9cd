#pragma once

#include <vector>

#include "hyq/model.hpp"
#include "hyq/types.hpp"

namespace hyq {

/// Gaussian hybrid state, chi(xi) = exp(i mean.xi - xi.cov xi / 2).
struct GaussianHybridState {
  Vec mean;
  Mat cov;
};

cplx gaussian_cf(const GaussianHybridState& state, const Vec& xi);
CfFn gaussian_cf_fn(GaussianHybridState state);

struct AdmissibilityReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
};

/// Quantum admissibility of a covariance: cov + (i/2) sigma >= 0.
AdmissibilityReport quantum_admissibility(const Mat& cov, const Mat& sigma, double tol = 1e-10);

/// One uniform grid axis: points center + (j - count/2) * step, j = 0..count-1.
struct GridAxis {
  double center = 0.0;
  double step = 0.0;
  int count = 0;
};

std::size_t total_samples(const std::vector<GridAxis>& axes);

/// Characteristic function sampled on a rectangular phase-space grid.
struct GridCF {
  std::vector<GridAxis> axes;
  std::vector<cplx> values;  // row-major, first axis slowest

  cplx at(const std::vector<int>& idx) const;
  Vec point(const std::vector<int>& idx) const;
  /// max |chi| over the outermost grid faces (aliasing diagnostic).
  double boundary_magnitude() const;
};

/// Fills a GridCF from a callable. Refuses more than 2^27 total samples.
GridCF sample_cf(const CfFn& chi, const std::vector<GridAxis>& axes);

/// Real density samples plus bookkeeping from the inversion.
struct DensityGrid {
  std::vector<GridAxis> axes;
  std::vector<double> values;
  double cell_volume = 0.0;
  double boundary_cf_magnitude = 0.0;  // |chi| at the CF grid edge
  bool aliasing_warning = false;
  double max_imag_residual = 0.0;  // dropped imaginary part, hermiticity check

  double integral() const;
  double min_value() const;
  double at(const std::vector<int>& idx) const;
  Vec point(const std::vector<int>& idx) const;
};

/// Fourier inversion W(z) = (2pi)^-d Int e^{-i z.xi} chi(xi) dxi on the dual
/// grid (z-step 2pi/(count*xi-step) per axis). `centers`, when nonempty,
/// recenters the output axes (phase ramps keep the transform exact).
DensityGrid wigner_from_cf(const GridCF& cf, const std::vector<double>& centers = {},
                           double boundary_tol = 1e-6);

/// Forward transform chi(xi) = Int e^{+i z.xi} W(z) dz back onto `cf_axes`
/// (must be the dual of the density grid); used for round-trip checks.
GridCF cf_from_density(const DensityGrid& density, const std::vector<GridAxis>& cf_axes);

/// chi(zeta, 0): the reduced quantum state's characteristic function.
cplx quantum_marginal_cf(const CfFn& chi, const Dims& dims, const Vec& zeta);

/// Density of the classical marginal: inverts k -> chi(0, k) on an s-dim grid.
DensityGrid classical_marginal_density(const CfFn& chi, const Dims& dims,
                                       const std::vector<GridAxis>& k_axes,
                                       double boundary_tol = 1e-6);

/// Minimum eigenvalue of the twisted Gram matrix
/// chi(xi_k - xi_l) exp{(i/2) xi_k^T sigma xi_l}; >= 0 for state CFs.
double state_cf_psd_diagnostic(const CfFn& chi, const Mat& sigma, const std::vector<Vec>& points);

}  // namespace hyq
