#include "hyq/states.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace hyq {

cplx gaussian_cf(const GaussianHybridState& state, const Vec& xi) {
  return std::exp(cplx(-0.5 * xi.dot(state.cov * xi), state.mean.dot(xi)));
}

CfFn gaussian_cf_fn(GaussianHybridState state) {
  return [state = std::move(state)](const Vec& xi) { return gaussian_cf(state, xi); };
}

AdmissibilityReport quantum_admissibility(const Mat& cov, const Mat& sigma, double tol) {
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("quantum_admissibility: covariance is not symmetric");
  CMat H = cov.cast<cplx>() + cplx(0.0, 0.5) * sigma.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  AdmissibilityReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.pass = rep.min_eigenvalue >= -tol;
  return rep;
}

std::size_t total_samples(const std::vector<GridAxis>& axes) {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.count);
  return n;
}

namespace {

constexpr std::size_t kMaxSamples = std::size_t{1} << 27;

void check_axes(const std::vector<GridAxis>& axes, const char* who) {
  if (axes.empty()) throw std::invalid_argument(std::string(who) + ": no axes");
  for (const auto& ax : axes) {
    if (ax.count < 2 || ax.count % 2 != 0)
      throw std::invalid_argument(std::string(who) + ": axis counts must be even and >= 2");
    if (!(ax.step > 0.0)) throw std::invalid_argument(std::string(who) + ": axis step must be positive");
  }
  if (total_samples(axes) > kMaxSamples)
    throw std::invalid_argument(std::string(who) + ": grid exceeds the sample guard (2^27)");
}

// Decomposes a flat row-major index into per-axis indices.
void unflatten(std::size_t flat, const std::vector<GridAxis>& axes, std::vector<int>& idx) {
  for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % axes[a].count);
    flat /= axes[a].count;
  }
}

Vec grid_point(const std::vector<GridAxis>& axes, const std::vector<int>& idx) {
  Vec p(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a)
    p(a) = axes[a].center + (idx[a] - axes[a].count / 2) * axes[a].step;
  return p;
}

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

// F(m) = sum_j e^{sign * i * t_m . s_j} g_j over the dual pair of centered
// grids; realized as a rank-d FFT with per-axis phase ramps.
std::vector<cplx> grid_fourier(const std::vector<GridAxis>& in_axes, const std::vector<cplx>& in,
                               const std::vector<GridAxis>& out_axes, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> work(n);
  const auto naxes = in_axes.size();
  std::vector<int> idx(naxes);

  for (std::size_t flat = 0; flat < n; ++flat) {
    unflatten(flat, in_axes, idx);
    double phase = 0.0;
    int parity = 0;
    for (std::size_t a = 0; a < naxes; ++a) {
      phase += out_axes[a].center * (idx[a] - in_axes[a].count / 2) * in_axes[a].step;
      parity ^= idx[a] & 1;
    }
    cplx ramp = std::polar(1.0, sign * phase);
    if (parity) ramp = -ramp;
    work[flat] = in[flat] * ramp;
  }

  std::vector<int> counts(naxes);
  for (std::size_t a = 0; a < naxes; ++a) counts[a] = in_axes[a].count;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan plan = fftw_plan_dft(static_cast<int>(naxes), counts.data(),
                                   reinterpret_cast<fftw_complex*>(work.data()),
                                   reinterpret_cast<fftw_complex*>(work.data()),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  int half_parity = 0;
  for (std::size_t a = 0; a < naxes; ++a) half_parity ^= (in_axes[a].count / 2) & 1;
  for (std::size_t flat = 0; flat < n; ++flat) {
    unflatten(flat, out_axes, idx);
    double phase = 0.0;
    int parity = half_parity;
    for (std::size_t a = 0; a < naxes; ++a) {
      const double t = out_axes[a].center + (idx[a] - out_axes[a].count / 2) * out_axes[a].step;
      phase += t * in_axes[a].center;
      parity ^= idx[a] & 1;
    }
    cplx ramp = std::polar(1.0, sign * phase);
    if (parity) ramp = -ramp;
    work[flat] *= ramp;
  }
  return work;
}

}  // namespace

cplx GridCF::at(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) flat = flat * axes[a].count + idx[a];
  return values[flat];
}

Vec GridCF::point(const std::vector<int>& idx) const { return grid_point(axes, idx); }

double GridCF::boundary_magnitude() const {
  double worst = 0.0;
  std::vector<int> idx(axes.size());
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    unflatten(flat, axes, idx);
    bool edge = false;
    for (std::size_t a = 0; a < axes.size(); ++a)
      if (idx[a] == 0 || idx[a] == axes[a].count - 1) edge = true;
    if (edge) worst = std::max(worst, std::abs(values[flat]));
  }
  return worst;
}

GridCF sample_cf(const CfFn& chi, const std::vector<GridAxis>& axes) {
  check_axes(axes, "sample_cf");
  GridCF out;
  out.axes = axes;
  out.values.resize(total_samples(axes));
  std::vector<int> idx(axes.size());
  for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
    unflatten(flat, axes, idx);
    out.values[flat] = chi(grid_point(axes, idx));
  }
  return out;
}

double DensityGrid::integral() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * cell_volume;
}

double DensityGrid::min_value() const {
  double m = values.empty() ? 0.0 : values[0];
  for (double v : values) m = std::min(m, v);
  return m;
}

double DensityGrid::at(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) flat = flat * axes[a].count + idx[a];
  return values[flat];
}

Vec DensityGrid::point(const std::vector<int>& idx) const { return grid_point(axes, idx); }

DensityGrid wigner_from_cf(const GridCF& cf, const std::vector<double>& centers,
                           double boundary_tol) {
  check_axes(cf.axes, "wigner_from_cf");
  if (!centers.empty() && centers.size() != cf.axes.size())
    throw std::invalid_argument("wigner_from_cf: center count mismatch");

  DensityGrid out;
  out.axes.resize(cf.axes.size());
  double cell = 1.0, scale = 1.0;
  for (std::size_t a = 0; a < cf.axes.size(); ++a) {
    const auto& ax = cf.axes[a];
    out.axes[a].count = ax.count;
    out.axes[a].step = 2.0 * M_PI / (ax.count * ax.step);
    out.axes[a].center = centers.empty() ? 0.0 : centers[a];
    cell *= out.axes[a].step;
    scale *= ax.step / (2.0 * M_PI);
  }
  out.cell_volume = cell;
  out.boundary_cf_magnitude = cf.boundary_magnitude();
  out.aliasing_warning = out.boundary_cf_magnitude > boundary_tol;

  const auto transformed = grid_fourier(cf.axes, cf.values, out.axes, -1);
  out.values.resize(transformed.size());
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    out.values[i] = transformed[i].real() * scale;
    out.max_imag_residual = std::max(out.max_imag_residual, std::abs(transformed[i].imag()) * scale);
  }
  return out;
}

GridCF cf_from_density(const DensityGrid& density, const std::vector<GridAxis>& cf_axes) {
  check_axes(density.axes, "cf_from_density");
  for (std::size_t a = 0; a < cf_axes.size(); ++a) {
    const double dual = 2.0 * M_PI / (cf_axes[a].count * cf_axes[a].step);
    if (std::abs(dual - density.axes[a].step) > 1e-12 * dual)
      throw std::invalid_argument("cf_from_density: grids are not a dual pair");
  }
  std::vector<cplx> complex_density(density.values.begin(), density.values.end());
  GridCF out;
  out.axes = cf_axes;
  out.values = grid_fourier(density.axes, complex_density, cf_axes, +1);
  for (auto& v : out.values) v *= density.cell_volume;
  return out;
}

cplx quantum_marginal_cf(const CfFn& chi, const Dims& dims, const Vec& zeta) {
  return chi(embed_quantum(dims, zeta));
}

DensityGrid classical_marginal_density(const CfFn& chi, const Dims& dims,
                                       const std::vector<GridAxis>& k_axes, double boundary_tol) {
  if (static_cast<int>(k_axes.size()) != dims.s)
    throw std::invalid_argument("classical_marginal_density: need one axis per classical coordinate");
  auto marginal = [&](const Vec& k) { return chi(embed_classical(dims, k)); };
  return wigner_from_cf(sample_cf(marginal, k_axes), {}, boundary_tol);
}

double state_cf_psd_diagnostic(const CfFn& chi, const Mat& sigma, const std::vector<Vec>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("state_cf_psd_diagnostic: need at least one point");
  CMat M(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      M(k, l) = chi(points[k] - points[l]) *
                std::polar(1.0, 0.5 * points[k].dot(sigma * points[l]));
  CMat H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace hyq
