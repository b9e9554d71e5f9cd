#include "hyq/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyq {

namespace {

Vec assemble_xi(const Dims& dims, const Vec& zeta, const Vec& k) {
  if (zeta.size() != 2 * dims.n) throw std::invalid_argument("instruments: zeta must have length 2n");
  if (k.size() != dims.s) throw std::invalid_argument("instruments: k must have length s");
  Vec xi(dims.d);
  xi.head(2 * dims.n) = zeta;
  xi.tail(dims.s) = k;
  return xi;
}

double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Closed-form box factor: prod_i int_{a_i}^{b_i} e^{-i z k_i} dz.
cplx box_factor(const Box& box, const Vec& k) {
  cplx out{1.0, 0.0};
  for (int i = 0; i < k.size(); ++i) {
    const double len = box.hi(i) - box.lo(i);
    const double mid = 0.5 * (box.hi(i) + box.lo(i));
    out *= len * sinc(0.5 * len * k(i)) * std::polar(1.0, -mid * k(i));
  }
  return out;
}

}  // namespace

Box make_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("make_box: dimension mismatch");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo(i) < hi(i))) throw std::invalid_argument("make_box: need lo < hi per axis");
  return Box{std::move(lo), std::move(hi)};
}

WeylAction characteristic_operator(const HybridModel& model, double t, const Vec& k,
                                   const Vec& zeta, const QuadratureSettings& settings) {
  const Vec xi = assemble_xi(model.dims, zeta, k);
  const Vec pushed = propagator(model.Z, t) * xi;
  WeylAction action;
  action.coefficient = std::exp(capital_psi(model, t, xi, settings));
  action.out_zeta = quantum_part(model.dims, pushed);
  action.x_phase = classical_part(model.dims, pushed);
  return action;
}

cplx multi_time_cf(const HybridModel& model, const GaussianHybridState& initial,
                   const std::vector<double>& times, const std::vector<Vec>& ks, const Vec& zeta,
                   const QuadratureSettings& settings) {
  const std::size_t m = times.size();
  if (m == 0 || ks.size() != m)
    throw std::invalid_argument("multi_time_cf: need matching, nonempty times and probes");
  if (times[0] < 0.0) throw std::invalid_argument("multi_time_cf: times must be nonnegative");
  for (std::size_t l = 0; l + 1 < m; ++l)
    if (!(times[l] < times[l + 1]))
      throw std::invalid_argument("multi_time_cf: times must be strictly increasing");
  if (initial.mean.size() != model.dims.d)
    throw std::invalid_argument("multi_time_cf: initial state dimension mismatch");

  // Backward recursion for the accumulated probe vectors.
  std::vector<Vec> xi(m);
  xi[m - 1] = assemble_xi(model.dims, zeta, ks[m - 1]);
  for (std::size_t l = m - 1; l-- > 0;) {
    const double gap = times[l + 1] - times[l];
    xi[l] = propagator(model.Z, gap) * xi[l + 1] + embed_classical(model.dims, ks[l]);
  }

  cplx exponent{0.0, 0.0};
  for (std::size_t l = 0; l < m; ++l) {
    const double gap = times[l] - (l == 0 ? 0.0 : times[l - 1]);
    exponent += capital_psi(model, gap, xi[l], settings);
  }
  return std::exp(exponent) * gaussian_cf(initial, propagator(model.Z, times[0]) * xi[0]);
}

namespace {

// Shared k-grid sweep for the box-conditioned integrals. Evaluates
// (2pi)^-s sum_k dk^s box(k) e^{Psi_t(xi(k)) + i x . P0 S_t xi(k)} chi_rho0(P1 S_t xi(k))
// with xi(k) = (zeta, k), and reports the max CF magnitude on the grid edge.
struct BoxIntegral {
  cplx value;
  double aliasing;
};

BoxIntegral box_integral(const HybridModel& model, const GaussianHybridState& rho0,
                         const Box& box, const Vec& x, const Vec& zeta, const KGridSettings& grid,
                         const FrozenPsi& psi, const Mat& St) {
  const int s = model.dims.s;
  if (grid.count < 2 || grid.count % 2 != 0)
    throw std::invalid_argument("box_integral: grid count must be even and >= 2");
  const double dk = 2.0 * grid.radius / grid.count;
  const std::size_t total = [&] {
    std::size_t n = 1;
    for (int a = 0; a < s; ++a) n *= static_cast<std::size_t>(grid.count);
    return n;
  }();

  BoxIntegral out{cplx{0.0, 0.0}, 0.0};
  std::vector<int> idx(s, 0);
  Vec k(s), xi(model.dims.d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    bool edge = false;
    for (int a = s - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % grid.count);
      rem /= grid.count;
      if (idx[a] == 0 || idx[a] == grid.count - 1) edge = true;
    }
    for (int a = 0; a < s; ++a) k(a) = (idx[a] - grid.count / 2) * dk;
    xi.head(2 * model.dims.n) = zeta;
    xi.tail(s) = k;
    const Vec pushed = St * xi;
    const cplx cf = std::exp(psi(xi) + cplx(0.0, x.dot(pushed.tail(s)))) *
                    gaussian_cf(rho0, pushed.head(2 * model.dims.n));
    if (edge) out.aliasing = std::max(out.aliasing, std::abs(cf));
    out.value += cf * box_factor(box, k);
  }
  out.value *= std::pow(dk / (2.0 * M_PI), s);
  return out;
}

std::vector<Vec> grid_probes(const Dims& dims, const Vec& zeta, const KGridSettings& grid) {
  std::vector<Vec> probes;
  Vec xi = Vec::Zero(dims.d);
  xi.head(2 * dims.n) = zeta;
  probes.push_back(xi);  // k = 0
  for (int a = 0; a < dims.s; ++a) {
    Vec v = xi;
    v(2 * dims.n + a) = grid.radius;
    probes.push_back(v);
    v(2 * dims.n + a) = -grid.radius;
    probes.push_back(v);
  }
  Vec corner = xi;
  corner.tail(dims.s).setConstant(grid.radius);
  probes.push_back(corner);
  return probes;
}

}  // namespace

ConditionalProbability conditional_probability(const HybridModel& model,
                                               const GaussianHybridState& rho0_quantum, double t,
                                               const Box& box, const Vec& x,
                                               const KGridSettings& grid,
                                               const QuadratureSettings& settings) {
  if (box.lo.size() != model.dims.s || x.size() != model.dims.s)
    throw std::invalid_argument("conditional_probability: classical dimension mismatch");
  if (rho0_quantum.mean.size() != 2 * model.dims.n)
    throw std::invalid_argument("conditional_probability: quantum state dimension mismatch");
  const Vec zeta = Vec::Zero(2 * model.dims.n);
  FrozenPsi psi(model, t, grid_probes(model.dims, zeta, grid), settings);
  const Mat St = propagator(model.Z, t);
  const BoxIntegral integral = box_integral(model, rho0_quantum, box, x, zeta, grid, psi, St);
  ConditionalProbability result;
  result.raw = integral.value.real();
  result.probability = std::clamp(result.raw, 0.0, 1.0);
  result.aliasing = integral.aliasing;
  return result;
}

cplx conditional_state_cf(const HybridModel& model, const GaussianHybridState& rho0_quantum,
                          double t, const Box& box, const Vec& x, const Vec& zeta,
                          const KGridSettings& grid, const QuadratureSettings& settings,
                          double probability_floor) {
  if (zeta.size() != 2 * model.dims.n)
    throw std::invalid_argument("conditional_state_cf: zeta dimension mismatch");
  // One frozen rule covering both the numerator (zeta) and normalization (0)
  // sweeps keeps their quadrature errors aligned.
  auto probes = grid_probes(model.dims, zeta, grid);
  auto zero_probes = grid_probes(model.dims, Vec::Zero(zeta.size()), grid);
  probes.insert(probes.end(), zero_probes.begin(), zero_probes.end());
  FrozenPsi psi(model, t, probes, settings);
  const Mat St = propagator(model.Z, t);
  const cplx numerator = box_integral(model, rho0_quantum, box, x, zeta, grid, psi, St).value;
  const double denom = box_integral(model, rho0_quantum, box, x, Vec::Zero(zeta.size()), grid,
                                    psi, St).value.real();
  if (!(denom > probability_floor))
    throw std::runtime_error("conditional_state_cf: conditioning probability below floor");
  return numerator / denom;
}

double composition_check(const HybridModel& model, double t, double tprime,
                         const std::vector<Vec>& k_probes, const Vec& zeta,
                         const QuadratureSettings& settings) {
  double worst = 0.0;
  for (const Vec& k : k_probes) {
    const Vec xi = assemble_xi(model.dims, zeta, k);
    const cplx one_step = std::exp(capital_psi(model, t + tprime, xi, settings));
    const Vec one_out = propagator(model.Z, t + tprime) * xi;

    const Vec xi1 = propagator(model.Z, tprime) * xi;
    const cplx two_step =
        std::exp(capital_psi(model, t, xi1, settings) + capital_psi(model, tprime, xi, settings));
    const Vec two_out = propagator(model.Z, t) * xi1;

    worst = std::max(worst, std::abs(one_step - two_step));
    worst = std::max(worst, (one_out - two_out).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hyq
