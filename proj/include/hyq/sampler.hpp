#pragma once

#include <cstdint>
#include <iosfwd>

#include "hyq/model.hpp"
#include "hyq/rng.hpp"
#include "hyq/states.hpp"

namespace hyq {

/// Monte Carlo trajectories of the classical component on a uniform time
/// grid t_k = k dt, k = 0..nsteps. Reproducible bit-for-bit from
/// (seed, npaths, nsteps, model); see CounterRng for the stream contract.
struct PathEnsemble {
  double dt = 0.0;
  int nsteps = 0;
  int npaths = 0;
  int s = 0;
  std::uint64_t seed = 0;
  std::vector<double> data;  // path-major: [path][step][component]

  double x(int path, int step, int comp) const {
    return data[(static_cast<std::size_t>(path) * (nsteps + 1) + step) * s + comp];
  }
  Vec state(int path, int step) const;
};

/// One increment of the driving Levy process B over dt: Gaussian part with
/// the compensated drift folded in, plus Poisson(w dt) jumps per node.
Vec sample_levy_increment(const HybridModel& classical, double dt, CounterRng& rng);

using InitialSampler = std::function<Vec(CounterRng&)>;

InitialSampler point_initial(Vec x0);
InitialSampler gaussian_initial(GaussianHybridState state);

/// Ornstein-Uhlenbeck-type paths with exact-in-law per-step transport:
/// X_{k+1} = S_dt^T X_k + xi_dt. The Gaussian part of xi_dt carries the
/// exact step covariance A_dt = int_0^dt S^T A S; jumps are drawn per node
/// and placed at the step end (transport bias O(dt)). Streams are keyed by
/// (seed, path, step), so the ensemble is independent of the thread count
/// (HYQSIM_THREADS).
PathEnsemble sample_ou_paths(const HybridModel& classical, const InitialSampler& initial, double T,
                             int nsteps, int npaths, std::uint64_t seed);

/// (1/npaths) sum_j exp(i k . X_j(t_index)).
cplx empirical_cf(const PathEnsemble& ensemble, int time_index, const Vec& k);

/// Characteristic function of the transition probability P_t(.|x0):
/// exp(i k . S_t^T x0 + Psi_t(k)).
cplx transition_cf(const HybridModel& classical, double t, const Vec& x0, const Vec& k);

/// Transition density on a grid, by Fourier inversion of transition_cf.
DensityGrid transition_density(const HybridModel& classical, double t, const Vec& x0,
                               const std::vector<GridAxis>& k_axes, double boundary_tol = 1e-6);

void write_ensemble_text(const PathEnsemble& ensemble, std::ostream& os);
void write_ensemble_binary(const PathEnsemble& ensemble, std::ostream& os);
PathEnsemble read_ensemble_binary(std::istream& is);

}  // namespace hyq
