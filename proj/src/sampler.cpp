#include "hyq/sampler.hpp"

#include <Eigen/Eigenvalues>
#include <cstdlib>
#include <cstring>
#include <ostream>
#include <istream>
#include <stdexcept>
#include <thread>

#include "hyq/propagation.hpp"

namespace hyq {

Vec PathEnsemble::state(int path, int step) const {
  Vec out(s);
  for (int c = 0; c < s; ++c) out(c) = x(path, step, c);
  return out;
}

namespace {

void require_classical(const HybridModel& model, const char* who) {
  if (model.dims.n != 0)
    throw std::invalid_argument(std::string(who) + ": needs a pure classical model (n = 0)");
  if (!model.validated) throw std::invalid_argument(std::string(who) + ": model failed validation");
}

// Square root factor of a PSD matrix via its eigendecomposition; tolerates
// rank deficiency (noiseless coordinates).
Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Vec lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lambda.asDiagonal();
}

int thread_count_from_env() {
  if (const char* env = std::getenv("HYQSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace

Vec sample_levy_increment(const HybridModel& classical, double dt, CounterRng& rng) {
  require_classical(classical, "sample_levy_increment");
  const int s = classical.dims.s;
  const Mat root = psd_sqrt(classical.triplet.A * dt);
  Vec z(s);
  for (int i = 0; i < s; ++i) z(i) = rng.normal();
  Vec incr = classical.alpha_uncompensated() * dt + root * z;
  for (const auto& atom : classical.jump_atoms) {
    const int count = rng.poisson(atom.weight * dt);
    if (count > 0) incr += static_cast<double>(count) * atom.eta;
  }
  return incr;
}

InitialSampler point_initial(Vec x0) {
  return [x0 = std::move(x0)](CounterRng&) { return x0; };
}

InitialSampler gaussian_initial(GaussianHybridState state) {
  Mat root = psd_sqrt(state.cov);
  return [mean = std::move(state.mean), root = std::move(root)](CounterRng& rng) {
    Vec z(mean.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return Vec(mean + root * z);
  };
}

PathEnsemble sample_ou_paths(const HybridModel& classical, const InitialSampler& initial, double T,
                             int nsteps, int npaths, std::uint64_t seed) {
  require_classical(classical, "sample_ou_paths");
  if (nsteps < 1 || npaths < 1 || !(T > 0.0))
    throw std::invalid_argument("sample_ou_paths: need T > 0, nsteps >= 1, npaths >= 1");
  const int s = classical.dims.s;
  const double dt = T / nsteps;

  // Per-step transport and exact Gaussian step statistics, computed once.
  const Mat step_map = propagator(classical.Z, dt).transpose();
  const Mat gauss_root = psd_sqrt(gaussian_cov_integral(classical, dt));
  const Vec gauss_mean = drift_integral(classical, dt, classical.alpha_uncompensated());

  PathEnsemble ens;
  ens.dt = dt;
  ens.nsteps = nsteps;
  ens.npaths = npaths;
  ens.s = s;
  ens.seed = seed;
  ens.data.resize(static_cast<std::size_t>(npaths) * (nsteps + 1) * s);

  auto run_range = [&](int first, int last) {
    Vec z(s), x(s);
    for (int p = first; p < last; ++p) {
      CounterRng init_rng(seed, static_cast<std::uint64_t>(p), 0);
      x = initial(init_rng);
      if (x.size() != s) throw std::invalid_argument("sample_ou_paths: initial sampler dimension");
      double* row = &ens.data[static_cast<std::size_t>(p) * (nsteps + 1) * s];
      for (int c = 0; c < s; ++c) row[c] = x(c);
      for (int k = 0; k < nsteps; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k) + 1);
        for (int i = 0; i < s; ++i) z(i) = rng.normal();
        Vec xi = gauss_mean + gauss_root * z;
        for (const auto& atom : classical.jump_atoms) {
          const int count = rng.poisson(atom.weight * dt);
          if (count > 0) xi += static_cast<double>(count) * atom.eta;
        }
        x = step_map * x + xi;
        double* out = row + static_cast<std::size_t>(k + 1) * s;
        for (int c = 0; c < s; ++c) out[c] = x(c);
      }
    }
  };

  const int nthreads = std::min(thread_count_from_env(), npaths);
  if (nthreads <= 1) {
    run_range(0, npaths);
  } else {
    std::vector<std::thread> workers;
    const int chunk = (npaths + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
      const int first = w * chunk;
      const int last = std::min(npaths, first + chunk);
      if (first < last) workers.emplace_back(run_range, first, last);
    }
    for (auto& th : workers) th.join();
  }
  return ens;
}

cplx empirical_cf(const PathEnsemble& ensemble, int time_index, const Vec& k) {
  if (time_index < 0 || time_index > ensemble.nsteps)
    throw std::invalid_argument("empirical_cf: time index out of range");
  if (k.size() != ensemble.s) throw std::invalid_argument("empirical_cf: k dimension mismatch");
  double re = 0.0, im = 0.0;
  for (int p = 0; p < ensemble.npaths; ++p) {
    double phase = 0.0;
    for (int c = 0; c < ensemble.s; ++c) phase += k(c) * ensemble.x(p, time_index, c);
    re += std::cos(phase);
    im += std::sin(phase);
  }
  return cplx(re, im) / static_cast<double>(ensemble.npaths);
}

cplx transition_cf(const HybridModel& classical, double t, const Vec& x0, const Vec& k) {
  require_classical(classical, "transition_cf");
  const Vec pushed = propagator(classical.Z, t).transpose() * x0;
  return std::exp(capital_psi(classical, t, k) + cplx(0.0, k.dot(pushed)));
}

DensityGrid transition_density(const HybridModel& classical, double t, const Vec& x0,
                               const std::vector<GridAxis>& k_axes, double boundary_tol) {
  require_classical(classical, "transition_density");
  std::vector<Vec> probes;
  Vec extreme(static_cast<int>(k_axes.size()));
  for (std::size_t a = 0; a < k_axes.size(); ++a)
    extreme(a) = k_axes[a].center + k_axes[a].step * (k_axes[a].count / 2);
  probes.push_back(extreme);
  for (std::size_t a = 0; a < k_axes.size(); ++a) {
    Vec v = Vec::Zero(extreme.size());
    v(a) = extreme(a);
    probes.push_back(v);
  }
  FrozenPsi psi(classical, t, probes);
  const Vec pushed = propagator(classical.Z, t).transpose() * x0;
  auto chi = [&](const Vec& k) { return std::exp(psi(k) + cplx(0.0, k.dot(pushed))); };
  // Center the density grid on the transported start point.
  std::vector<double> centers(pushed.data(), pushed.data() + pushed.size());
  return wigner_from_cf(sample_cf(chi, k_axes), centers, boundary_tol);
}

void write_ensemble_text(const PathEnsemble& ensemble, std::ostream& os) {
  os << "# time path";
  for (int c = 0; c < ensemble.s; ++c) os << " x" << (c + 1);
  os << "\n";
  char buf[64];
  for (int p = 0; p < ensemble.npaths; ++p)
    for (int k = 0; k <= ensemble.nsteps; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", k * ensemble.dt);
      os << buf << ' ' << p;
      for (int c = 0; c < ensemble.s; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", ensemble.x(p, k, c));
        os << ' ' << buf;
      }
      os << '\n';
    }
}

namespace {
constexpr char kEnsembleMagic[4] = {'H', 'Y', 'Q', 'E'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
}  // namespace

void write_ensemble_binary(const PathEnsemble& ensemble, std::ostream& os) {
  os.write(kEnsembleMagic, 4);
  put<std::uint32_t>(os, 1);  // layout version
  put<std::uint64_t>(os, ensemble.seed);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ensemble.npaths));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ensemble.nsteps));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ensemble.s));
  put<double>(os, ensemble.dt);
  os.write(reinterpret_cast<const char*>(ensemble.data.data()),
           static_cast<std::streamsize>(ensemble.data.size() * sizeof(double)));
}

PathEnsemble read_ensemble_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kEnsembleMagic, 4) != 0)
    throw std::runtime_error("read_ensemble_binary: bad magic");
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("read_ensemble_binary: bad version");
  PathEnsemble ens;
  ens.seed = get<std::uint64_t>(is);
  ens.npaths = static_cast<int>(get<std::uint32_t>(is));
  ens.nsteps = static_cast<int>(get<std::uint32_t>(is));
  ens.s = static_cast<int>(get<std::uint32_t>(is));
  ens.dt = get<double>(is);
  ens.data.resize(static_cast<std::size_t>(ens.npaths) * (ens.nsteps + 1) * ens.s);
  is.read(reinterpret_cast<char*>(ens.data.data()),
          static_cast<std::streamsize>(ens.data.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_ensemble_binary: truncated data");
  return ens;
}

}  // namespace hyq
