// hyqsim: batch front end for quasi-free hybrid dynamics at the
// characteristic-function level. Subcommands parse a model (file or built-in
// example), dispatch to the library, and emit '#'-headed CSV tables with
// deterministic 17-digit formatting.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hyq/example_models.hpp"
#include "hyq/instruments.hpp"
#include "hyq/model_io.hpp"
#include "hyq/propagation.hpp"
#include "hyq/sampler.hpp"
#include "hyq/states.hpp"

using namespace hyq;
namespace io = hyq::io;

namespace {

HybridModel built_in_example(const std::string& name) {
  if (name == "quantum_boltzmann") return examples::build_quantum_boltzmann({});
  if (name == "optomechanical") return examples::build_optomechanical({});
  if (name == "classical_oscillator") return examples::build_classical_oscillator({});
  if (name == "hybrid_opto") return examples::build_hybrid_opto({});
  throw std::runtime_error(
      "unknown example '" + name +
      "' (have: quantum_boltzmann, optomechanical, classical_oscillator, hybrid_opto)");
}

HybridModel resolve_model(const std::string& model_path, const std::string& example) {
  if (!model_path.empty() && !example.empty())
    throw std::runtime_error("give either --model or --example, not both");
  if (!model_path.empty()) return io::load_model(model_path);
  if (!example.empty()) return built_in_example(example);
  throw std::runtime_error("need --model FILE or --example NAME");
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

Vec section_vector(const io::ConfigSection& s, const std::string& key, int expect = -1) {
  const auto* e = s.find(key);
  if (!e) throw io::ParseError("missing '" + key + "'", s.line, key);
  auto nums = io::parse_numbers(e->value, e->line, key);
  if (expect >= 0 && static_cast<int>(nums.size()) != expect)
    throw io::ParseError("'" + key + "' must have " + std::to_string(expect) + " entries", e->line,
                         key);
  return to_vec(nums);
}

Mat section_matrix(const io::ConfigSection& s, const std::string& name, int d) {
  Mat out(d, d);
  for (int r = 0; r < d; ++r) {
    const std::string key = name + ".row" + std::to_string(r);
    const auto* e = s.find(key);
    if (!e) throw io::ParseError("missing '" + key + "'", s.line, key);
    const auto row = io::parse_numbers(e->value, e->line, key);
    if (static_cast<int>(row.size()) != d)
      throw io::ParseError("'" + key + "' must have " + std::to_string(d) + " entries", e->line, key);
    for (int c = 0; c < d; ++c) out(r, c) = row[c];
  }
  return out;
}

std::vector<Vec> repeated_vectors(const io::ConfigSection& s, const std::string& key, int expect) {
  std::vector<Vec> out;
  for (const auto& e : s.entries)
    if (e.key == key) {
      auto nums = io::parse_numbers(e.value, e.line, key);
      if (static_cast<int>(nums.size()) != expect)
        throw io::ParseError("'" + key + "' must have " + std::to_string(expect) + " entries",
                             e.line, key);
      out.push_back(to_vec(nums));
    }
  return out;
}

GaussianHybridState parse_state(const io::ConfigDoc& doc, const std::string& section_name, int dim) {
  const auto* s = doc.find(section_name);
  if (!s) throw std::runtime_error("config needs a [" + section_name + "] section");
  GaussianHybridState state;
  state.mean = section_vector(*s, "mean", dim);
  state.cov = section_matrix(*s, "cov", dim);
  return state;
}

std::vector<GridAxis> parse_grid(const io::ConfigDoc& doc, int expect_axes) {
  const auto* s = doc.find("grid");
  if (!s) throw std::runtime_error("config needs a [grid] section");
  std::vector<GridAxis> axes;
  for (const auto& e : s->entries)
    if (e.key == "axis") {
      const auto nums = io::parse_numbers(e.value, e.line, "axis");
      if (nums.size() != 3) throw io::ParseError("axis = center step count", e.line, "axis");
      axes.push_back({nums[0], nums[1], static_cast<int>(nums[2])});
    }
  if (expect_axes >= 0 && static_cast<int>(axes.size()) != expect_axes)
    throw std::runtime_error("grid must declare " + std::to_string(expect_axes) + " axes");
  return axes;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

void emit_matrix(std::ostream& os, const std::string& label, const Mat& m) {
  for (int r = 0; r < m.rows(); ++r) {
    os << "# " << label << ".row" << r << " =";
    for (int c = 0; c < m.cols(); ++c) os << ' ' << io::format_double(m(r, c));
    os << '\n';
  }
}

int cmd_validate(const std::string& model_path, const std::string& example, double tol) {
  HybridModel model;
  try {
    model = resolve_model(model_path, example);
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  }
  if (tol != 1e-10)
    model = HybridModel::build(model.dims, model.Z.Z, model.triplet, tol);

  std::cout << "dims: n = " << model.dims.n << ", s = " << model.dims.s << ", d = " << model.dims.d
            << '\n';
  std::cout << "positivity: " << (model.positivity.pass ? "PASS" : "FAIL")
            << "  (min eigenvalue of A + iB = " << io::format_double(model.positivity.min_eigenvalue)
            << ")\n";
  emit_matrix(std::cout, "B", model.positivity.B);
  std::cout << "levy measure: " << (model.levy_diag.ok ? "PASS" : "FAIL") << '\n';
  std::cout << "#   small-ball quadratic sum = "
            << io::format_double(model.levy_diag.small_ball_quadratic_sum) << '\n';
  std::cout << "#   tail mass = " << io::format_double(model.levy_diag.tail_mass) << '\n';
  std::cout << "#   tail first moment = " << io::format_double(model.levy_diag.tail_first_moment)
            << '\n';
  for (const auto& issue : model.levy_diag.issues) std::cout << "#   issue: " << issue << '\n';
  const auto flags = classify_interactions(model);
  std::cout << "interactions: K1 " << (flags.k1 ? "active" : "inactive") << ", K2 "
            << (flags.k2 ? "active" : "inactive") << ", K3 " << (flags.k3 ? "active" : "inactive")
            << ", K4 " << (flags.k4 ? "active" : "inactive") << '\n';
  std::cout << "verdict: " << (model.validated ? "PASS" : "FAIL") << '\n';
  return model.validated ? 0 : 1;
}

int cmd_export(const std::string& example, const std::string& out) {
  auto os = open_out(out);
  io::write_model(built_in_example(example), os);
  return 0;
}

int cmd_propagate(const HybridModel& model, const io::ConfigDoc& cfg, const std::string& out) {
  const auto state = parse_state(cfg, "state", model.dims.d);
  const auto* time_section = cfg.find("time");
  if (!time_section) throw std::runtime_error("config needs a [time] section");
  const auto times = io::parse_numbers(time_section->require("times"), time_section->line, "times");
  const auto* probe_section = cfg.find("probe");
  if (!probe_section) throw std::runtime_error("config needs a [probe] section");
  const auto probes = repeated_vectors(*probe_section, "xi", model.dims.d);
  if (probes.empty()) throw std::runtime_error("[probe] must list at least one xi");

  auto os = open_out(out);
  os << "# hyqsim propagate\n";
  os << "# dims n=" << model.dims.n << " s=" << model.dims.s << '\n';
  os << "# columns: t";
  for (int i = 0; i < model.dims.d; ++i) os << " xi" << i;
  os << " re_chi im_chi\n";
  const CfFn chi0 = gaussian_cf_fn(state);
  for (double t : times)
    for (const auto& xi : probes) {
      const cplx value = evolve_cf(model, chi0, t, xi);
      os << io::format_double(t);
      for (int i = 0; i < xi.size(); ++i) os << ',' << io::format_double(xi(i));
      os << ',' << io::format_double(value.real()) << ',' << io::format_double(value.imag()) << '\n';
    }
  return 0;
}

int cmd_wigner(const HybridModel& model, const io::ConfigDoc& cfg, const std::string& out) {
  const auto state = parse_state(cfg, "state", model.dims.d);
  const auto* time_section = cfg.find("time");
  if (!time_section) throw std::runtime_error("config needs a [time] section");
  const double t = io::parse_number(time_section->require("t"), time_section->line, "t");
  const auto axes = parse_grid(cfg, model.dims.d);

  std::vector<double> centers;
  if (const auto* grid = cfg.find("grid"))
    if (const auto* e = grid->find("centers")) {
      const auto nums = io::parse_numbers(e->value, e->line, "centers");
      if (static_cast<int>(nums.size()) != model.dims.d)
        throw io::ParseError("centers must have d entries", e->line, "centers");
      centers = nums;
    }

  std::vector<Vec> probes;
  Vec corner(model.dims.d);
  for (int a = 0; a < model.dims.d; ++a) corner(a) = axes[a].center + axes[a].step * (axes[a].count / 2);
  probes.push_back(corner);
  probes.push_back(Vec::Zero(model.dims.d));
  FrozenPsi psi(model, t, probes);
  const Mat St = propagator(model.Z, t);
  auto chi_t = [&](const Vec& xi) { return std::exp(psi(xi)) * gaussian_cf(state, St * xi); };

  const auto density = wigner_from_cf(sample_cf(chi_t, axes), centers);
  auto os = open_out(out);
  os << "# hyqsim wigner\n";
  os << "# t = " << io::format_double(t) << '\n';
  os << "# integral = " << io::format_double(density.integral()) << '\n';
  os << "# min_value = " << io::format_double(density.min_value()) << '\n';
  os << "# boundary_cf_magnitude = " << io::format_double(density.boundary_cf_magnitude)
     << (density.aliasing_warning ? "  WARNING: grid may not resolve the CF decay" : "") << '\n';
  os << "# columns: z... w\n";
  std::vector<int> idx(density.axes.size(), 0);
  for (std::size_t flat = 0; flat < density.values.size(); ++flat) {
    std::size_t rem = flat;
    for (int a = static_cast<int>(density.axes.size()) - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % density.axes[a].count);
      rem /= density.axes[a].count;
    }
    const Vec z = density.point(idx);
    for (int a = 0; a < z.size(); ++a) os << io::format_double(z(a)) << ',';
    os << io::format_double(density.values[flat]) << '\n';
  }
  return density.aliasing_warning ? 1 : 0;
}

int cmd_equilibrium(const HybridModel& model, const io::ConfigDoc& cfg, const std::string& out) {
  const auto* probe_section = cfg.find("probe");
  if (!probe_section) throw std::runtime_error("config needs a [probe] section");
  const auto probes = repeated_vectors(*probe_section, "xi", model.dims.d);
  if (probes.empty()) throw std::runtime_error("[probe] must list at least one xi");

  auto os = open_out(out);
  os << "# hyqsim equilibrium\n";
  os << "# columns: xi... re_psi_inf im_psi_inf tail_bound\n";
  for (const auto& xi : probes) {
    const auto val = equilibrium_psi(model, xi);
    for (int i = 0; i < xi.size(); ++i) os << io::format_double(xi(i)) << ',';
    os << io::format_double(val.psi_inf.real()) << ',' << io::format_double(val.psi_inf.imag())
       << ',' << io::format_double(val.tail_bound) << '\n';
  }

  // Gaussian-part summary: the exact noise integral and, for comparison, the
  // covariance read off the equilibrium CF by finite differences.
  try {
    const Mat a_inf = equilibrium_gaussian_cov(model);
    emit_matrix(os, "A_infinity", a_inf);
  } catch (const NoEquilibriumError&) {
    os << "# A_infinity unavailable: Z is not a global contraction\n";
  }
  const int qdim = 2 * model.dims.n;
  if (qdim > 0) {
    auto reduced = [&](const Vec& zeta) {
      return equilibrium_psi(model, embed_quantum(model.dims, zeta)).psi_inf;
    };
    try {
      emit_matrix(os, "quantum_equilibrium_cov", negative_hessian_at_zero(reduced, qdim));
    } catch (const NoEquilibriumError&) {
      os << "# quantum_equilibrium_cov unavailable\n";
    }
  }
  return 0;
}

int cmd_sample(const HybridModel& model, const io::ConfigDoc& cfg, const std::string& out,
               std::uint64_t seed_override, bool has_seed_override) {
  const auto* s = cfg.find("sampler");
  if (!s) throw std::runtime_error("config needs a [sampler] section");
  const double T = io::parse_number(s->require("T"), s->line, "T");
  const int nsteps = static_cast<int>(io::parse_integer(s->require("nsteps"), s->line, "nsteps"));
  const int npaths = static_cast<int>(io::parse_integer(s->require("npaths"), s->line, "npaths"));
  std::uint64_t seed = 1;
  if (const auto v = s->get("seed")) seed = static_cast<std::uint64_t>(io::parse_integer(*v, s->line, "seed"));
  if (has_seed_override) seed = seed_override;

  const HybridModel classical = model.dims.n == 0 ? model : reduce_classical(model);

  InitialSampler initial = point_initial(Vec::Zero(classical.dims.s));
  if (const auto* init = cfg.find("initial")) {
    if (init->find("x0")) {
      initial = point_initial(section_vector(*init, "x0", classical.dims.s));
    } else if (init->find("mean")) {
      GaussianHybridState st;
      st.mean = section_vector(*init, "mean", classical.dims.s);
      st.cov = section_matrix(*init, "cov", classical.dims.s);
      initial = gaussian_initial(std::move(st));
    }
  }

  const auto ensemble = sample_ou_paths(classical, initial, T, nsteps, npaths, seed);
  {
    auto os = open_out(out + ".paths.txt");
    write_ensemble_text(ensemble, os);
  }
  {
    std::ofstream os(out + ".paths.bin", std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + out + ".paths.bin");
    write_ensemble_binary(ensemble, os);
  }

  // ECF self-check against the analytic CF of the step recursion started
  // from the same initial law (point initials only; for Gaussian initials the
  // analytic reference multiplies in the initial CF).
  auto report = open_out(out + ".report.csv");
  report << "# hyqsim sample report\n";
  report << "# T = " << io::format_double(T) << " nsteps = " << nsteps << " npaths = " << npaths
         << " seed = " << seed << '\n';
  const double threshold = 5.0 / std::sqrt(static_cast<double>(npaths)) + 10.0 * (T / nsteps);
  report << "# threshold = 5/sqrt(npaths) + 10*dt = " << io::format_double(threshold) << '\n';
  report << "# columns: k... re_ecf im_ecf re_analytic im_analytic abs_err\n";

  double worst = 0.0;
  if (const auto* rep = cfg.find("report")) {
    int t_index = ensemble.nsteps;
    if (const auto v = rep->get("t_index"))
      t_index = static_cast<int>(io::parse_integer(*v, rep->line, "t_index"));
    const double t = t_index * ensemble.dt;
    Vec x0 = Vec::Zero(classical.dims.s);
    if (const auto* init = cfg.find("initial"))
      if (init->find("x0")) x0 = section_vector(*init, "x0", classical.dims.s);
    for (const auto& k : repeated_vectors(*rep, "k", classical.dims.s)) {
      const cplx ecf = empirical_cf(ensemble, t_index, k);
      const cplx analytic = transition_cf(classical, t, x0, k);
      const double err = std::abs(ecf - analytic);
      worst = std::max(worst, err);
      for (int i = 0; i < k.size(); ++i) report << io::format_double(k(i)) << ',';
      report << io::format_double(ecf.real()) << ',' << io::format_double(ecf.imag()) << ','
             << io::format_double(analytic.real()) << ',' << io::format_double(analytic.imag())
             << ',' << io::format_double(err) << '\n';
    }
    report << "# max_abs_err = " << io::format_double(worst) << '\n';
    report << "# verdict: " << (worst <= threshold ? "PASS" : "FAIL") << '\n';
  }
  return worst <= threshold ? 0 : 1;
}

int cmd_instrument(const HybridModel& model, const io::ConfigDoc& cfg, const std::string& out) {
  auto os = open_out(out);
  os << "# hyqsim instrument\n";
  int status = 0;

  if (const auto* probes = cfg.find("probes")) {
    const auto state = parse_state(cfg, "state", model.dims.d);
    const auto* time_section = cfg.find("times");
    if (!time_section) throw std::runtime_error("config needs a [times] section");
    const auto times =
        io::parse_numbers(time_section->require("times"), time_section->line, "times");
    const auto ks = repeated_vectors(*probes, "k", model.dims.s);
    if (ks.size() != times.size())
      throw std::runtime_error("[probes] must list one k per time");
    Vec zeta = Vec::Zero(2 * model.dims.n);
    if (probes->find("zeta")) zeta = section_vector(*probes, "zeta", 2 * model.dims.n);
    const cplx value = multi_time_cf(model, state, times, ks, zeta);
    os << "# multi-time characteristic function\n";
    os << "# columns: re im\n";
    os << io::format_double(value.real()) << ',' << io::format_double(value.imag()) << '\n';
  }

  if (const auto* cond = cfg.find("conditional")) {
    const double t = io::parse_number(cond->require("t"), cond->line, "t");
    const Vec x = section_vector(*cond, "x", model.dims.s);
    const auto box_nums = io::parse_numbers(cond->require("box"), cond->line, "box");
    if (static_cast<int>(box_nums.size()) != 2 * model.dims.s)
      throw std::runtime_error("box must list lo hi per classical axis");
    Vec lo(model.dims.s), hi(model.dims.s);
    for (int i = 0; i < model.dims.s; ++i) {
      lo(i) = box_nums[2 * i];
      hi(i) = box_nums[2 * i + 1];
    }
    GaussianHybridState rho0;
    rho0.mean = section_vector(*cond, "rho_mean", 2 * model.dims.n);
    rho0.cov = section_matrix(*cond, "rho_cov", 2 * model.dims.n);
    KGridSettings grid;
    if (const auto v = cond->get("kgrid")) {
      const auto nums = io::parse_numbers(*v, cond->line, "kgrid");
      if (nums.size() != 2) throw std::runtime_error("kgrid = count radius");
      grid.count = static_cast<int>(nums[0]);
      grid.radius = nums[1];
    }
    const auto prob = conditional_probability(model, rho0, t, make_box(lo, hi), x, grid);
    os << "# conditional probability\n";
    os << "# t = " << io::format_double(t) << '\n';
    os << "# columns: probability raw aliasing\n";
    os << io::format_double(prob.probability) << ',' << io::format_double(prob.raw) << ','
       << io::format_double(prob.aliasing) << '\n';
    if (prob.aliasing > 1e-6) status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-free hybrid quantum-classical dynamics, characteristic-function level"};
  app.require_subcommand(1);

  std::string model_path, example, config_path, out_path;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path, "model specification file");
    cmd->add_option("--example", example,
                    "built-in example: quantum_boltzmann, optomechanical, classical_oscillator, "
                    "hybrid_opto");
  };

  auto* validate = app.add_subcommand("validate", "check a model against the positivity constraint");
  add_model_flags(validate);
  validate->add_option("--tol", tol, "eigenvalue tolerance");

  auto* exportc = app.add_subcommand("export", "write a built-in example as a model file");
  exportc->add_option("--example", example)->required();
  exportc->add_option("--out", out_path)->required();

  auto* propagate = app.add_subcommand("propagate", "evolve a Gaussian state's CF");
  add_model_flags(propagate);
  propagate->add_option("--config", config_path)->required();
  propagate->add_option("--out", out_path)->required();

  auto* wigner = app.add_subcommand("wigner", "Wigner function of an evolved Gaussian state");
  add_model_flags(wigner);
  wigner->add_option("--config", config_path)->required();
  wigner->add_option("--out", out_path)->required();

  auto* equilibrium = app.add_subcommand("equilibrium", "large-time limit tables");
  add_model_flags(equilibrium);
  equilibrium->add_option("--config", config_path)->required();
  equilibrium->add_option("--out", out_path)->required();

  auto* sample = app.add_subcommand("sample", "Monte Carlo paths of the classical component");
  add_model_flags(sample);
  sample->add_option("--config", config_path)->required();
  sample->add_option("--out", out_path, "output prefix")->required();
  sample->add_option("--seed", seed)->check(CLI::NonNegativeNumber);

  auto* instrument = app.add_subcommand("instrument", "multi-time statistics and conditioning");
  add_model_flags(instrument);
  instrument->add_option("--config", config_path)->required();
  instrument->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);
  has_seed = sample->count("--seed") > 0;

  try {
    if (app.got_subcommand(validate)) return cmd_validate(model_path, example, tol);
    if (app.got_subcommand(exportc)) return cmd_export(example, out_path);

    const HybridModel model = resolve_model(model_path, example);
    if (!model.validated) {
      std::cerr << "model failed validation (run `hyqsim validate` for details)\n";
      return 1;
    }
    const io::ConfigDoc cfg = io::parse_config_file(config_path);
    if (app.got_subcommand(propagate)) return cmd_propagate(model, cfg, out_path);
    if (app.got_subcommand(wigner)) return cmd_wigner(model, cfg, out_path);
    if (app.got_subcommand(equilibrium)) return cmd_equilibrium(model, cfg, out_path);
    if (app.got_subcommand(sample)) return cmd_sample(model, cfg, out_path, seed, has_seed);
    if (app.got_subcommand(instrument)) return cmd_instrument(model, cfg, out_path);
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
