#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parlab/experiments.hpp"
#include "parlab/parallel.hpp"

namespace fs = std::filesystem;
using namespace parlab;

namespace {

// Exact rational parsing ("1/8") so commensurability checks see clean values.
double parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  const long long num = std::stoll(s.substr(0, slash));
  const long long den = std::stoll(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return double(num) / double(den);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_rational(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

fs::path out_dir(const std::string& flag_value) {
  const char* env = std::getenv("PARLAB_OUT");
  fs::path p = env != nullptr && *env != '\0' ? fs::path(env)
                                              : fs::path(flag_value);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open " + p.string());
  out << text;
}

SystemSpec load_spec(const std::string& scenario, const std::string& config) {
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw std::runtime_error("cannot open " + config);
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
  }
  return build_catalog_scenario(scenario);
}

std::string manifest(const std::string& command, const SystemSpec& spec,
                     int nx, double t_final, unsigned seed, int threads) {
  std::ostringstream os;
  os << "{\n  \"command\": \"" << command << "\",\n  \"scenario\": \""
     << spec.name << "\",\n  \"nx\": " << nx << ",\n  \"t_final\": "
     << fmt17(t_final) << ",\n  \"seed\": " << seed
     << ",\n  \"threads\": " << threads << "\n}\n";
  return os.str();
}

int run_checks(unsigned seed) {
  bool ok = true;
  for (const std::string& name : catalog_names()) {
    const SystemSpec spec = build_catalog_scenario(name);
    const auto qm = verify_quasi_monotonicity(spec, 2000, seed);
    const auto el = verify_ellipticity(spec, 2000, seed);
    const auto co = verify_constants(spec, 2000, seed);
    const SpaceGrid grid(spec.dim, spec.dim == 1 ? 64 : 32);
    GridFunction lo = sample_initial_datum(spec, grid);
    GridFunction hi = lo;
    for (auto& comp : hi.comp)
      for (double& v : comp) v += 0.25;
    const auto cmp = check_comparison(spec, lo, hi, 0.05, {});
    const bool pass = qm.pass && el.pass && co.pass && cmp.pass;
    ok = ok && pass;
    std::cout << name << ": quasi_monotone=" << (qm.pass ? "pass" : "FAIL")
              << " ellipticity=" << (el.pass ? "pass" : "FAIL")
              << " constants=" << (co.pass ? "pass" : "FAIL")
              << " comparison=" << (cmp.pass ? "pass" : "FAIL") << "\n";
    if (!qm.pass) std::cout << "  witness: " << qm.witness << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for weakly coupled parabolic systems"};
  app.require_subcommand(1);

  std::string scenario = "heat_1d", config, out = "runs", path_name = "measure";
  std::string eps_str = "1/4,1/8,1/16,1/32", deltas_str = "0.1,0.05,0.025";
  std::string kind_str = "l", suite = "invariants";
  std::string x_str = "0", eps_visc_str = "0", fast_eps_str;
  int nx = 128, ncell = 128, comp = 0, threads = 1;
  double t_final = 0.1, p_val = 0.0, xx_val = 0.0;
  unsigned seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "sampling seed")->default_val(0);
    sub->add_option("--threads", threads, "worker count")->default_val(1);
    sub->add_option("--out", out, "output directory")->default_val("runs");
    sub->add_option("--scenario", scenario, "catalog scenario name");
    sub->add_option("--config", config, "scenario JSON file");
  };

  CLI::App* solve = app.add_subcommand("solve", "march one Cauchy problem");
  add_common(solve);
  solve->add_option("--nx", nx)->default_val(128);
  solve->add_option("--t-final", t_final)->default_val(0.1);
  solve->add_option("--eps-visc", eps_visc_str);
  solve->add_option("--fast-eps", fast_eps_str);

  CLI::App* vanish = app.add_subcommand("vanish", "vanishing viscosity study");
  add_common(vanish);
  vanish->add_option("--nx", nx)->default_val(128);
  vanish->add_option("--t-final", t_final)->default_val(0.1);
  vanish->add_option("--eps", eps_str)->default_val("0.1,0.05,0.025,0.0125");

  CLI::App* cde = app.add_subcommand("cde", "continuous dependence sweep");
  add_common(cde);
  cde->add_option("--nx", nx)->default_val(128);
  cde->add_option("--t-final", t_final)->default_val(0.1);
  cde->add_option("--kind", kind_str, "perturbation kind l|b|a|d");
  cde->add_option("--deltas", deltas_str)->default_val("0.1,0.05,0.025");

  CLI::App* cell = app.add_subcommand("cell", "cell problem / ergodic constant");
  add_common(cell);
  cell->add_option("--ncell", ncell)->default_val(128);
  cell->add_option("--comp", comp)->default_val(0);
  cell->add_option("--x", x_str)->default_val("0");
  cell->add_option("--p", p_val)->default_val(0.0);
  cell->add_option("--xx", xx_val, "frozen X_xx entry")->default_val(0.0);

  CLI::App* measure = app.add_subcommand("measure", "invariant measure");
  add_common(measure);
  measure->add_option("--ncell", ncell)->default_val(256);
  measure->add_option("--comp", comp)->default_val(0);
  measure->add_option("--x", x_str)->default_val("0");

  CLI::App* homog = app.add_subcommand("homogenize", "homogenization study");
  add_common(homog);
  homog->add_option("--nx", nx)->default_val(512);
  homog->add_option("--t-final", t_final)->default_val(0.1);
  homog->add_option("--eps", eps_str)->default_val("1/4,1/8,1/16,1/32");
  homog->add_option("--ncell", ncell)->default_val(128);
  homog->add_option("--path", path_name, "measure|lambda|general");

  CLI::App* check = app.add_subcommand("check", "property suites");
  add_common(check);
  check->add_option("--suite", suite)->default_val("invariants");

  CLI::App* list = app.add_subcommand("list", "catalog scenarios");
  std::string export_dir;
  list->add_option("--export", export_dir, "write scenario JSON files here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_thread_count(threads);

    if (list->parsed()) {
      for (const std::string& name : catalog_names()) {
        std::cout << name << "\n";
        if (!export_dir.empty()) {
          fs::create_directories(export_dir);
          write_text(fs::path(export_dir) / (name + ".json"),
                     spec_to_json(build_catalog_scenario(name)));
        }
      }
      return 0;
    }
    if (check->parsed()) return run_checks(seed);

    const SystemSpec spec = load_spec(scenario, config);
    const fs::path dir = out_dir(out);

    if (solve->parsed()) {
      const SpaceGrid grid(spec.dim, nx);
      DiscreteOperatorConfig cfg;
      cfg.eps_visc = parse_rational(eps_visc_str);
      if (!fast_eps_str.empty()) cfg.fast_epsilon = parse_rational(fast_eps_str);
      const Trajectory traj = solve_parabolic(spec, grid, t_final, cfg);
      write_grid_csv(traj.final_state(), (dir / "solution.csv").string());
      write_text(dir / "manifest.json",
                 manifest("solve", spec, nx, t_final, seed, threads));
      BoundReport rep = linfty_bound(traj, spec, t_final);
      write_text(dir / "bounds.csv",
                 BoundReport::csv_header() + "\n" + rep.csv_row() + "\n");
      return 0;
    }
    if (vanish->parsed()) {
      const SpaceGrid grid(spec.dim, nx);
      const ExperimentReport rep =
          vanishing_viscosity_study(spec, parse_list(eps_str), grid, t_final);
      write_text(dir / "vanish.csv", rep.csv());
      write_text(dir / "manifest.json",
                 manifest("vanish", spec, nx, t_final, seed, threads));
      return rep.pass ? 0 : 1;
    }
    if (cde->parsed()) {
      PerturbationKind kind;
      if (kind_str == "l")
        kind = PerturbationKind::l;
      else if (kind_str == "b")
        kind = PerturbationKind::b;
      else if (kind_str == "a")
        kind = PerturbationKind::a;
      else if (kind_str == "d")
        kind = PerturbationKind::d;
      else {
        std::cerr << "unknown perturbation kind: " << kind_str << "\n";
        return 2;
      }
      const SpaceGrid grid(spec.dim, nx);
      const ExperimentReport rep = continuous_dependence_sweep(
          spec, kind, parse_list(deltas_str), grid, t_final);
      write_text(dir / "cde.csv", rep.csv());
      // Control-form bound reports per delta, with the fitted K column.
      std::string bounds = BoundReport::csv_header() + "\n";
      const Trajectory base = solve_parabolic(spec, grid, t_final, {});
      for (double delta : parse_list(deltas_str)) {
        const SystemSpec pert = perturb_spec(spec, kind, delta);
        const Trajectory other = solve_parabolic(pert, grid, t_final, {});
        bounds +=
            cde_rhs_control(spec, pert, base, other, t_final, spec.mu).csv_row() +
            "\n";
      }
      write_text(dir / "bounds.csv", bounds);
      write_text(dir / "manifest.json",
                 manifest("cde", spec, nx, t_final, seed, threads));
      return rep.pass ? 0 : 1;
    }
    if (cell->parsed()) {
      CellProblemInstance inst;
      inst.i = comp;
      inst.x = Pt{parse_rational(x_str), 0.0};
      inst.r.assign(size_t(spec.m), 0.0);
      inst.p = Pt{p_val, 0.0};
      inst.X.xx = xx_val;
      const CorrectorSolution sol = effective_hamiltonian(
          spec, inst, {1e-1, 5e-2, 2.5e-2}, SpaceGrid(spec.dim, ncell));
      write_grid_csv(sol.corrector, (dir / "corrector.csv").string());
      std::string table = "lambda,ergodic_estimate,spread\n";
      for (size_t k = 0; k < sol.lambdas.size(); ++k)
        table += fmt17(sol.lambdas[k]) + "," + fmt17(sol.ergodic_estimates[k]) +
                 "," + fmt17(sol.spreads[k]) + "\n";
      table += "extrapolated," + fmt17(sol.h_bar) + "," + fmt17(sol.residual) + "\n";
      write_text(dir / "cell.csv", table);
      write_text(dir / "manifest.json",
                 manifest("cell", spec, ncell, 0.0, seed, threads));
      return 0;
    }
    if (measure->parsed()) {
      const InvariantMeasure mu = invariant_measure(
          spec, comp, Pt{parse_rational(x_str), 0.0}, SpaceGrid(spec.dim, ncell));
      write_grid_csv(mu.density, (dir / "measure.csv").string());
      const EffectiveCoeffs eff = effective_linear_coeffs(
          spec, Pt{parse_rational(x_str), 0.0}, SpaceGrid(spec.dim, ncell));
      std::string table = "component,a_bar_1,a_bar_2\n";
      for (int i = 0; i < spec.m; ++i)
        table += std::to_string(i) + "," + fmt17(eff.a_bar[size_t(i)][0]) + "," +
                 fmt17(eff.a_bar[size_t(i)][1]) + "\n";
      write_text(dir / "effective.csv", table);
      write_text(dir / "manifest.json",
                 manifest("measure", spec, ncell, 0.0, seed, threads));
      return 0;
    }
    if (homog->parsed()) {
      EffectivePath path;
      if (path_name == "measure")
        path = EffectivePath::measure;
      else if (path_name == "lambda")
        path = EffectivePath::lambda;
      else if (path_name == "general")
        path = EffectivePath::general;
      else {
        std::cerr << "unknown effective path: " << path_name << "\n";
        return 2;
      }
      const SpaceGrid grid(spec.dim, nx);
      const ExperimentReport rep = homogenization_study(
          spec, parse_list(eps_str), grid, t_final, path,
          SpaceGrid(spec.dim, ncell));
      write_text(dir / "homogenize.csv", rep.csv());
      write_text(dir / "manifest.json",
                 manifest("homogenize", spec, nx, t_final, seed, threads));
      return rep.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
