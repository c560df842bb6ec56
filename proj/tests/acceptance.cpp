// Acceptance gate: runs every headline criterion with pinned tolerances and
// prints one pass/fail line each. Exit code 0 iff all pass. argv[1] (optional)
// is the path of the command-line binary used by the determinism criterion.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "parlab/experiments.hpp"

namespace fs = std::filesystem;
using namespace parlab;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << "criterion " << num << " [" << name << "]: "
            << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

template <class Fn>
void guarded(int num, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(num, name, false, std::string("exception: ") + e.what());
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

SpaceGrid desk_grid(const SystemSpec& spec) {
  return SpaceGrid(spec.dim, spec.dim == 1 ? 64 : 24);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  // 1. Heat-kernel oracle.
  guarded(1, "heat kernel oracle", [] {
    const SystemSpec spec = build_catalog_scenario("heat_1d");
    const SpaceGrid grid(1, 128);
    const double T = 0.1;
    const Trajectory u = solve_parabolic(spec, grid, T, {});
    const double decay = std::exp(-4.0 * M_PI * M_PI * T);
    double err = 0.0;
    for (int64_t j = 0; j < grid.size(); ++j)
      err = std::max(err,
                     std::abs(u.final_state().comp[0][size_t(j)] -
                              decay * std::sin(2.0 * M_PI * grid.point(j)[0])));
    report(1, "heat kernel oracle", err <= 5e-3, "sup error " + num(err));
  });

  // 2. L-infinity bound on the whole catalog at T in {0.1, 0.5}.
  guarded(2, "L-infinity bound", [] {
    bool pass = true;
    std::string worst;
    for (const auto& name : catalog_names()) {
      const SystemSpec spec = build_catalog_scenario(name);
      const SpaceGrid grid = desk_grid(spec);
      for (double T : {0.1, 0.5}) {
        const Trajectory u = solve_parabolic(spec, grid, T, {});
        const BoundReport rep = linfty_bound(u, spec, T);
        if (!rep.pass) {
          pass = false;
          worst = name + " T=" + num(T) + " obs " + num(rep.observed) +
                  " > rhs " + num(rep.rhs);
        }
      }
    }
    report(2, "L-infinity bound", pass, pass ? "16 scenario/time pairs" : worst);
  });

  // 3. Hoelder-bound constant uniformly bounded under refinement.
  guarded(3, "Hoelder constant stability", [] {
    bool pass = true;
    std::string detail;
    for (const char* name : {"heat_1d", "coupled_switch_2sys"}) {
      const SystemSpec spec = build_catalog_scenario(name);
      std::vector<double> ks;
      for (int n : {64, 128, 256}) {
        const Trajectory u = solve_parabolic(spec, SpaceGrid(1, n), 0.1, {});
        ks.push_back(holder_bound(u, spec, 0.1).fitted_K);
      }
      const double kmax = *std::max_element(ks.begin(), ks.end());
      const double kmin = *std::min_element(ks.begin(), ks.end());
      const double spread = kmax > 0.0 ? (kmax - kmin) / kmax : 0.0;
      detail += std::string(name) + " spread " + num(spread) + "; ";
      if (spread > 0.2) pass = false;
    }
    report(3, "Hoelder constant stability", pass, detail);
  });

  // 4. Exact continuous-dependence shift and fitted-K stability.
  guarded(4, "exact l-shift dependence", [] {
    const SystemSpec base = build_catalog_scenario("costonly_1d");
    const SpaceGrid grid(1, 128);
    const double T = 0.1;
    const Trajectory u1 = solve_parabolic(base, grid, T, {});
    bool pass = true;
    double worst_gap = 0.0;
    std::vector<double> ks;
    for (double delta : {0.1, 0.05, 0.025}) {
      const SystemSpec pert = perturb_spec(base, PerturbationKind::l, delta);
      const Trajectory u2 = solve_parabolic(pert, grid, T, {});
      const double diff =
          difference_norms(u1.final_state(), u2.final_state()).sup;
      worst_gap = std::max(worst_gap, std::abs(diff - delta * T));
      const BoundReport rep = cde_rhs_control(base, pert, u1, u2, T, base.mu);
      if (!rep.pass) pass = false;
      ks.push_back(rep.fitted_K);
    }
    if (worst_gap > 1e-12) pass = false;
    const double kmax = *std::max_element(ks.begin(), ks.end());
    const double kmin = *std::min_element(ks.begin(), ks.end());
    if (kmax > 0.0 && (kmax - kmin) / kmax > 0.1) pass = false;
    report(4, "exact l-shift dependence", pass,
           "max |error - delta T| = " + num(worst_gap) + ", K in [" +
               num(kmin) + ", " + num(kmax) + "]");
  });

  // 5. General-form estimate.
  guarded(5, "general-form estimate", [] {
    const SystemSpec spec = build_catalog_scenario("heat_1d");
    const SpaceGrid grid(1, 64);
    const double T = 0.1;
    const Trajectory u = solve_parabolic(spec, grid, T, {});
    bool pass = true;
    std::string detail;
    for (double alpha : {1.0, 10.0, 100.0})
      for (double gbar : {0.0, 1.0, 10.0}) {
        const BoundReport rep =
            cde_rhs_general(spec, spec, u, u, alpha, gbar, T, 20000, 0);
        if (rep.observed > rep.rhs + 1e-12) {
          pass = false;
          detail = "identical pair violated at alpha " + num(alpha) +
                   " gbar " + num(gbar);
        }
      }
    const SystemSpec base = build_catalog_scenario("costonly_1d");
    const SystemSpec pert = perturb_spec(base, PerturbationKind::l, 0.1);
    const SpaceGrid g2(1, 128);
    const Trajectory v1 = solve_parabolic(base, g2, T, {});
    const Trajectory v2 = solve_parabolic(pert, g2, T, {});
    const BoundReport shift = cde_rhs_general(base, pert, v1, v2, 1.0, 0.0, T,
                                              20000, 0);
    if (!shift.pass || shift.slack > 10.0 * g2.h() + 1e-15) {
      pass = false;
      detail += " l-shift pair failed";
    }
    report(5, "general-form estimate", pass,
           pass ? "9 identical-pair boxes + l-shift pair" : detail);
  });

  // 6. Vanishing viscosity rate.
  guarded(6, "vanishing viscosity rate", [] {
    const SystemSpec spec = build_catalog_scenario("firstorder_2sys");
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    const ExperimentReport rep =
        vanishing_viscosity_study(spec, eps, SpaceGrid(1, 128), 0.1);
    bool pass = rep.fit.exponent >= 0.4;
    // Smallest admissible constant for the eps^{1/2} envelope.
    double C = 0.0;
    for (const auto& row : rep.rows)
      C = std::max(C, row.error / std::sqrt(row.param));
    for (const auto& row : rep.rows)
      if (row.error > C * std::sqrt(row.param) + 1e-15) pass = false;
    report(6, "vanishing viscosity rate", pass,
           "fitted exponent " + num(rep.fit.exponent) + ", C " + num(C));
  });

  // 7. Invariant measure / effective coefficient oracle.
  guarded(7, "invariant measure oracle", [] {
    const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
    const SpaceGrid cell(1, 256);
    const InvariantMeasure mu = invariant_measure(hom, 0, Pt{0.0, 0.0}, cell);
    double point_err = 0.0;
    for (int64_t j = 0; j < cell.size(); ++j) {
      const double y = cell.point(j)[0];
      point_err = std::max(
          point_err, std::abs(mu.density.comp[0][size_t(j)] -
                              std::sqrt(3.0) / (2.0 + std::sin(2.0 * M_PI * y))));
    }
    const EffectiveCoeffs eff = effective_linear_coeffs(hom, Pt{0.0, 0.0}, cell);
    const double abar_err = std::abs(eff.a_bar[0][0] - std::sqrt(3.0));
    report(7, "invariant measure oracle",
           point_err <= 1e-3 && abar_err <= 1e-3,
           "pointwise " + num(point_err) + ", a_bar gap " + num(abar_err));
  });

  // 8. Cross-path agreement of the two effective-coefficient routes.
  guarded(8, "effective cross-path agreement", [] {
    bool pass = true;
    std::string detail;
    for (const char* name : {"hom_linear_1d", "hom_coupled_2sys",
                             "hom_linear_2d"}) {
      const SystemSpec spec = build_catalog_scenario(name);
      const SpaceGrid cell(spec.dim, spec.dim == 1 ? 256 : 64);
      const Pt x{0.15, spec.dim == 2 ? 0.4 : 0.0};
      const EffectiveCoeffs eff = effective_linear_coeffs(spec, x, cell);
      for (int i = 0; i < spec.m; ++i) {
        CellProblemInstance inst;
        inst.i = i;
        inst.x = x;
        inst.r.assign(size_t(spec.m), 0.0);
        inst.X.xx = -1.0;
        inst.X.yy = spec.dim == 2 ? -1.0 : 0.0;
        const double lam =
            effective_hamiltonian(spec, inst, {1e-1, 5e-2, 2.5e-2}, cell).h_bar;
        const double msr = eff.h_bar(spec, i, inst.r, inst.p, inst.X);
        const double gap = std::abs(lam - msr);
        detail += std::string(name) + "[" + std::to_string(i) + "] gap " +
                  num(gap) + "; ";
        if (gap > 1e-3) pass = false;
      }
    }
    report(8, "effective cross-path agreement", pass, detail);
  });

  // 9. Effective-operator structural properties.
  guarded(9, "effective operator properties", [] {
    bool pass = true;
    std::string detail;
    for (const char* name : {"hom_linear_1d", "hom_coupled_2sys",
                             "hom_linear_2d"}) {
      const SystemSpec spec = build_catalog_scenario(name);
      const EffectivePropertiesReport rep = check_effective_properties(
          spec, 10000, 0, SpaceGrid(spec.dim, spec.dim == 1 ? 128 : 64));
      if (!rep.pass) pass = false;
      detail += std::string(name) + " viol " +
                std::to_string(rep.ellipticity_violations +
                               rep.quasi_monotonicity_violations) +
                " nu " + num(rep.effective_nu) + "; ";
    }
    report(9, "effective operator properties", pass, detail);
  });

  // 10. Homogenization convergence (fine run).
  guarded(10, "homogenization convergence", [] {
    const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
    const ExperimentReport rep = homogenization_study(
        hom, {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}, SpaceGrid(1, 512), 0.1,
        EffectivePath::measure, SpaceGrid(1, 256));
    bool pass = rep.pass;
    std::string detail = "errors";
    for (const auto& row : rep.rows) detail += " " + num(row.error);
    if (rep.rows.back().error > 2e-2) pass = false;
    report(10, "homogenization convergence", pass, detail);
  });

  // 11. Discrete comparison principle, including the analytic barrier.
  guarded(11, "comparison principle", [] {
    bool pass = true;
    std::string detail;
    for (const auto& name : catalog_names()) {
      const SystemSpec spec = build_catalog_scenario(name);
      const SpaceGrid grid = desk_grid(spec);
      GridFunction lo = sample_initial_datum(spec, grid);
      GridFunction hi = lo;
      for (auto& comp : hi.comp)
        for (double& v : comp) v += 0.3;
      const ComparisonReport rep = check_comparison(spec, lo, hi, 0.1, {});
      if (rep.max_violation > 1e-12) {
        pass = false;
        detail += name + " violation " + num(rep.max_violation) + "; ";
      }
      // Barrier: u(t) <= ||u0|| + e^{Ct} with C = L + 1 + C^f + L ||u0||,
      // L the largest coupling row sum of |d|.
      double L = 0.0;
      for (int i = 0; i < spec.m; ++i)
        for (int th = 0; th < spec.controls.n_theta(); ++th)
          for (int z = 0; z < spec.controls.n_zeta(); ++z) {
            double row = 0.0;
            for (int j = 0; j < spec.m; ++j)
              row += spec.block(i, th, z).d_row[size_t(j)].sup_bound();
            L = std::max(L, row);
          }
      const Trajectory u = solve_parabolic(spec, grid, 0.1, {});
      const double u0n = sup_norm(u.states.front());
      const double C = L + 1.0 + spec.constants.C_sup + L * u0n;
      for (size_t k = 0; k < u.times.size(); ++k) {
        const double barrier = u0n + std::exp(C * u.times[k]);
        if (sup_norm(u.states[k]) > barrier + 1e-12) {
          pass = false;
          detail += name + " barrier breached; ";
        }
      }
    }
    report(11, "comparison principle", pass, pass ? "catalog + barriers" : detail);
  });

  // 12. CLI determinism, including multi-threaded mode.
  guarded(12, "CLI determinism", [&] {
    if (cli.empty()) {
      report(12, "CLI determinism", false, "no CLI binary path supplied");
      return;
    }
    const fs::path root = fs::temp_directory_path() / "parlab_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    auto run = [&](const std::string& tag, const std::string& threads) {
      const fs::path dir = root / tag;
      const std::string cmd = "\"" + cli +
                              "\" vanish --scenario heat_1d --nx 64 "
                              "--t-final 0.02 --eps 0.1,0.05,0.025 --threads " +
                              threads + " --out \"" + dir.string() + "\"" +
                              " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0)
        throw std::runtime_error("CLI invocation failed: " + cmd);
      return slurp(dir / "vanish.csv") + "|" + slurp(dir / "manifest.json");
    };
    const std::string a1 = run("a1", "1"), a2 = run("a2", "1");
    const std::string b1 = run("b1", "4"), b2 = run("b2", "4");
    bool pass = !a1.empty() && a1 == a2 && !b1.empty() && b1 == b2;
    // The numeric payload must also agree across thread counts.
    const std::string csv1 = slurp(root / "a1" / "vanish.csv");
    const std::string csv4 = slurp(root / "b1" / "vanish.csv");
    if (csv1 != csv4) pass = false;
    fs::remove_all(root);
    report(12, "CLI determinism", pass,
           pass ? "byte-identical across reruns and thread counts" : "mismatch");
  });

  std::cout << (g_failures == 0 ? "ACCEPTANCE: all criteria passed"
                                : "ACCEPTANCE: " + std::to_string(g_failures) +
                                      " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
