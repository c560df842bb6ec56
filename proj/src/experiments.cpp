#include "parlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parlab/parallel.hpp"

namespace parlab {

namespace {

bool coeffs_depend_on_slow(const SystemSpec& spec) {
  for (const auto& blk : spec.blocks) {
    for (const auto& f : blk.a)
      if (f.poly.depends_on_slow()) return true;
    for (const auto& f : blk.b)
      if (f.poly.depends_on_slow()) return true;
    if (blk.l.poly.depends_on_slow()) return true;
    for (const auto& f : blk.d_row)
      if (f.poly.depends_on_slow()) return true;
  }
  return false;
}

void require_decreasing(const std::vector<double>& v, const char* what) {
  if (v.size() < 3)
    throw std::invalid_argument(std::string(what) + " list too short");
  for (size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1]))
      throw std::invalid_argument(std::string(what) + " list not decreasing");
}

/// Explicit-Euler march with a pluggable nodewise operator, sharing
/// solve_parabolic's step and snapshot policy.
template <class Op>
Trajectory march(const SpaceGrid& grid, double T, double dt_cfl,
                 GridFunction u0, const SolveOptions& opts, Op&& op) {
  double dt = dt_cfl;
  if (opts.dt) {
    if (*opts.dt > dt_cfl * (1.0 + 1e-12))
      throw std::invalid_argument("requested time step violates the CFL bound");
    dt = *opts.dt;
  }
  const int64_t steps = std::max<int64_t>(1, int64_t(std::ceil(T / dt - 1e-12)));
  dt = T / double(steps);

  Trajectory traj;
  traj.grid = grid;
  traj.dt = dt;
  traj.steps = steps;
  std::vector<int64_t> snap_steps;
  const int ns = std::max(1, opts.max_snapshots);
  for (int k = 0; k < ns; ++k) {
    const int64_t s = int64_t(double(k) * double(steps) / double(ns));
    if (snap_steps.empty() || s > snap_steps.back()) snap_steps.push_back(s);
  }
  if (snap_steps.back() != steps) snap_steps.push_back(steps);

  GridFunction u = std::move(u0);
  GridFunction next = u;
  size_t snap_at = 0;
  const int64_t sz = grid.size();
  const int m = u.m();
  for (int64_t n = 0; n <= steps; ++n) {
    const double t = double(n) * dt;
    u.time = t;
    if (snap_at < snap_steps.size() && snap_steps[snap_at] == n) {
      traj.times.push_back(t);
      traj.states.push_back(u);
      ++snap_at;
    }
    if (n == steps) break;
    for (int i = 0; i < m; ++i) {
      parallel_for(sz, [&](int64_t b, int64_t e) {
        for (int64_t j = b; j < e; ++j)
          next.comp[size_t(i)][size_t(j)] =
              u.comp[size_t(i)][size_t(j)] - dt * op(u, i, j, t);
      });
    }
    std::swap(u.comp, next.comp);
    if (n % 256 == 0 && !u.all_finite())
      throw std::runtime_error("blow-up detected at step " + std::to_string(n));
  }
  if (!traj.states.back().all_finite())
    throw std::runtime_error("blow-up detected at step " + std::to_string(steps));
  return traj;
}

/// Per-node tabulation of effective linear coefficients.
struct EffTab {
  int m = 0, dim = 1, nth = 1, nz = 1;
  int64_t size = 0;
  std::vector<std::array<double, 2>> a;  // [i * size + node]
  std::vector<std::array<double, 2>> b;  // [blk * size + node]
  std::vector<double> l;                 // [blk * size + node]
  std::vector<double> d;                 // [(blk * m + j) * size + node]
};

EffTab tab_from_measure(const SystemSpec& spec, const SpaceGrid& grid,
                        const SpaceGrid& cell_grid) {
  EffTab tab;
  tab.m = spec.m;
  tab.dim = spec.dim;
  tab.nth = spec.controls.n_theta();
  tab.nz = spec.controls.n_zeta();
  tab.size = grid.size();
  const size_t nblk = spec.blocks.size();
  tab.a.assign(size_t(spec.m) * size_t(tab.size), {0.0, 0.0});
  tab.b.assign(nblk * size_t(tab.size), {0.0, 0.0});
  tab.l.assign(nblk * size_t(tab.size), 0.0);
  tab.d.assign(nblk * size_t(spec.m) * size_t(tab.size), 0.0);

  const bool x_dep = coeffs_depend_on_slow(spec);
  if (!x_dep) {
    // One effective-coefficient solve serves every slow node.
    const EffectiveCoeffs eff = effective_linear_coeffs(spec, Pt{0.0, 0.0}, cell_grid);
    for (int64_t j = 0; j < tab.size; ++j) {
      for (int i = 0; i < spec.m; ++i)
        tab.a[size_t(i) * size_t(tab.size) + size_t(j)] = eff.a_bar[size_t(i)];
      for (size_t blk = 0; blk < nblk; ++blk) {
        tab.b[blk * size_t(tab.size) + size_t(j)] = eff.b_bar[blk];
        tab.l[blk * size_t(tab.size) + size_t(j)] = eff.l_bar[blk];
        for (int q = 0; q < spec.m; ++q)
          tab.d[(blk * size_t(spec.m) + size_t(q)) * size_t(tab.size) + size_t(j)] =
              eff.d_bar_row[blk][size_t(q)];
      }
    }
    return tab;
  }
  // Slow-dependent lower order: reuse the measure (x-independent diffusion
  // in the catalog) and average the coefficients per node.
  for (int i = 0; i < spec.m; ++i) {
    const InvariantMeasure mu = invariant_measure(spec, i, Pt{0.0, 0.0}, cell_grid);
    const SpaceGrid& cg = mu.density.grid;
    const double w = 1.0 / double(cg.size());
    for (int64_t j = 0; j < tab.size; ++j) {
      const Pt x = grid.point(j);
      auto& abar = tab.a[size_t(i) * size_t(tab.size) + size_t(j)];
      for (int64_t c = 0; c < cg.size(); ++c) {
        const double wj = w * mu.density.comp[0][size_t(c)];
        const std::optional<Pt> y =
            spec.has_fast ? std::optional<Pt>(cg.point(c)) : std::nullopt;
        for (int z = 0; z < tab.nz; ++z)
          for (int th = 0; th < tab.nth; ++th) {
            const CoefficientSample s = eval_coefficients(spec, i, th, z, 0.0, x, y);
            const size_t blk = size_t((i * tab.nth + th) * tab.nz + z);
            if (th == 0 && z == 0) {
              abar[0] += wj * (s.A[0] + s.trace_coeff);
              if (spec.dim == 2) abar[1] += wj * (s.A[1] + s.trace_coeff);
            }
            auto& bb = tab.b[blk * size_t(tab.size) + size_t(j)];
            for (int k = 0; k < spec.dim; ++k) bb[size_t(k)] += wj * s.b[size_t(k)];
            tab.l[blk * size_t(tab.size) + size_t(j)] += wj * s.l;
            for (int q = 0; q < spec.m; ++q)
              tab.d[(blk * size_t(spec.m) + size_t(q)) * size_t(tab.size) +
                    size_t(j)] += wj * s.d_row[size_t(q)];
          }
      }
    }
  }
  return tab;
}

EffTab tab_from_lambda(const SystemSpec& spec, const SpaceGrid& grid,
                       const SpaceGrid& cell_grid) {
  if (spec.controls.n_theta() != 1 || spec.controls.n_zeta() != 1)
    throw std::invalid_argument(
        "lambda-path coefficients require trivial control sets");
  EffTab tab;
  tab.m = spec.m;
  tab.dim = spec.dim;
  tab.nth = 1;
  tab.nz = 1;
  tab.size = grid.size();
  tab.a.assign(size_t(spec.m) * size_t(tab.size), {0.0, 0.0});
  tab.b.assign(size_t(spec.m) * size_t(tab.size), {0.0, 0.0});
  tab.l.assign(size_t(spec.m) * size_t(tab.size), 0.0);
  tab.d.assign(size_t(spec.m) * size_t(spec.m) * size_t(tab.size), 0.0);

  const std::vector<double> schedule{1e-1, 5e-2, 2.5e-2};
  const bool x_dep = coeffs_depend_on_slow(spec);
  const int64_t n_solve = x_dep ? tab.size : 1;
  for (int64_t j = 0; j < n_solve; ++j) {
    const Pt x = grid.point(j);
    for (int i = 0; i < spec.m; ++i) {
      CellProblemInstance inst;
      inst.i = i;
      inst.x = x;
      inst.r.assign(size_t(spec.m), 0.0);
      auto hbar = [&](const CellProblemInstance& in) {
        return effective_hamiltonian(spec, in, schedule, cell_grid).h_bar;
      };
      const double base = hbar(inst);
      std::array<double, 2> a{0.0, 0.0}, b{0.0, 0.0};
      for (int k = 0; k < spec.dim; ++k) {
        CellProblemInstance in = inst;
        if (k == 0)
          in.X.xx = -1.0;
        else
          in.X.yy = -1.0;
        a[size_t(k)] = hbar(in) - base;  // -Abar * (-1) = Abar
        in = inst;
        in.p[size_t(k)] = 1.0;
        b[size_t(k)] = hbar(in) - base;
      }
      std::vector<double> d(size_t(spec.m), 0.0);
      for (int q = 0; q < spec.m; ++q) {
        CellProblemInstance in = inst;
        in.r[size_t(q)] = 1.0;
        d[size_t(q)] = hbar(in) - base;
      }
      for (int64_t node = 0; node < tab.size; ++node) {
        if (x_dep && node != j) continue;
        const size_t off = size_t(i) * size_t(tab.size) + size_t(node);
        tab.a[off] = a;
        tab.b[off] = b;
        tab.l[off] = base;
        for (int q = 0; q < spec.m; ++q)
          tab.d[(size_t(i) * size_t(spec.m) + size_t(q)) * size_t(tab.size) +
                size_t(node)] = d[size_t(q)];
      }
    }
  }
  return tab;
}

}  // namespace

std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os << "study,scenario,param,error,fitted_exponent,residual,pass\n";
  for (const auto& row : rows)
    os << study << ',' << scenario << ',' << fmt17(row.param) << ','
       << fmt17(row.error) << ',' << fmt17(fit.exponent) << ','
       << fmt17(fit.residual) << ',' << (pass ? 1 : 0) << '\n';
  return os.str();
}

ExperimentReport vanishing_viscosity_study(const SystemSpec& spec,
                                           const std::vector<double>& eps_list,
                                           const SpaceGrid& grid, double T) {
  require_decreasing(eps_list, "eps");
  ExperimentReport rep;
  rep.study = "vanishing_viscosity";
  rep.scenario = spec.name;

  DiscreteOperatorConfig base_cfg;
  const Trajectory base = solve_parabolic(spec, grid, T, base_cfg);
  std::vector<double> errors;
  for (double eps : eps_list) {
    DiscreteOperatorConfig cfg;
    cfg.eps_visc = eps;
    const Trajectory sol = solve_parabolic(spec, grid, T, cfg);
    const double err =
        difference_norms(base.final_state(), sol.final_state()).sup;
    rep.rows.push_back({eps, err});
    errors.push_back(err);
  }
  rep.fit = fit_rate(errors, eps_list);
  rep.pass = rep.fit.exponent >= spec.mu / 2.0 - 0.1;
  return rep;
}

SystemSpec perturb_spec(const SystemSpec& spec, PerturbationKind kind,
                        double delta) {
  SystemSpec out = spec;
  auto shift = [delta](CoefficientField& f) {
    if (f.take_sqrt)
      throw std::invalid_argument("cannot shift a sqrt-form coefficient");
    if (f.scale == 0.0) {
      f = CoefficientField::constant(delta);
    } else {
      f.poly.offset += delta / f.scale;
    }
  };
  switch (kind) {
    case PerturbationKind::l:
      for (auto& blk : out.blocks) shift(blk.l);
      out.constants.C_sup += std::abs(delta);
      out.name += "+l";
      break;
    case PerturbationKind::b:
      for (auto& blk : out.blocks)
        for (int k = 0; k < out.dim; ++k) shift(blk.b[size_t(k)]);
      out.name += "+b";
      break;
    case PerturbationKind::a:
      for (auto& blk : out.blocks)
        for (int k = 0; k < out.dim; ++k) blk.a[size_t(k)].scale *= 1.0 + delta;
      out.constants.C_a *= std::abs(1.0 + delta);
      out.constants.nu *= (1.0 + delta) * (1.0 + delta);
      out.name += "+a";
      break;
    case PerturbationKind::d:
      for (auto& blk : out.blocks)
        for (auto& f : blk.d_row) f.scale *= 1.0 + delta;
      out.name += "+d";
      break;
  }
  return out;
}

ExperimentReport continuous_dependence_sweep(const SystemSpec& spec,
                                             PerturbationKind kind,
                                             const std::vector<double>& deltas,
                                             const SpaceGrid& grid, double T) {
  if (spec.form != Form::control)
    throw std::invalid_argument(
        "continuous_dependence_sweep: control form required");
  require_decreasing(deltas, "delta");
  ExperimentReport rep;
  rep.study = "continuous_dependence";
  rep.scenario = spec.name;

  const Trajectory base = solve_parabolic(spec, grid, T, {});
  std::vector<double> errors;
  for (double delta : deltas) {
    const SystemSpec pert = perturb_spec(spec, kind, delta);
    const Trajectory sol = solve_parabolic(pert, grid, T, {});
    const double err =
        difference_norms(base.final_state(), sol.final_state()).sup;
    rep.rows.push_back({delta, err});
    errors.push_back(err);
  }
  rep.fit = fit_rate(errors, deltas);
  const double expected =
      (kind == PerturbationKind::l || kind == PerturbationKind::d) ? 1.0
                                                                   : spec.mu;
  rep.pass = std::abs(rep.fit.exponent - expected) <= 0.15;
  return rep;
}

Trajectory effective_problem_solver(const SystemSpec& spec,
                                    const SpaceGrid& grid, double T,
                                    EffectivePath path,
                                    const SpaceGrid& cell_grid,
                                    const SolveOptions& opts) {
  const double h = grid.h();
  DiscreteOperatorConfig cfg;  // effective CFL inherits the sup bounds
  const double dt_cfl = cfl_timestep(spec, h, cfg);
  GridFunction u0(grid, spec.m, 0.0);
  for (int i = 0; i < spec.m; ++i)
    for (int64_t j = 0; j < grid.size(); ++j)
      u0.comp[size_t(i)][size_t(j)] =
          spec.u0[size_t(i)].eval(0.0, grid.point(j), Pt{0.0, 0.0});

  if (path == EffectivePath::general) {
    auto cache = std::make_shared<EffectiveHamiltonianCache>(
        spec, cell_grid, std::vector<double>{1e-1, 5e-2, 2.5e-2});
    auto op = [cache, &spec](const GridFunction& u, int i, int64_t j,
                             double /*t*/) {
      const SpaceGrid& g = u.grid;
      const double hh = g.h(), hh2 = hh * hh;
      const int ix = g.ix(j), iy = g.iy(j);
      const auto& ui = u.comp[size_t(i)];
      const double uc = ui[size_t(j)];
      const double uxp = ui[size_t(g.index(ix + 1, iy))];
      const double uxm = ui[size_t(g.index(ix - 1, iy))];
      Pt p{(uxp - uxm) / (2.0 * hh), 0.0};
      SymMat X;
      X.xx = (uxp - 2.0 * uc + uxm) / hh2;
      if (g.dim == 2) {
        const double uyp = ui[size_t(g.index(ix, iy + 1))];
        const double uym = ui[size_t(g.index(ix, iy - 1))];
        p[1] = (uyp - uym) / (2.0 * hh);
        X.yy = (uyp - 2.0 * uc + uym) / hh2;
      }
      std::vector<double> r(size_t(u.m()));
      for (int q = 0; q < u.m(); ++q) r[size_t(q)] = u.comp[size_t(q)][size_t(j)];
      return cache->eval(i, g.point(j), r, p, X);
    };
    return march(grid, T, dt_cfl, std::move(u0), opts, op);
  }

  const EffTab tab = path == EffectivePath::measure
                         ? tab_from_measure(spec, grid, cell_grid)
                         : tab_from_lambda(spec, grid, cell_grid);
  auto op = [&tab](const GridFunction& u, int i, int64_t j, double /*t*/) {
    const SpaceGrid& g = u.grid;
    const double hh = g.h(), hh2 = hh * hh;
    const int ix = g.ix(j), iy = g.iy(j);
    const auto& ui = u.comp[size_t(i)];
    const double uc = ui[size_t(j)];
    const double uxp = ui[size_t(g.index(ix + 1, iy))];
    const double uxm = ui[size_t(g.index(ix - 1, iy))];
    const double d2x = (uxp - 2.0 * uc + uxm) / hh2;
    const double dxf = (uxp - uc) / hh, dxb = (uc - uxm) / hh;
    double d2y = 0.0, dyf = 0.0, dyb = 0.0;
    if (g.dim == 2) {
      const double uyp = ui[size_t(g.index(ix, iy + 1))];
      const double uym = ui[size_t(g.index(ix, iy - 1))];
      d2y = (uyp - 2.0 * uc + uym) / hh2;
      dyf = (uyp - uc) / hh;
      dyb = (uc - uym) / hh;
    }
    const auto& ab = tab.a[size_t(i) * size_t(tab.size) + size_t(j)];
    double outer = 1e300;
    for (int z = 0; z < tab.nz; ++z) {
      double inner = -1e300;
      for (int th = 0; th < tab.nth; ++th) {
        const size_t blk = size_t((i * tab.nth + th) * tab.nz + z);
        const size_t off = blk * size_t(tab.size) + size_t(j);
        double v = -ab[0] * d2x - ab[1] * d2y;
        const double b0 = tab.b[off][0];
        v += b0 * (b0 > 0.0 ? dxb : dxf);
        if (g.dim == 2) {
          const double b1 = tab.b[off][1];
          v += b1 * (b1 > 0.0 ? dyb : dyf);
        }
        v += tab.l[off];
        for (int q = 0; q < tab.m; ++q)
          v += tab.d[(blk * size_t(tab.m) + size_t(q)) * size_t(tab.size) +
                     size_t(j)] *
               u.comp[size_t(q)][size_t(j)];
        inner = std::max(inner, v);
      }
      outer = std::min(outer, inner);
    }
    return outer;
  };
  return march(grid, T, dt_cfl, std::move(u0), opts, op);
}

ExperimentReport homogenization_study(const SystemSpec& spec,
                                      const std::vector<double>& eps_list,
                                      const SpaceGrid& grid, double T,
                                      EffectivePath path,
                                      const SpaceGrid& cell_grid) {
  require_decreasing(eps_list, "eps");
  for (double eps : eps_list) {
    const double q = 1.0 / eps;
    if (std::abs(q - std::round(q)) > 1e-9 ||
        grid.n % int(std::llround(q)) != 0)
      throw std::invalid_argument("eps/grid incommensurate");
    if (grid.n < 16 * int(std::llround(q)))
      throw std::invalid_argument("under-resolved fast scale");
  }
  ExperimentReport rep;
  rep.study = "homogenization";
  rep.scenario = spec.name;

  const Trajectory eff = effective_problem_solver(spec, grid, T, path, cell_grid);
  std::vector<double> errors;
  for (double eps : eps_list) {
    DiscreteOperatorConfig cfg;
    cfg.fast_epsilon = eps;
    const Trajectory sol = solve_parabolic(spec, grid, T, cfg);
    const double err =
        difference_norms(eff.final_state(), sol.final_state()).sup;
    rep.rows.push_back({eps, err});
    errors.push_back(err);
  }
  bool decreasing = true;
  bool all_tiny = true;
  for (size_t k = 0; k < errors.size(); ++k) {
    if (k > 0 && !(errors[k] < errors[k - 1])) decreasing = false;
    if (errors[k] > 1e-12) all_tiny = false;
  }
  rep.pass = decreasing || all_tiny;
  if (!all_tiny) rep.fit = fit_rate(errors, eps_list);
  return rep;
}

}  // namespace parlab
