#include "parlab/cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "parlab/parallel.hpp"
#include "parlab/sampling.hpp"

namespace parlab {

namespace {

SpaceGrid adapt_cell_grid(const SystemSpec& spec, const SpaceGrid& g) {
  if (g.dim == spec.dim) return g;
  // Callers may pass the 1D default; give 2D cells the documented default
  // resolution of 64 nodes per axis.
  return SpaceGrid(spec.dim, spec.dim == 2 ? 64 : g.n);
}

std::optional<Pt> fast_arg(const SystemSpec& spec, const Pt& y) {
  return spec.has_fast ? std::optional<Pt>(y) : std::nullopt;
}

// Frozen-argument cell Hamiltonian at one node: H_i(x, y_j, r, p, X + D^2 v).
double cell_hamiltonian(const SystemSpec& spec, const CellProblemInstance& inst,
                        const std::vector<double>& v, const SpaceGrid& g,
                        int64_t j) {
  const double h2 = g.h() * g.h();
  const Pt y = g.point(j);
  const int ix = g.ix(j), iy = g.iy(j);
  const double vc = v[size_t(j)];
  const double d2x =
      (v[size_t(g.index(ix + 1, iy))] - 2.0 * vc + v[size_t(g.index(ix - 1, iy))]) /
      h2;
  const double d2y =
      g.dim == 2 ? (v[size_t(g.index(ix, iy + 1))] - 2.0 * vc +
                    v[size_t(g.index(ix, iy - 1))]) /
                       h2
                 : 0.0;
  const double Xxx = inst.X.xx + d2x;
  const double Xyy = inst.X.yy + d2y;
  const auto yopt = fast_arg(spec, y);
  double outer = 1e300;
  for (int z = 0; z < spec.controls.n_zeta(); ++z) {
    double inner = -1e300;
    for (int th = 0; th < spec.controls.n_theta(); ++th) {
      const CoefficientSample c =
          eval_coefficients(spec, inst.i, th, z, 0.0, inst.x, yopt);
      double val = -c.A[0] * Xxx;
      if (spec.dim == 2) val -= c.A[1] * Xyy;
      for (int k = 0; k < spec.dim; ++k) val += c.b[size_t(k)] * inst.p[size_t(k)];
      val += c.l;
      for (int q = 0; q < spec.m; ++q) val += c.d_row[size_t(q)] * inst.r[size_t(q)];
      val -= c.trace_coeff * (Xxx + (spec.dim == 2 ? Xyy : 0.0));
      inner = std::max(inner, val);
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

}  // namespace

namespace {

// Corrector with the constant mode split off: the represented function is
// fluctuation + mean. Packing the two into one array costs one rounding of
// size eps * |mean| per node, which matters once second differences divide
// by h^2; diagnostics therefore work on the split form.
struct SplitCorrector {
  std::vector<double> fluctuation;
  double mean = 0.0;
};

SplitCorrector solve_corrector_split(const SystemSpec& spec,
                                     const CellProblemInstance& inst,
                                     double lambda, const SpaceGrid& cell_grid_in) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_approx_corrector: lambda > 0 required");
  if (int(inst.r.size()) != spec.m)
    throw std::invalid_argument("solve_approx_corrector: r dimension mismatch");
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);
  const double h2 = g.h() * g.h();
  const double tau = 1.0 / (lambda + 2.0 * spec.dim * spec.a_sq_max() / h2);
  const int64_t sz = g.size();

  // The coefficients are frozen per node across sweeps; tabulate the
  // effective diagonal diffusion and the v-independent part of H per
  // (node, control pair) so the sweeps are pure stencil arithmetic.
  const int nth = spec.controls.n_theta(), nz = spec.controls.n_zeta();
  const size_t npair = size_t(nth) * size_t(nz);
  std::vector<double> Ax(npair * size_t(sz)), Ay(npair * size_t(sz)),
      f0(npair * size_t(sz));
  for (int64_t j = 0; j < sz; ++j) {
    const auto yopt = fast_arg(spec, g.point(j));
    for (int z = 0; z < nz; ++z)
      for (int th = 0; th < nth; ++th) {
        const CoefficientSample c =
            eval_coefficients(spec, inst.i, th, z, 0.0, inst.x, yopt);
        const size_t off = (size_t(z) * size_t(nth) + size_t(th)) * size_t(sz) +
                           size_t(j);
        Ax[off] = c.A[0] + c.trace_coeff;
        Ay[off] = spec.dim == 2 ? c.A[1] + c.trace_coeff : 0.0;
        double val = -Ax[off] * inst.X.xx - Ay[off] * inst.X.yy;
        for (int k = 0; k < spec.dim; ++k)
          val += c.b[size_t(k)] * inst.p[size_t(k)];
        val += c.l;
        for (int q = 0; q < spec.m; ++q)
          val += c.d_row[size_t(q)] * inst.r[size_t(q)];
        f0[off] = val;
      }
  }

  // The constant mode of v is tracked separately: it is O(1/lambda) and would
  // otherwise swamp the second-difference quotients with rounding noise.
  std::vector<double> v(size_t(sz), 0.0), res(size_t(sz), 0.0);
  double vbar = 0.0;
  double sup_res = 0.0;
  const int64_t max_sweeps = 1'000'000;
  for (int64_t sweep = 0; sweep < max_sweeps; ++sweep) {
    parallel_for(sz, [&](int64_t b, int64_t e) {
      for (int64_t j = b; j < e; ++j) {
        const int ix = g.ix(j), iy = g.iy(j);
        const double vc = v[size_t(j)];
        const double d2x = (v[size_t(g.index(ix + 1, iy))] - 2.0 * vc +
                            v[size_t(g.index(ix - 1, iy))]) /
                           h2;
        const double d2y =
            g.dim == 2 ? (v[size_t(g.index(ix, iy + 1))] - 2.0 * vc +
                          v[size_t(g.index(ix, iy - 1))]) /
                             h2
                       : 0.0;
        double outer = 1e300;
        for (int z = 0; z < nz; ++z) {
          double inner = -1e300;
          for (int th = 0; th < nth; ++th) {
            const size_t off =
                (size_t(z) * size_t(nth) + size_t(th)) * size_t(sz) + size_t(j);
            inner = std::max(inner, f0[off] - Ax[off] * d2x - Ay[off] * d2y);
          }
          outer = std::min(outer, inner);
        }
        res[size_t(j)] = lambda * (vc + vbar) + outer;
      }
    });
    // A constant shift of v moves the residual by exactly lambda * shift, so
    // the mean mode is solved in closed form each sweep; only the mean-zero
    // modes are left to the damped fixed point.
    const double shift = mean_of(res) / lambda;
    vbar -= shift;
    sup_res = 0.0;
    for (int64_t j = 0; j < sz; ++j) {
      res[size_t(j)] -= lambda * shift;
      sup_res = std::max(sup_res, std::abs(res[size_t(j)]));
    }
    // Converge one decade past the 1e-9 contract so the packed single-array
    // form keeps the target even after the constant mode is folded back in.
    if (sup_res <= 1e-10) return SplitCorrector{std::move(v), vbar};
    for (int64_t j = 0; j < sz; ++j) v[size_t(j)] -= tau * res[size_t(j)];
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "cell iteration stalled; residual = %.3e",
                sup_res);
  throw std::runtime_error(buf);
}

GridFunction pack_corrector(SplitCorrector s, const SpaceGrid& g) {
  GridFunction out(g, 1, 0.0);
  out.comp[0] = std::move(s.fluctuation);
  for (double& val : out.comp[0]) val += s.mean;
  return out;
}

}  // namespace

GridFunction solve_approx_corrector(const SystemSpec& spec,
                                    const CellProblemInstance& inst,
                                    double lambda, const SpaceGrid& cell_grid_in) {
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);
  return pack_corrector(solve_corrector_split(spec, inst, lambda, g), g);
}

CorrectorSolution effective_hamiltonian(const SystemSpec& spec,
                                        const CellProblemInstance& inst,
                                        const std::vector<double>& lambda_schedule,
                                        const SpaceGrid& cell_grid_in) {
  if (lambda_schedule.size() < 3)
    throw std::invalid_argument("effective_hamiltonian: >= 3 lambdas required");
  for (size_t k = 1; k < lambda_schedule.size(); ++k)
    if (!(lambda_schedule[k] < lambda_schedule[k - 1]))
      throw std::invalid_argument("effective_hamiltonian: schedule not decreasing");
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);

  CorrectorSolution sol;
  sol.lambdas = lambda_schedule;
  SplitCorrector finest;
  for (double lam : lambda_schedule) {
    SplitCorrector s = solve_corrector_split(spec, inst, lam, g);
    const auto& vv = s.fluctuation;
    const double lo = *std::min_element(vv.begin(), vv.end());
    const double hi = *std::max_element(vv.begin(), vv.end());
    sol.ergodic_estimates.push_back(-lam * (mean_of(vv) + s.mean));
    sol.spreads.push_back(lam * (hi - lo));
    if (lam == lambda_schedule.back()) finest = s;
    sol.v_lambda.push_back(pack_corrector(std::move(s), g));
  }
  for (size_t k = 1; k < sol.spreads.size(); ++k)
    if (sol.spreads[k] > sol.spreads[k - 1] + 1e-10 && sol.spreads[k] > 1e-8)
      throw std::runtime_error("no ergodic limit detected");

  const size_t last = lambda_schedule.size() - 1;
  const double e1 = sol.ergodic_estimates[last - 1];
  const double e2 = sol.ergodic_estimates[last];
  const double l1 = lambda_schedule[last - 1];
  const double l2 = lambda_schedule[last];
  sol.h_bar = e2 + (e2 - e1) * l2 / (l1 - l2);

  sol.corrector = sol.v_lambda.back();
  const double v0 = sol.corrector.comp[0][0];
  for (double& x : sol.corrector.comp[0]) x -= v0;
  // Re-substitution residual of the smallest-lambda corrector, evaluated on
  // the split form so the difference quotients act on the O(1) fluctuation
  // only (packing the constant mode costs eps * |mean| per node, which the
  // h^-2 quotients would amplify past the target).
  double r = 0.0;
  for (int64_t j = 0; j < g.size(); ++j)
    r = std::max(r, std::abs(l2 * (finest.fluctuation[size_t(j)] + finest.mean) +
                             cell_hamiltonian(spec, inst, finest.fluctuation, g,
                                              j)));
  sol.residual = r;
  return sol;
}

namespace {

// Diagonal diffusion (including any trace_coeff part) of component i at the
// frozen slow point, sampled on the cell grid; throws unless it is
// control-trivial.
std::vector<std::array<double, 2>> sampled_cell_diffusion(
    const SystemSpec& spec, int i, const Pt& x, const SpaceGrid& g) {
  std::vector<std::array<double, 2>> A(size_t(g.size()), {0.0, 0.0});
  for (int64_t j = 0; j < g.size(); ++j) {
    const auto yopt = fast_arg(spec, g.point(j));
    bool first = true;
    for (int z = 0; z < spec.controls.n_zeta(); ++z)
      for (int th = 0; th < spec.controls.n_theta(); ++th) {
        const CoefficientSample c = eval_coefficients(spec, i, th, z, 0.0, x, yopt);
        std::array<double, 2> a{c.A[0] + c.trace_coeff,
                                spec.dim == 2 ? c.A[1] + c.trace_coeff : 0.0};
        if (first) {
          A[size_t(j)] = a;
          first = false;
        } else if (std::abs(a[0] - A[size_t(j)][0]) > 1e-12 ||
                   std::abs(a[1] - A[size_t(j)][1]) > 1e-12) {
          throw std::invalid_argument(
              "effective coefficients require control-trivial diffusion");
        }
      }
  }
  return A;
}

}  // namespace

InvariantMeasure invariant_measure(const SystemSpec& spec, int i, const Pt& x,
                                   const SpaceGrid& cell_grid_in) {
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);
  const auto A = sampled_cell_diffusion(spec, i, x, g);
  double amax = 0.0;
  for (const auto& a : A) amax = std::max(amax, std::max(a[0], a[1]));
  if (!(amax > 0.0))
    throw std::invalid_argument("invariant_measure: degenerate diffusion");
  const double h2 = g.h() * g.h();
  const double tau = h2 / (2.0 * spec.dim * amax);
  const int64_t sz = g.size();

  std::vector<double> mu(size_t(sz), 1.0), flux(size_t(sz), 0.0),
      next(size_t(sz), 0.0);
  double change = 1e300;
  const int64_t max_iters = 5'000'000;
  for (int64_t it = 0; it < max_iters && change > 1e-10; ++it) {
    // One adjoint step: mu <- mu + tau * sum_k D2_k (A_k mu).
    for (int64_t j = 0; j < sz; ++j) flux[size_t(j)] = A[size_t(j)][0] * mu[size_t(j)];
    change = 0.0;
    for (int64_t j = 0; j < sz; ++j) {
      const int ix = g.ix(j), iy = g.iy(j);
      double d2 = (flux[size_t(g.index(ix + 1, iy))] - 2.0 * flux[size_t(j)] +
                   flux[size_t(g.index(ix - 1, iy))]) /
                  h2;
      next[size_t(j)] = mu[size_t(j)] + tau * d2;
    }
    if (g.dim == 2) {
      for (int64_t j = 0; j < sz; ++j)
        flux[size_t(j)] = A[size_t(j)][1] * mu[size_t(j)];
      for (int64_t j = 0; j < sz; ++j) {
        const int ix = g.ix(j), iy = g.iy(j);
        next[size_t(j)] += tau *
                           (flux[size_t(g.index(ix, iy + 1))] - 2.0 * flux[size_t(j)] +
                            flux[size_t(g.index(ix, iy - 1))]) /
                           h2;
      }
    }
    for (int64_t j = 0; j < sz; ++j)
      change = std::max(change, std::abs(next[size_t(j)] - mu[size_t(j)]));
    std::swap(mu, next);
  }
  if (change > 1e-10) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "invariant measure iteration stalled; residual = %.3e", change);
    throw std::runtime_error(buf);
  }
  // Normalize discrete mass (the adjoint step conserves it exactly, but
  // rounding drift over many iterations is removed here).
  double mass = 0.0;
  for (double v : mu) mass += v;
  mass /= double(sz);
  for (double& v : mu) v /= mass;

  InvariantMeasure out;
  out.x = x;
  out.density = GridFunction(g, 1, 0.0);
  out.density.comp[0] = std::move(mu);
  out.residual = change;
  return out;
}

double EffectiveCoeffs::f_bar(const SystemSpec& spec, int i,
                              const std::vector<double>& r, const Pt& p) const {
  double outer = 1e300;
  for (int z = 0; z < spec.controls.n_zeta(); ++z) {
    double inner = -1e300;
    for (int th = 0; th < spec.controls.n_theta(); ++th) {
      const size_t blk = size_t((i * spec.controls.n_theta() + th) *
                                    spec.controls.n_zeta() +
                                z);
      double v = l_bar[blk];
      for (int k = 0; k < spec.dim; ++k) v += b_bar[blk][size_t(k)] * p[size_t(k)];
      for (int q = 0; q < spec.m; ++q) v += d_bar_row[blk][size_t(q)] * r[size_t(q)];
      inner = std::max(inner, v);
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

double EffectiveCoeffs::h_bar(const SystemSpec& spec, int i,
                              const std::vector<double>& r, const Pt& p,
                              const SymMat& X) const {
  double v = -a_bar[size_t(i)][0] * X.xx;
  if (spec.dim == 2) v -= a_bar[size_t(i)][1] * X.yy;
  return v + f_bar(spec, i, r, p);
}

EffectiveCoeffs effective_linear_coeffs(const SystemSpec& spec, const Pt& x,
                                        const SpaceGrid& cell_grid_in) {
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);
  const int64_t sz = g.size();
  const double w = 1.0 / double(sz);  // h^dim with mass-1 normalization

  EffectiveCoeffs out;
  out.x = x;
  out.a_bar.assign(size_t(spec.m), {0.0, 0.0});
  const size_t nblk = spec.blocks.size();
  out.b_bar.assign(nblk, {0.0, 0.0});
  out.l_bar.assign(nblk, 0.0);
  out.d_bar_row.assign(nblk, std::vector<double>(size_t(spec.m), 0.0));

  for (int i = 0; i < spec.m; ++i) {
    const InvariantMeasure mu = invariant_measure(spec, i, x, g);
    const auto A = sampled_cell_diffusion(spec, i, x, g);
    for (int64_t j = 0; j < sz; ++j) {
      const double wj = w * mu.density.comp[0][size_t(j)];
      out.a_bar[size_t(i)][0] += wj * A[size_t(j)][0];
      out.a_bar[size_t(i)][1] += wj * A[size_t(j)][1];
      const auto yopt = fast_arg(spec, g.point(j));
      for (int z = 0; z < spec.controls.n_zeta(); ++z)
        for (int th = 0; th < spec.controls.n_theta(); ++th) {
          const CoefficientSample c = eval_coefficients(spec, i, th, z, 0.0, x, yopt);
          const size_t blk = size_t((i * spec.controls.n_theta() + th) *
                                        spec.controls.n_zeta() +
                                    z);
          for (int k = 0; k < spec.dim; ++k)
            out.b_bar[blk][size_t(k)] += wj * c.b[size_t(k)];
          out.l_bar[blk] += wj * c.l;
          for (int q = 0; q < spec.m; ++q)
            out.d_bar_row[blk][size_t(q)] += wj * c.d_row[size_t(q)];
        }
    }
  }
  return out;
}

EffectivePropertiesReport check_effective_properties(const SystemSpec& spec,
                                                     int budget, unsigned seed,
                                                     const SpaceGrid& cell_grid_in) {
  if (budget < 1)
    throw std::invalid_argument("check_effective_properties: budget >= 1");
  const SpaceGrid g = adapt_cell_grid(spec, cell_grid_in);
  EffectivePropertiesReport rep;
  rep.effective_nu = 1e300;

  // A small deterministic set of slow points; the effective operator is
  // rebuilt per point and then sampled in (r, p, X).
  std::vector<Pt> xs;
  HaltonSequence hx(2, seed);
  xs.push_back(Pt{0.0, 0.0});
  for (int k = 0; k < 3; ++k) {
    const auto q = hx.next();
    xs.push_back(Pt{q[0], spec.dim == 2 ? q[1] : 0.0});
  }

  HaltonSequence hs(15, seed + 1);
  for (const Pt& x : xs) {
    const EffectiveCoeffs eff = effective_linear_coeffs(spec, x, g);
    for (int i = 0; i < spec.m; ++i)
      for (int k = 0; k < spec.dim; ++k)
        rep.effective_nu = std::min(rep.effective_nu, eff.a_bar[size_t(i)][size_t(k)]);

    const int per_x = std::max(1, budget / int(xs.size()));
    std::vector<double> r1(size_t(spec.m)), r2(size_t(spec.m));
    for (int k = 0; k < per_x; ++k) {
      const auto q = hs.next();
      size_t c = 0;
      auto draw = [&]() { return 2.0 * q[c++ % q.size()] - 1.0; };
      for (int j = 0; j < spec.m; ++j) r1[size_t(j)] = draw();
      for (int j = 0; j < spec.m; ++j) r2[size_t(j)] = draw();
      const Pt p1{draw(), spec.dim == 2 ? draw() : 0.0};
      const Pt p2{draw(), spec.dim == 2 ? draw() : 0.0};
      SymMat X1, X2;
      X1.xx = 3.0 * draw();
      X2.xx = 3.0 * draw();
      if (spec.dim == 2) {
        X1.yy = 3.0 * draw();
        X2.yy = 3.0 * draw();
      }
      const double s = q[c++ % q.size()] * 2.0;

      for (int i = 0; i < spec.m; ++i) {
        // (a) Lipschitz ratio in (r,p,X).
        const double gap = std::abs(eff.h_bar(spec, i, r1, p1, X1) -
                                    eff.h_bar(spec, i, r2, p2, X2));
        double dist = 0.0;
        for (int j = 0; j < spec.m; ++j) dist += std::abs(r1[size_t(j)] - r2[size_t(j)]);
        dist += std::abs(p1[0] - p2[0]) + std::abs(p1[1] - p2[1]) +
                std::abs(X1.xx - X2.xx) + std::abs(X1.yy - X2.yy);
        if (dist > 1e-9) rep.fitted_C1 = std::max(rep.fitted_C1, gap / dist);

        // (b) Ellipticity: H(X + s I) <= H(X) - nu s n.
        SymMat Xs = X1;
        Xs.xx += s;
        if (spec.dim == 2) Xs.yy += s;
        const double drop = eff.h_bar(spec, i, r1, p1, Xs) -
                            eff.h_bar(spec, i, r1, p1, X1);
        if (drop > -spec.constants.nu * s * spec.dim + 1e-9)
          ++rep.ellipticity_violations;

        // (c) Quasi-monotonicity at the max-gap component.
        int arg = 0;
        double mg = -1e300;
        for (int j = 0; j < spec.m; ++j) {
          const double d = r1[size_t(j)] - r2[size_t(j)];
          if (d > mg) {
            mg = d;
            arg = j;
          }
        }
        if (mg >= 0.0) {
          const double diff = eff.f_bar(spec, arg, r1, p1) -
                              eff.f_bar(spec, arg, r2, p1);
          if (diff < -spec.gamma * mg - 1e-9) ++rep.quasi_monotonicity_violations;
        }
      }
    }
    // Exhaustive sign patterns at m = 2.
    if (spec.m == 2) {
      const double pats[][2] = {{1.0, 0.0}, {1.0, 1.0},  {1.0, -1.0},
                                {0.5, 0.25}, {2.0, -3.0}, {0.0, 0.0}};
      for (const auto& pat : pats) {
        if (pat[0] < pat[1]) continue;
        std::vector<double> base{0.3, -0.2};
        std::vector<double> top{base[0] + pat[0], base[1] + pat[1]};
        const Pt p{0.4, 0.0};
        const double diff = eff.f_bar(spec, 0, top, p) - eff.f_bar(spec, 0, base, p);
        if (diff < -spec.gamma * pat[0] - 1e-9)
          ++rep.quasi_monotonicity_violations;
      }
    }
  }
  rep.pass = rep.ellipticity_violations == 0 &&
             rep.quasi_monotonicity_violations == 0 &&
             rep.effective_nu >= spec.constants.nu - 1e-9;
  return rep;
}

EffectiveHamiltonianCache::EffectiveHamiltonianCache(
    const SystemSpec& spec, SpaceGrid cell_grid,
    std::vector<double> lambda_schedule, size_t cap)
    : spec_(spec),
      cell_grid_(adapt_cell_grid(spec, cell_grid)),
      lambdas_(std::move(lambda_schedule)),
      cap_(cap) {
  if (lambdas_.empty()) lambdas_ = {1e-1, 5e-2, 2.5e-2};
}

double EffectiveHamiltonianCache::eval(int i, const Pt& x,
                                       const std::vector<double>& r,
                                       const Pt& p, const SymMat& X) {
  auto snap = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  CellProblemInstance inst;
  inst.i = i;
  inst.x = {snap(x[0]), snap(x[1])};
  inst.r.resize(r.size());
  for (size_t k = 0; k < r.size(); ++k) inst.r[k] = snap(r[k]);
  inst.p = {snap(p[0]), snap(p[1])};
  inst.X.xx = snap(X.xx);
  inst.X.xy = snap(X.xy);
  inst.X.yy = snap(X.yy);

  std::string key = std::to_string(i);
  char buf[32];
  auto push = [&](double v) {
    std::snprintf(buf, sizeof(buf), "|%.3f", v);
    key += buf;
  };
  push(inst.x[0]);
  push(inst.x[1]);
  for (double v : inst.r) push(v);
  push(inst.p[0]);
  push(inst.p[1]);
  push(inst.X.xx);
  push(inst.X.xy);
  push(inst.X.yy);

  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (cache_.size() >= cap_)
    throw std::runtime_error("effective evaluation budget exceeded");
  const double val =
      effective_hamiltonian(spec_, inst, lambdas_, cell_grid_).h_bar;
  cache_.emplace(std::move(key), val);
  return val;
}

}  // namespace parlab
