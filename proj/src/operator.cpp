#include "parlab/operator.hpp"

#include <limits>
#include <stdexcept>

namespace parlab {

namespace {

Pt fast_point(const Pt& x, double eps) {
  // y = x / eps; the trig representation is 1-periodic so no explicit wrap
  // is needed, but wrapping keeps arguments small and evaluation stable.
  Pt y{x[0] / eps, x[1] / eps};
  y[0] -= std::floor(y[0]);
  y[1] -= std::floor(y[1]);
  return y;
}

}  // namespace

double hamiltonian_pointwise(const SystemSpec& spec, int i, double t,
                             const Pt& x, const std::vector<double>& r,
                             const Pt& p, const SymMat& X,
                             const std::optional<Pt>& y) {
  if (int(r.size()) != spec.m)
    throw std::invalid_argument("hamiltonian_pointwise: r dimension mismatch");
  double outer = std::numeric_limits<double>::infinity();
  for (int z = 0; z < spec.controls.n_zeta(); ++z) {
    double inner = -std::numeric_limits<double>::infinity();
    for (int th = 0; th < spec.controls.n_theta(); ++th) {
      const CoefficientSample c = eval_coefficients(spec, i, th, z, t, x, y);
      double v = -c.A[0] * X.xx;
      if (spec.dim == 2) v -= c.A[1] * X.yy;
      for (int k = 0; k < spec.dim; ++k) v += c.b[size_t(k)] * p[size_t(k)];
      v += c.l;
      for (int j = 0; j < spec.m; ++j) v += c.d_row[size_t(j)] * r[j];
      v -= c.trace_coeff * X.trace(spec.dim);
      inner = std::max(inner, v);
    }
    outer = std::min(outer, inner);
  }
  return outer;
}

double discrete_hamiltonian(const SystemSpec& spec, const GridFunction& u,
                            int i, int64_t node, double t,
                            const DiscreteOperatorConfig& config) {
  const SpaceGrid& g = u.grid;
  if (g.dim != spec.dim)
    throw std::invalid_argument("discrete_hamiltonian: dimension mismatch");
  const double h = g.h();
  const double h2 = h * h;
  const Pt x = g.point(node);
  std::optional<Pt> y;
  if (spec.has_fast) {
    if (!config.fast_epsilon)
      throw std::invalid_argument("fast-variable arity mismatch");
    y = fast_point(x, *config.fast_epsilon);
  }
  const int ix = g.ix(node), iy = g.iy(node);
  const auto& ui = u.comp[size_t(i)];
  const double uc = ui[size_t(node)];
  const double uxp = ui[size_t(g.index(ix + 1, iy))];
  const double uxm = ui[size_t(g.index(ix - 1, iy))];
  const double d2x = (uxp - 2.0 * uc + uxm) / h2;
  double d2y = 0.0, uyp = 0.0, uym = 0.0;
  if (g.dim == 2) {
    uyp = ui[size_t(g.index(ix, iy + 1))];
    uym = ui[size_t(g.index(ix, iy - 1))];
    d2y = (uyp - 2.0 * uc + uym) / h2;
  }

  const Pt yy = y.value_or(Pt{0.0, 0.0});
  const double dxf = (uxp - uc) / h, dxb = (uc - uxm) / h;
  const double dyf = g.dim == 2 ? (uyp - uc) / h : 0.0;
  const double dyb = g.dim == 2 ? (uc - uym) / h : 0.0;

  double outer = std::numeric_limits<double>::infinity();
  for (int z = 0; z < spec.controls.n_zeta(); ++z) {
    double inner = -std::numeric_limits<double>::infinity();
    for (int th = 0; th < spec.controls.n_theta(); ++th) {
      // Evaluates the fields directly (no CoefficientSample) to keep the
      // time-marching inner loop allocation-free.
      const CoefficientBlock& blk = spec.block(i, th, z);
      const double a0 = blk.a[0].eval(t, x, yy);
      double v = -(a0 * a0) * d2x;
      if (g.dim == 2) {
        const double a1 = blk.a[1].eval(t, x, yy);
        v -= (a1 * a1) * d2y;
      }
      // Upwind first differences per drift sign; ties go to the forward
      // difference (the term vanishes there anyway).
      const double b0 = blk.b[0].eval(t, x, yy);
      v += b0 * (config.upwind ? (b0 > 0.0 ? dxb : dxf) : 0.5 * (dxf + dxb));
      if (g.dim == 2) {
        const double b1 = blk.b[1].eval(t, x, yy);
        v += b1 * (config.upwind ? (b1 > 0.0 ? dyb : dyf) : 0.5 * (dyf + dyb));
      }
      v += blk.l.eval(t, x, yy);
      for (int j = 0; j < spec.m; ++j)
        v += blk.d_row[size_t(j)].eval(t, x, yy) *
             u.comp[size_t(j)][size_t(node)];
      v -= blk.trace_coeff * (d2x + d2y);
      inner = std::max(inner, v);
    }
    outer = std::min(outer, inner);
  }
  if (config.eps_visc > 0.0) outer -= config.eps_visc * (d2x + d2y);
  return outer;
}

double cfl_timestep(const SystemSpec& spec, double h,
                    const DiscreteOperatorConfig& config) {
  if (!(h > 0.0)) throw std::invalid_argument("cfl_timestep: h > 0 required");
  const double denom = 2.0 * spec.dim * (spec.a_sq_max() + config.eps_visc) +
                       h * spec.b_sum_max() + h * h * spec.d_diag_max();
  if (denom <= 0.0) return h;
  return h * h / denom;
}

}  // namespace parlab
