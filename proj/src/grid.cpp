#include "parlab/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "parlab/parallel.hpp"

namespace parlab {

SpaceGrid::SpaceGrid(int dim_, int n_) : dim(dim_), n(n_) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("SpaceGrid: dim must be 1 or 2");
  if (n < 4) throw std::invalid_argument("SpaceGrid: N >= 4 required");
}

double torus_dist(const Pt& a, const Pt& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    double d = std::abs(a[size_t(k)] - b[size_t(k)]);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

Pt torus_disp(const Pt& a, const Pt& b, int dim) {
  Pt d{0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    double v = a[size_t(k)] - b[size_t(k)];
    v -= std::round(v);
    d[size_t(k)] = v;
  }
  return d;
}

bool GridFunction::all_finite() const {
  for (const auto& c : comp)
    for (double v : c)
      if (!std::isfinite(v)) return false;
  return true;
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (const auto& c : u.comp)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

HolderResult holder_seminorm(const GridFunction& u, double mu) {
  if (!(mu > 0.0 && mu <= 1.0))
    throw std::invalid_argument("holder_seminorm: mu must be in (0,1]");
  const SpaceGrid& g = u.grid;
  HolderResult res;
  if (g.dim == 1) {
    // Full pair enumeration; quotient depends only on the index offset.
    const int n = g.n;
    res.value = parallel_max(n - 1, [&](int64_t b, int64_t e) {
      double m = 0.0;
      for (int64_t off = b + 1; off <= e; ++off) {
        double d = double(off) / n;
        d = std::min(d, 1.0 - d);
        const double denom = std::pow(d, mu);
        for (const auto& c : u.comp)
          for (int j = 0; j < n; ++j) {
            const double q =
                std::abs(c[size_t(j)] - c[size_t(g.wrap(j + int(off)))]) / denom;
            m = std::max(m, q);
          }
      }
      return m;
    });
    return res;
  }
  // 2D: deterministic fixed-seed pair subsample -> lower bound. Always
  // includes axis-aligned neighbor pairs, which dominate for smooth data.
  res.sampled = true;
  const int64_t sz = g.size();
  double m = 0.0;
  const double hmu = std::pow(g.h(), mu);
  for (const auto& c : u.comp)
    for (int64_t j = 0; j < sz; ++j) {
      const int ix = g.ix(j), iy = g.iy(j);
      m = std::max(m, std::abs(c[size_t(j)] - c[size_t(g.index(ix + 1, iy))]) / hmu);
      m = std::max(m, std::abs(c[size_t(j)] - c[size_t(g.index(ix, iy + 1))]) / hmu);
    }
  std::mt19937 rng(12345u);
  std::uniform_int_distribution<int64_t> pick(0, sz - 1);
  const int64_t budget = 20 * sz;
  for (int64_t k = 0; k < budget; ++k) {
    const int64_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double d = torus_dist(g.point(a), g.point(b), 2);
    const double denom = std::pow(d, mu);
    for (const auto& c : u.comp)
      m = std::max(m, std::abs(c[size_t(a)] - c[size_t(b)]) / denom);
  }
  res.value = m;
  return res;
}

DifferenceNorms difference_norms(const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid) || u.m() != v.m())
    throw std::invalid_argument("difference_norms: grid mismatch");
  DifferenceNorms d;
  d.per_component.resize(size_t(u.m()), 0.0);
  for (int i = 0; i < u.m(); ++i) {
    double m = 0.0;
    const auto& a = u.comp[size_t(i)];
    const auto& b = v.comp[size_t(i)];
    for (size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    d.per_component[size_t(i)] = m;
    d.sup = std::max(d.sup, m);
  }
  return d;
}

GridFunction restrict_to(const GridFunction& u, const SpaceGrid& coarse) {
  const SpaceGrid& fine = u.grid;
  if (fine.dim != coarse.dim || fine.n % coarse.n != 0)
    throw std::invalid_argument("restrict: non-nested grids");
  const int q = fine.n / coarse.n;
  GridFunction r(coarse, u.m(), u.time);
  for (int i = 0; i < u.m(); ++i)
    for (int64_t j = 0; j < coarse.size(); ++j) {
      const int64_t fj = fine.index(coarse.ix(j) * q, coarse.iy(j) * q);
      r.comp[size_t(i)][size_t(j)] = u.comp[size_t(i)][size_t(fj)];
    }
  return r;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_grid_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << (u.grid.dim == 1 ? "i,x1,value\n" : "i,x1,x2,value\n");
  for (int i = 0; i < u.m(); ++i)
    for (int64_t j = 0; j < u.grid.size(); ++j) {
      const Pt x = u.grid.point(j);
      out << i << ',' << fmt17(x[0]);
      if (u.grid.dim == 2) out << ',' << fmt17(x[1]);
      out << ',' << fmt17(u.comp[size_t(i)][size_t(j)]) << '\n';
    }
  std::ofstream meta(path + ".meta.json");
  meta << "{\"N\": " << u.grid.n << ", \"dim\": " << u.grid.dim
       << ", \"m\": " << u.m() << ", \"t\": " << fmt17(u.time) << "}\n";
}

}  // namespace parlab
