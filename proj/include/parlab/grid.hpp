#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "parlab/trig.hpp"

namespace parlab {

/// Uniform periodic grid on the unit torus, same node count per axis.
struct SpaceGrid {
  int dim = 1;
  int n = 4;  // nodes per axis, spacing h = 1/n

  SpaceGrid() = default;
  SpaceGrid(int dim_, int n_);

  double h() const { return 1.0 / n; }
  int64_t size() const { return dim == 1 ? n : int64_t(n) * n; }

  int wrap(int i) const {
    i %= n;
    return i < 0 ? i + n : i;
  }
  int64_t index(int ix, int iy = 0) const {
    return dim == 1 ? wrap(ix) : int64_t(wrap(iy)) * n + wrap(ix);
  }
  Pt point(int64_t idx) const {
    if (dim == 1) return {double(idx) / n, 0.0};
    return {double(idx % n) / n, double(idx / n) / n};
  }
  int ix(int64_t idx) const { return dim == 1 ? int(idx) : int(idx % n); }
  int iy(int64_t idx) const { return dim == 1 ? 0 : int(idx / n); }

  bool operator==(const SpaceGrid& o) const {
    return dim == o.dim && n == o.n;
  }
};

struct TimeGrid {
  double t_final = 0.0;
  double dt = 0.0;
  int64_t steps = 0;
};

/// Torus distance between two grid-or-arbitrary points (per-axis wrap).
double torus_dist(const Pt& a, const Pt& b, int dim);
/// Wrapped displacement a-b, each axis in [-1/2, 1/2).
Pt torus_disp(const Pt& a, const Pt& b, int dim);

/// m-component function values on a SpaceGrid.
struct GridFunction {
  SpaceGrid grid;
  double time = 0.0;
  std::vector<std::vector<double>> comp;  // comp[i][node]

  GridFunction() = default;
  GridFunction(const SpaceGrid& g, int m, double t = 0.0)
      : grid(g), time(t), comp(m, std::vector<double>(g.size(), 0.0)) {}

  int m() const { return static_cast<int>(comp.size()); }
  bool all_finite() const;
};

double sup_norm(const GridFunction& u);

struct HolderResult {
  double value = 0.0;
  bool sampled = false;  // true in 2D where pairs are subsampled
};

/// Discrete Hoelder seminorm with torus metric. Exact pair enumeration in
/// 1D; deterministic fixed-seed pair subsample (a lower bound) in 2D.
HolderResult holder_seminorm(const GridFunction& u, double mu);

struct DifferenceNorms {
  double sup = 0.0;
  std::vector<double> per_component;
};

DifferenceNorms difference_norms(const GridFunction& u, const GridFunction& v);

/// Pointwise injection onto a nested coarser grid.
GridFunction restrict_to(const GridFunction& u, const SpaceGrid& coarse);

/// CSV with header "i,x1[,x2],value" plus a side metadata record
/// {N, dim, m, t} written to path + ".meta.json".
void write_grid_csv(const GridFunction& u, const std::string& path);

/// Fixed float formatting used by every CSV writer: 17 significant digits.
std::string fmt17(double v);

}  // namespace parlab
