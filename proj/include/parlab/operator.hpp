#pragma once

#include <optional>

#include "parlab/grid.hpp"
#include "parlab/scenario.hpp"

namespace parlab {

/// Symmetric 2x2 matrix {xx, xy, yy}; in 1D only xx is used.
struct SymMat {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  double trace(int dim) const { return dim == 1 ? xx : xx + yy; }
  /// Frobenius norm.
  double norm(int dim) const {
    return dim == 1 ? std::abs(xx)
                    : std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy);
  }
};

struct DiscreteOperatorConfig {
  bool upwind = true;
  double eps_visc = 0.0;
  /// Fast scale of problem (HJe); y = x / fast_epsilon on exact trig
  /// arguments. Unset for specs without a fast variable.
  std::optional<double> fast_epsilon;
};

/// Pointwise min-max Hamiltonian of the system, exact enumeration of the
/// finite control grids.
double hamiltonian_pointwise(const SystemSpec& spec, int i, double t,
                             const Pt& x, const std::vector<double>& r,
                             const Pt& p, const SymMat& X,
                             const std::optional<Pt>& y = std::nullopt);

/// Monotone finite-difference evaluation at one node: central second
/// differences for the (diagonal) diffusion, drift-sign upwinding for the
/// first-order terms, periodic indexing, optional -eps_visc * Lap_h u_i.
double discrete_hamiltonian(const SystemSpec& spec, const GridFunction& u,
                            int i, int64_t node, double t,
                            const DiscreteOperatorConfig& config);

/// Largest explicit-Euler step keeping all stencil weights nonnegative:
/// dt = h^2 / (2 dim (A_max + eps_visc) + h b_max_sum + h^2 d_diag_max).
/// Falls back to dt = h when the denominator vanishes.
double cfl_timestep(const SystemSpec& spec, double h,
                    const DiscreteOperatorConfig& config);

}  // namespace parlab
