#pragma once

#include <optional>
#include <vector>

#include "parlab/operator.hpp"

namespace parlab {

struct Trajectory {
  SpaceGrid grid;
  double dt = 0.0;
  int64_t steps = 0;
  std::vector<double> times;           // snapshot times, ascending, last == T
  std::vector<GridFunction> states;    // one per snapshot time

  const GridFunction& final_state() const { return states.back(); }
  /// Snapshot at the stored time closest to t.
  const GridFunction& at(double t) const;
  double sup_over_time() const;  // max_n sup_norm(states[n])
};

struct SolveOptions {
  /// Explicit step request; refused if it violates the CFL bound.
  std::optional<double> dt;
  int max_snapshots = 64;
};

/// Explicit Euler marching of the Cauchy problem, its viscous approximation
/// (config.eps_visc > 0) and the oscillatory problem (config.fast_epsilon).
/// Throws on requested CFL violations and on blow-up.
Trajectory solve_parabolic(const SystemSpec& spec, const SpaceGrid& grid,
                           double T, const DiscreteOperatorConfig& config,
                           const SolveOptions& opts = {});

struct ComparisonReport {
  bool pass = true;
  double max_violation = 0.0;  // maximal positive gap u_low - u_high
};

/// Evolves both data and asserts componentwise ordering at every stored time.
ComparisonReport check_comparison(const SystemSpec& spec,
                                  const GridFunction& u0_low,
                                  const GridFunction& u0_high, double T,
                                  const DiscreteOperatorConfig& config = {});

/// Node sampling of the spec's initial datum.
GridFunction sample_initial_datum(const SystemSpec& spec,
                                  const SpaceGrid& grid);

}  // namespace parlab
