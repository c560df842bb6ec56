#pragma once

#include "parlab/cell.hpp"
#include "parlab/estimates.hpp"

namespace parlab {

struct ExperimentRow {
  double param = 0.0;  // eps or delta
  double error = 0.0;
};

struct ExperimentReport {
  std::string study;
  std::string scenario;
  std::vector<ExperimentRow> rows;
  RateFit fit;
  bool pass = false;

  std::string csv() const;  // {study,scenario,param,error,fitted_exponent,residual,pass}
};

/// Solves (VV) per eps and the eps = 0 problem on the same grid and fits the
/// convergence rate of ||u - u^eps||(T).
ExperimentReport vanishing_viscosity_study(const SystemSpec& spec,
                                           const std::vector<double>& eps_list,
                                           const SpaceGrid& grid, double T);

enum class PerturbationKind { l, b, a, d };

/// Builds the delta-perturbed spec of one coefficient kind: l gains a
/// constant delta, b gains delta per component, a and d are scaled by
/// (1 + delta). Exactly representable in the trig family.
SystemSpec perturb_spec(const SystemSpec& spec, PerturbationKind kind,
                        double delta);

/// Solves base and perturbed specs per delta and fits the error scaling
/// (expected exponent 1 for l/d kinds and mu for b/a kinds).
ExperimentReport continuous_dependence_sweep(const SystemSpec& spec,
                                             PerturbationKind kind,
                                             const std::vector<double>& deltas,
                                             const SpaceGrid& grid, double T);

enum class EffectivePath { measure, lambda, general };

/// Time marching of the effective problem (hom). The measure and lambda
/// paths tabulate effective linear coefficients per slow node; the general
/// path evaluates the memoized cell-solve cache pointwise.
Trajectory effective_problem_solver(const SystemSpec& spec,
                                    const SpaceGrid& grid, double T,
                                    EffectivePath path = EffectivePath::measure,
                                    const SpaceGrid& cell_grid = SpaceGrid(1, 128),
                                    const SolveOptions& opts = {});

/// Solves (HJe) per eps against the effective problem; errors on the
/// common node set. Requires eps = 1/q with q integer and N >= 16 q.
ExperimentReport homogenization_study(const SystemSpec& spec,
                                      const std::vector<double>& eps_list,
                                      const SpaceGrid& grid, double T,
                                      EffectivePath path = EffectivePath::measure,
                                      const SpaceGrid& cell_grid = SpaceGrid(1, 128));

}  // namespace parlab
