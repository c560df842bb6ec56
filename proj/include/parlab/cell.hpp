#pragma once

#include <functional>
#include <memory>
#include <unordered_map>

#include "parlab/operator.hpp"

namespace parlab {

/// One frozen cell problem: find the constant Hbar_i(x,r,p,X) for which the
/// periodic corrector equation has a solution.
struct CellProblemInstance {
  int i = 0;
  Pt x{0.0, 0.0};
  std::vector<double> r;
  Pt p{0.0, 0.0};
  SymMat X;
};

struct CorrectorSolution {
  std::vector<double> lambdas;            // decreasing schedule
  std::vector<GridFunction> v_lambda;     // scalar periodic grid functions
  std::vector<double> ergodic_estimates;  // -lambda * cell average of v_lambda
  std::vector<double> spreads;            // osc(-lambda v_lambda) diagnostics
  double h_bar = 0.0;                     // Richardson-extrapolated constant
  GridFunction corrector;                 // v_{lambda_min} - v_{lambda_min}(0)
  double residual = 0.0;
};

/// Discounted corrector equation, solved by damped fixed-point sweeps with
/// exact elimination of the constant mode (a constant shift of v moves the
/// residual by exactly lambda, so the mean is solved in closed form each
/// sweep). Converges to sup-residual <= 1e-9 or throws "cell iteration
/// stalled".
GridFunction solve_approx_corrector(const SystemSpec& spec,
                                    const CellProblemInstance& inst,
                                    double lambda, const SpaceGrid& cell_grid);

/// Ergodic constant via first-order Richardson extrapolation in lambda of
/// -lambda v_lambda, with the shrinking-spread ergodicity diagnostic.
CorrectorSolution effective_hamiltonian(
    const SystemSpec& spec, const CellProblemInstance& inst,
    const std::vector<double>& lambda_schedule, const SpaceGrid& cell_grid);

struct InvariantMeasure {
  Pt x{0.0, 0.0};
  GridFunction density;  // nonnegative, discrete mass 1
  double residual = 0.0; // sup change of the last adjoint power step
};

/// Stationary density of the frozen diffusion: (L^h)^T mu = 0 by power
/// iteration on I - tau (L^h)^T from mu == 1, mass-normalized.
InvariantMeasure invariant_measure(const SystemSpec& spec, int i, const Pt& x,
                                   const SpaceGrid& cell_grid);

struct EffectiveCoeffs {
  Pt x{0.0, 0.0};
  /// Per component: diagonal of the averaged diffusion.
  std::vector<std::array<double, 2>> a_bar;
  /// Per (i, th, z): measure-averaged lower-order coefficients, so that
  /// F_bar_i(x,r,p) = minmax { b_bar.p + l_bar + d_bar.r }.
  std::vector<std::array<double, 2>> b_bar;   // indexed like spec blocks
  std::vector<double> l_bar;
  std::vector<std::vector<double>> d_bar_row;

  double f_bar(const SystemSpec& spec, int i, const std::vector<double>& r,
               const Pt& p) const;
  double h_bar(const SystemSpec& spec, int i, const std::vector<double>& r,
               const Pt& p, const SymMat& X) const;
};

/// Invariant-measure path of the linear case: a_bar = int A dmu and the
/// averaged lower-order operator. Requires control-trivial diffusion.
EffectiveCoeffs effective_linear_coeffs(const SystemSpec& spec, const Pt& x,
                                        const SpaceGrid& cell_grid);

struct EffectivePropertiesReport {
  bool pass = true;
  int ellipticity_violations = 0;
  int quasi_monotonicity_violations = 0;
  double fitted_C1 = 0.0;       // Lipschitz constant in (r,p,X), reported
  double effective_nu = 0.0;    // smallest sampled a_bar eigenvalue
};

/// Sampled Lipschitz / ellipticity / quasi-monotonicity checks of the
/// effective operator (linear path), plus exhaustive sign patterns at m=2.
EffectivePropertiesReport check_effective_properties(const SystemSpec& spec,
                                                     int budget,
                                                     unsigned seed,
                                                     const SpaceGrid& cell_grid);

/// Memoized on-demand effective Hamiltonian for the general path. Keys are
/// (x,r,p,X) rounded to 1e-3; cache overflow throws
/// "effective evaluation budget exceeded".
class EffectiveHamiltonianCache {
 public:
  EffectiveHamiltonianCache(const SystemSpec& spec, SpaceGrid cell_grid,
                            std::vector<double> lambda_schedule,
                            size_t cap = size_t(1) << 22);

  double eval(int i, const Pt& x, const std::vector<double>& r, const Pt& p,
              const SymMat& X);
  size_t size() const { return cache_.size(); }

 private:
  const SystemSpec& spec_;
  SpaceGrid cell_grid_;
  std::vector<double> lambdas_;
  size_t cap_;
  std::unordered_map<std::string, double> cache_;
};

}  // namespace parlab
