#pragma once

#include <string>
#include <vector>

#include "parlab/solver.hpp"

namespace parlab {

/// Sampled parameter boxes of the doubling argument: pair-distance bound,
/// r-box, X-bound and the pinned gradient p = alpha (x-y) e^{(gbar-g) tau}.
struct CDEWitnessSets {
  double alpha = 1.0;
  double gamma_bar = 0.0;
  double gamma = 0.0;       // min of the two specs' constants
  double R = 0.0;           // max(||u1||, ||u2||) over the horizon
  double pair_dist = 0.0;   // 2 R^{1/2} / sqrt(alpha)
  double r_box = 0.0;       // |r|_inf bound at time t

  double x_bound(double tau, int n) const {
    return 3.0 * alpha * n * std::exp((gamma_bar - gamma) * tau);
  }
  Pt pinned_p(const Pt& x, const Pt& y, double tau, int dim) const;

  static CDEWitnessSets build(const Trajectory& u1, const Trajectory& u2,
                              double gamma1, double gamma2, double alpha,
                              double gamma_bar, double t);
};

struct BoundReport {
  std::string check;
  double t = 0.0;
  double observed = 0.0;
  double rhs = 0.0;
  double fitted_K = 0.0;
  double slack = 0.0;  // declared discretization slack (10 h)
  bool pass = false;   // observed <= rhs + slack

  std::string csv_row() const;
  static std::string csv_header();
};

/// General continuous dependence estimate: left-hand side from the stored
/// trajectories, right-hand side = initial-data term plus t * (sampled sup
/// over the witness box)^+. The f- and a-differences are evaluated exactly
/// from the trig representations; the sup combines node-pair enumeration,
/// exact maximization over the (affine) r and X coordinates, and a
/// deterministic low-discrepancy sweep of the continuous coordinates.
BoundReport cde_rhs_general(const SystemSpec& spec1, const SystemSpec& spec2,
                            const Trajectory& u1, const Trajectory& u2,
                            double alpha, double gamma_bar, double t,
                            int budget, unsigned seed);

/// Control-form estimate: reports e^{gt}||u1(t)-u2(t)|| against
/// ||u01-u02|| + K t S1 + K t^{mu/2} S2 and returns the smallest admissible K.
BoundReport cde_rhs_control(const SystemSpec& spec1, const SystemSpec& spec2,
                            const Trajectory& u1, const Trajectory& u2,
                            double t, double mu);

/// L-infinity bound: observed sup norm against e^{-gt}||u0|| + t e^{gt} C^f.
BoundReport linfty_bound(const Trajectory& u, const SystemSpec& spec, double t);

/// Hoelder bound with gbar = 2(C_f + 3 C_a^2 + 1) + gamma^+; returns the
/// smallest admissible K as fitted_K.
BoundReport holder_bound(const Trajectory& u, const SystemSpec& spec, double t);

struct RateFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // max absolute log deviation
};

/// Least-squares slope of log(error) vs log(param).
RateFit fit_rate(const std::vector<double>& errors,
                 const std::vector<double>& params);

}  // namespace parlab
