#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parlab/trig.hpp"

namespace parlab {

/// Finite control grids standing in for the compact metric spaces Theta and Z.
struct ControlSet {
  std::vector<std::string> theta;
  std::vector<std::string> zeta;

  int n_theta() const { return static_cast<int>(theta.size()); }
  int n_zeta() const { return static_cast<int>(zeta.size()); }
};

enum class Form { control, general };

/// Coefficients of one (component, theta, zeta) triple. Diffusion is stored
/// as the diagonal of its square root a (A = a a^T diagonal), which is the
/// only shape the monotone 5-point stencil supports in 2D.
struct CoefficientBlock {
  std::array<CoefficientField, 2> a{CoefficientField::zero(),
                                    CoefficientField::zero()};
  std::array<CoefficientField, 2> b{CoefficientField::zero(),
                                    CoefficientField::zero()};
  CoefficientField l = CoefficientField::zero();
  std::vector<CoefficientField> d_row;  // size m, generator convention
  /// Extra -trace_coeff * tr(X) inside f; nonzero only for viscous
  /// general-form variants (f^2 = f - eps tr X).
  double trace_coeff = 0.0;
};

struct StructuralConstants {
  double C_a = 0.0;    // Lipschitz constant of a in x
  double C_f = 0.0;    // space-Hoelder constant of f
  double C_sup = 0.0;  // C^f = sup |f(t,x,0,0,0)|
  double nu = 0.0;     // ellipticity constant, 0 for degenerate scenarios
};

/// Immutable description of one weakly coupled system.
struct SystemSpec {
  std::string name;
  int m = 1;
  int dim = 1;
  Form form = Form::control;
  bool has_fast = false;
  ControlSet controls;
  /// Blocks indexed (i * n_theta + th) * n_zeta + z.
  std::vector<CoefficientBlock> blocks;
  double gamma = 0.0;
  double mu = 1.0;
  StructuralConstants constants;
  std::vector<CoefficientField> u0;

  const CoefficientBlock& block(int i, int th, int z) const {
    return blocks[static_cast<size_t>(
        (i * controls.n_theta() + th) * controls.n_zeta() + z)];
  }
  CoefficientBlock& block(int i, int th, int z) {
    return blocks[static_cast<size_t>(
        (i * controls.n_theta() + th) * controls.n_zeta() + z)];
  }

  /// Rigorous sup bounds over points and controls, used by the CFL rule.
  double a_sq_max() const;    // max over diag entries of sup A_kk
  double b_sum_max() const;   // max over (i,th,z) of sum_k sup |b_k|
  double d_diag_max() const;  // max over (i,th,z) of sup d_ii
};

struct CoefficientSample {
  std::array<double, 2> A{0.0, 0.0};  // diagonal of a a^T
  std::array<double, 2> a{0.0, 0.0};
  std::array<double, 2> b{0.0, 0.0};
  double l = 0.0;
  std::vector<double> d_row;
  double trace_coeff = 0.0;
};

/// Exact evaluation of one coefficient block. `y` must be supplied iff the
/// spec carries a fast variable.
CoefficientSample eval_coefficients(const SystemSpec& spec, int i, int th,
                                    int z, double t, const Pt& x,
                                    const std::optional<Pt>& y = std::nullopt);

/// Deterministic catalog. Throws std::invalid_argument("no such scenario")
/// for unknown keys.
SystemSpec build_catalog_scenario(const std::string& name);
std::vector<std::string> catalog_names();

struct QuasiMonotonicityReport {
  bool pass = true;
  double estimated_gamma = 0.0;
  std::string witness;  // empty when pass
};

struct EllipticityReport {
  bool pass = true;
  double estimated_nu = 0.0;
  bool degenerate = false;
};

struct ConstantsReport {
  bool pass = true;
  double sampled_C_a = 0.0;
  double sampled_C_f = 0.0;
  double sampled_C_sup = 0.0;
};

/// Samples (t,x,p,X,th,z) and ordered pairs (r,s) and checks (C4) with the
/// declared gamma. Deterministic given seed. At m<=2 also enumerates the
/// sign patterns of r-s exhaustively.
QuasiMonotonicityReport verify_quasi_monotonicity(const SystemSpec& spec,
                                                  int samples, unsigned seed);

/// Minimum sampled eigenvalue of A over points and controls versus declared nu.
EllipticityReport verify_ellipticity(const SystemSpec& spec, int samples,
                                     unsigned seed);

/// Sampled finite-difference estimates of C_a, C_f, C^f versus declared ones.
ConstantsReport verify_constants(const SystemSpec& spec, int samples,
                                 unsigned seed);

/// Structural validation run on every catalog entry at construction:
/// nonempty controls, zero row sums, PSD diffusion, finite constants.
void validate_spec(const SystemSpec& spec);

// Scenario config files (nested key/value JSON).
std::string spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const std::string& text);

}  // namespace parlab
