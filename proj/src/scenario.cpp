#include "parlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parlab/operator.hpp"

namespace parlab {

namespace {

using json = nlohmann::json;

CoefficientField trig_field(double offset,
                            std::vector<TrigTerm> terms,
                            bool take_sqrt = false) {
  CoefficientField f;
  f.poly.offset = offset;
  f.poly.terms = std::move(terms);
  f.take_sqrt = take_sqrt;
  return f;
}

TrigTerm mode_x(double amp, int kx, bool use_sin = true, int kx2 = 0) {
  TrigTerm t;
  t.amplitude = amp;
  t.freq_x = {kx, kx2};
  t.use_sin = use_sin;
  return t;
}

TrigTerm mode_y(double amp, int ky, bool use_sin = true, int ky2 = 0) {
  TrigTerm t;
  t.amplitude = amp;
  t.freq_y = {ky, ky2};
  t.use_sin = use_sin;
  return t;
}

SystemSpec blank_spec(const std::string& name, int m, int dim, int nth, int nz) {
  SystemSpec s;
  s.name = name;
  s.m = m;
  s.dim = dim;
  for (int k = 0; k < nth; ++k) s.controls.theta.push_back(std::to_string(k));
  for (int k = 0; k < nz; ++k) s.controls.zeta.push_back(std::to_string(k));
  CoefficientBlock blk;
  blk.d_row.assign(size_t(m), CoefficientField::zero());
  s.blocks.assign(size_t(m * nth * nz), blk);
  s.u0.assign(size_t(m), CoefficientField::zero());
  return s;
}

void set_generator_coupling_2(SystemSpec& s, double rate) {
  // d = [[rate, -rate], [-rate, rate]]: zero row sums, nonpositive off-diagonal.
  for (int th = 0; th < s.controls.n_theta(); ++th)
    for (int z = 0; z < s.controls.n_zeta(); ++z) {
      s.block(0, th, z).d_row[0] = CoefficientField::constant(rate);
      s.block(0, th, z).d_row[1] = CoefficientField::constant(-rate);
      s.block(1, th, z).d_row[0] = CoefficientField::constant(-rate);
      s.block(1, th, z).d_row[1] = CoefficientField::constant(rate);
    }
}

void finalize(SystemSpec& s) {
  s.has_fast = false;
  for (const auto& blk : s.blocks) {
    for (const auto& f : blk.a)
      if (f.depends_on_fast()) s.has_fast = true;
    for (const auto& f : blk.b)
      if (f.depends_on_fast()) s.has_fast = true;
    if (blk.l.depends_on_fast()) s.has_fast = true;
    for (const auto& f : blk.d_row)
      if (f.depends_on_fast()) s.has_fast = true;
  }
  validate_spec(s);
}

SystemSpec make_heat_1d() {
  SystemSpec s = blank_spec("heat_1d", 1, 1, 1, 1);
  s.block(0, 0, 0).a[0] = CoefficientField::constant(1.0);
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 0.0, 0.0, 1.0};
  finalize(s);
  return s;
}

SystemSpec make_coupled_switch_2sys() {
  SystemSpec s = blank_spec("coupled_switch_2sys", 2, 1, 1, 1);
  for (int i = 0; i < 2; ++i) s.block(i, 0, 0).a[0] = CoefficientField::constant(1.0);
  s.block(0, 0, 0).l = trig_field(0.0, {mode_x(1.0, 1, false)});  // cos(2 pi x)
  s.block(1, 0, 0).l = trig_field(0.0, {mode_x(1.0, 1, true)});   // sin(2 pi x)
  set_generator_coupling_2(s, 1.0);
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.u0[1] = trig_field(0.0, {mode_x(1.0, 1, false)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 2.0 * M_PI, 1.0, 1.0};
  finalize(s);
  return s;
}

SystemSpec make_isaacs_1d() {
  SystemSpec s = blank_spec("isaacs_1d", 1, 1, 2, 2);
  for (int th = 0; th < 2; ++th)
    for (int z = 0; z < 2; ++z) {
      auto& blk = s.block(0, th, z);
      blk.a[0] = CoefficientField::constant(0.5);  // A = 0.25
      blk.b[0] = CoefficientField::constant(0.5 * (2 * th - 1));
      blk.l = trig_field(0.0, {mode_x(0.3 * (2 * z - 1), 1, true),
                               mode_x(0.2 * (2 * th - 1), 1, false)});
    }
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, M_PI, 0.5, 0.25};
  finalize(s);
  return s;
}

SystemSpec make_firstorder_2sys() {
  // Degenerate min-max transport pair: the theta player flips the drift
  // sign, producing |Du|-type Hamiltonians with kinks.
  SystemSpec s = blank_spec("firstorder_2sys", 2, 1, 2, 1);
  for (int i = 0; i < 2; ++i)
    for (int th = 0; th < 2; ++th) {
      auto& blk = s.block(i, th, 0);
      blk.b[0] = CoefficientField::constant(1.0 * (2 * th - 1));
      blk.l = trig_field(0.0, {mode_x(0.5, 1, i == 0)});
    }
  set_generator_coupling_2(s, 1.0);
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.u0[1] = trig_field(0.0, {mode_x(1.0, 1, false)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, M_PI, 0.5, 0.0};
  finalize(s);
  return s;
}

SystemSpec make_costonly_1d() {
  // Pure running-cost scalar: u(t) = u0 - t l(x) exactly on the grid.
  SystemSpec s = blank_spec("costonly_1d", 1, 1, 1, 1);
  s.block(0, 0, 0).l = trig_field(0.0, {mode_x(0.3, 1, false)});
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 0.6 * M_PI, 0.3, 0.0};
  finalize(s);
  return s;
}

SystemSpec make_hom_linear_1d() {
  SystemSpec s = blank_spec("hom_linear_1d", 1, 1, 1, 1);
  s.block(0, 0, 0).a[0] = trig_field(2.0, {mode_y(1.0, 1)}, /*sqrt=*/true);
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 0.0, 0.0, 1.0};
  finalize(s);
  return s;
}

SystemSpec make_hom_linear_2d() {
  SystemSpec s = blank_spec("hom_linear_2d", 1, 2, 1, 1);
  auto& blk = s.block(0, 0, 0);
  blk.a[0] = trig_field(2.0, {mode_y(1.0, 1, true)}, true);          // 2+sin(2 pi y1)
  blk.a[1] = trig_field(2.0, {mode_y(1.0, 0, false, 1)}, true);      // 2+cos(2 pi y2)
  TrigTerm t;
  t.amplitude = 1.0;
  t.freq_x = {1, 1};
  t.use_sin = true;
  s.u0[0] = trig_field(0.0, {t});  // sin(2 pi (x1 + x2))
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 0.0, 0.0, 1.0};
  finalize(s);
  return s;
}

SystemSpec make_hom_coupled_2sys() {
  // Linear generator-coupled homogenization pair sharing one oscillatory
  // diffusion; lower-order part carries slow/fast running costs.
  SystemSpec s = blank_spec("hom_coupled_2sys", 2, 1, 1, 1);
  for (int i = 0; i < 2; ++i) {
    auto& blk = s.block(i, 0, 0);
    blk.a[0] = trig_field(2.0, {mode_y(1.0, 1)}, true);
    blk.l = trig_field(0.0, {mode_x(0.4, 1, i == 0), mode_y(0.2, 1, false)});
  }
  set_generator_coupling_2(s, 1.0);
  s.u0[0] = trig_field(0.0, {mode_x(1.0, 1)});
  s.u0[1] = trig_field(0.0, {mode_x(1.0, 1, false)});
  s.gamma = 0.0;
  s.mu = 1.0;
  s.constants = {0.0, 0.8 * M_PI, 0.6, 1.0};
  finalize(s);
  return s;
}

double eval_f_control(const SystemSpec& spec, const CoefficientSample& c,
                      const std::vector<double>& r, const Pt& p,
                      const SymMat& X) {
  double v = c.l;
  for (int k = 0; k < spec.dim; ++k) v += c.b[size_t(k)] * p[size_t(k)];
  for (size_t j = 0; j < r.size(); ++j) v += c.d_row[j] * r[j];
  v -= c.trace_coeff * X.trace(spec.dim);
  return v;
}

}  // namespace

double SystemSpec::a_sq_max() const {
  double m = 0.0;
  for (const auto& blk : blocks)
    for (int k = 0; k < dim; ++k) {
      const double ab = blk.a[size_t(k)].sup_bound();
      m = std::max(m, ab * ab + blk.trace_coeff);
    }
  return m;
}

double SystemSpec::b_sum_max() const {
  double m = 0.0;
  for (const auto& blk : blocks) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += blk.b[size_t(k)].sup_bound();
    m = std::max(m, s);
  }
  return m;
}

double SystemSpec::d_diag_max() const {
  double m = 0.0;
  const int nth = controls.n_theta(), nz = controls.n_zeta();
  for (int i = 0; i < this->m; ++i)
    for (int th = 0; th < nth; ++th)
      for (int z = 0; z < nz; ++z)
        m = std::max(m, block(i, th, z).d_row[size_t(i)].sup_bound());
  return m;
}

CoefficientSample eval_coefficients(const SystemSpec& spec, int i, int th,
                                    int z, double t, const Pt& x,
                                    const std::optional<Pt>& y) {
  if (i < 0 || i >= spec.m || th < 0 || th >= spec.controls.n_theta() ||
      z < 0 || z >= spec.controls.n_zeta())
    throw std::out_of_range("eval_coefficients: index out of range");
  if (spec.has_fast != y.has_value())
    throw std::invalid_argument("fast-variable arity mismatch");
  const Pt yy = y.value_or(Pt{0.0, 0.0});
  const CoefficientBlock& blk = spec.block(i, th, z);
  CoefficientSample c;
  for (int k = 0; k < spec.dim; ++k) {
    c.a[size_t(k)] = blk.a[size_t(k)].eval(t, x, yy);
    c.A[size_t(k)] = c.a[size_t(k)] * c.a[size_t(k)];
    c.b[size_t(k)] = blk.b[size_t(k)].eval(t, x, yy);
  }
  c.l = blk.l.eval(t, x, yy);
  c.d_row.resize(size_t(spec.m));
  for (int j = 0; j < spec.m; ++j)
    c.d_row[size_t(j)] = blk.d_row[size_t(j)].eval(t, x, yy);
  c.trace_coeff = blk.trace_coeff;
  return c;
}

SystemSpec build_catalog_scenario(const std::string& name) {
  if (name == "heat_1d") return make_heat_1d();
  if (name == "coupled_switch_2sys") return make_coupled_switch_2sys();
  if (name == "isaacs_1d") return make_isaacs_1d();
  if (name == "firstorder_2sys") return make_firstorder_2sys();
  if (name == "costonly_1d") return make_costonly_1d();
  if (name == "hom_linear_1d") return make_hom_linear_1d();
  if (name == "hom_linear_2d") return make_hom_linear_2d();
  if (name == "hom_coupled_2sys") return make_hom_coupled_2sys();
  throw std::invalid_argument("no such scenario: " + name);
}

std::vector<std::string> catalog_names() {
  return {"heat_1d",      "coupled_switch_2sys", "isaacs_1d",
          "firstorder_2sys", "costonly_1d",      "hom_linear_1d",
          "hom_linear_2d", "hom_coupled_2sys"};
}

void validate_spec(const SystemSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("spec: m >= 1 required");
  if (spec.dim != 1 && spec.dim != 2)
    throw std::invalid_argument("spec: dim must be 1 or 2");
  if (spec.controls.n_theta() < 1 || spec.controls.n_zeta() < 1)
    throw std::invalid_argument("spec: control sets must be nonempty");
  if (!(spec.mu > 0.0 && spec.mu <= 1.0))
    throw std::invalid_argument("spec: mu in (0,1] required");
  if (!std::isfinite(spec.constants.C_sup))
    throw std::invalid_argument("spec: C^f must be finite");
  if (spec.blocks.size() !=
      size_t(spec.m * spec.controls.n_theta() * spec.controls.n_zeta()))
    throw std::invalid_argument("spec: block table size mismatch");
  if (spec.u0.size() != size_t(spec.m))
    throw std::invalid_argument("spec: u0 component count mismatch");
  // Generator convention: row sums vanish, off-diagonal nonpositive
  // (checked at a deterministic point sample; coupling rows in the catalog
  // are constants so this is exhaustive there).
  const Pt x{0.37, 0.11}, y{0.29, 0.73};
  for (int i = 0; i < spec.m; ++i)
    for (int th = 0; th < spec.controls.n_theta(); ++th)
      for (int z = 0; z < spec.controls.n_zeta(); ++z) {
        const auto& blk = spec.block(i, th, z);
        if (blk.d_row.size() != size_t(spec.m))
          throw std::invalid_argument("spec: coupling row size mismatch");
        double row = 0.0;
        for (int j = 0; j < spec.m; ++j) {
          const double dij = blk.d_row[size_t(j)].eval(0.1, x, y);
          row += dij;
          if (j != i && dij > 1e-12)
            throw std::invalid_argument("spec: positive off-diagonal coupling");
        }
        if (std::abs(row) > 1e-12)
          throw std::invalid_argument("spec: coupling row sum nonzero");
      }
}

QuasiMonotonicityReport verify_quasi_monotonicity(const SystemSpec& spec,
                                                  int samples, unsigned seed) {
  if (samples < 1) throw std::invalid_argument("budget >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  QuasiMonotonicityReport rep;
  rep.estimated_gamma = 1e300;
  const double tol = 1e-10;

  auto check_pair = [&](double t, const Pt& x, const Pt& p, const SymMat& X,
                        const std::vector<double>& r,
                        const std::vector<double>& s, int j) {
    const std::optional<Pt> y =
        spec.has_fast ? std::optional<Pt>(Pt{unit(rng), unit(rng)})
                      : std::nullopt;
    const double gap = r[size_t(j)] - s[size_t(j)];
    for (int th = 0; th < spec.controls.n_theta(); ++th)
      for (int z = 0; z < spec.controls.n_zeta(); ++z) {
        const CoefficientSample c = eval_coefficients(spec, j, th, z, t, x, y);
        const double diff =
            eval_f_control(spec, c, r, p, X) - eval_f_control(spec, c, s, p, X);
        if (gap > tol) rep.estimated_gamma = std::min(rep.estimated_gamma, diff / gap);
        if (diff < spec.gamma * gap - tol) {
          rep.pass = false;
          if (rep.witness.empty()) {
            std::ostringstream os;
            os << "component " << j << " r-s gap " << gap << " f-diff " << diff;
            rep.witness = os.str();
          }
        }
      }
  };

  // Exhaustive sign patterns of r - s at m <= 2.
  if (spec.m <= 2) {
    std::vector<std::vector<double>> gaps;
    if (spec.m == 1) gaps = {{0.5}, {1.0}};
    else gaps = {{1.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}, {0.5, 0.0}, {2.0, 1.0}};
    for (const auto& gvec : gaps) {
      std::vector<double> s0(size_t(spec.m), -0.25), r0 = s0;
      for (int j = 0; j < spec.m; ++j) r0[size_t(j)] += gvec[size_t(j)];
      int jmax = 0;
      for (int j = 1; j < spec.m; ++j)
        if (gvec[size_t(j)] > gvec[size_t(jmax)]) jmax = j;
      check_pair(0.2, Pt{0.3, 0.6}, Pt{0.1, -0.4}, SymMat{0.5, 0.0, -0.2}, r0,
                 s0, jmax);
    }
  }

  for (int k = 0; k < samples; ++k) {
    const double t = unit(rng);
    const Pt x{unit(rng), unit(rng)};
    const Pt p{2.0 * sym(rng), 2.0 * sym(rng)};
    const SymMat X{2.0 * sym(rng), sym(rng), 2.0 * sym(rng)};
    std::vector<double> s(size_t(spec.m)), r(size_t(spec.m));
    for (auto& v : s) v = sym(rng);
    int j = 0;
    double gmax = -1.0;
    for (int q = 0; q < spec.m; ++q) {
      const double g = unit(rng);
      r[size_t(q)] = s[size_t(q)] + g;
      if (g > gmax) {
        gmax = g;
        j = q;
      }
    }
    // Enforce the max at j exactly.
    r[size_t(j)] = s[size_t(j)] + gmax;
    check_pair(t, x, p, X, r, s, j);
  }
  if (rep.estimated_gamma > 1e299) rep.estimated_gamma = 0.0;
  return rep;
}

EllipticityReport verify_ellipticity(const SystemSpec& spec, int samples,
                                     unsigned seed) {
  if (samples < 1) throw std::invalid_argument("budget >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EllipticityReport rep;
  double min_eig = 1e300;
  for (int k = 0; k < samples; ++k) {
    const double t = unit(rng);
    const Pt x{unit(rng), unit(rng)};
    const std::optional<Pt> y =
        spec.has_fast ? std::optional<Pt>(Pt{unit(rng), unit(rng)})
                      : std::nullopt;
    for (int i = 0; i < spec.m; ++i)
      for (int th = 0; th < spec.controls.n_theta(); ++th)
        for (int z = 0; z < spec.controls.n_zeta(); ++z) {
          const CoefficientSample c = eval_coefficients(spec, i, th, z, t, x, y);
          for (int kk = 0; kk < spec.dim; ++kk)
            min_eig = std::min(min_eig, c.A[size_t(kk)]);
        }
  }
  rep.estimated_nu = min_eig;
  rep.degenerate = min_eig <= 1e-12;
  rep.pass = min_eig >= spec.constants.nu - 1e-9;
  return rep;
}

ConstantsReport verify_constants(const SystemSpec& spec, int samples,
                                 unsigned seed) {
  if (samples < 1) throw std::invalid_argument("budget >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConstantsReport rep;
  const std::vector<double> r0(size_t(spec.m), 0.0);
  for (int k = 0; k < samples; ++k) {
    const double t = unit(rng);
    const Pt x{unit(rng), unit(rng)};
    const Pt xx{unit(rng), unit(rng)};
    const std::optional<Pt> y =
        spec.has_fast ? std::optional<Pt>(Pt{unit(rng), unit(rng)})
                      : std::nullopt;
    const double dist = torus_dist(x, xx, spec.dim);
    for (int i = 0; i < spec.m; ++i)
      for (int th = 0; th < spec.controls.n_theta(); ++th)
        for (int z = 0; z < spec.controls.n_zeta(); ++z) {
          const CoefficientSample c1 = eval_coefficients(spec, i, th, z, t, x, y);
          const CoefficientSample c2 = eval_coefficients(spec, i, th, z, t, xx, y);
          rep.sampled_C_sup = std::max(
              rep.sampled_C_sup,
              std::abs(eval_f_control(spec, c1, r0, Pt{0, 0}, SymMat{})));
          if (dist > 1e-8) {
            double da = 0.0, df = 0.0;
            for (int kk = 0; kk < spec.dim; ++kk) {
              da += std::pow(c1.a[size_t(kk)] - c2.a[size_t(kk)], 2);
              // |p| = 0 part of (C5): the f-difference at p = 0.
            }
            df = std::abs(eval_f_control(spec, c1, r0, Pt{0, 0}, SymMat{}) -
                          eval_f_control(spec, c2, r0, Pt{0, 0}, SymMat{}));
            rep.sampled_C_a = std::max(rep.sampled_C_a, std::sqrt(da) / dist);
            rep.sampled_C_f =
                std::max(rep.sampled_C_f, df / std::pow(dist, spec.mu));
          }
        }
  }
  rep.pass = rep.sampled_C_a <= spec.constants.C_a + 1e-9 &&
             rep.sampled_C_f <= spec.constants.C_f + 1e-9 &&
             rep.sampled_C_sup <= spec.constants.C_sup + 1e-9;
  return rep;
}

// ---------------------------------------------------------------------------
// Scenario config files.

namespace {

json field_to_json(const CoefficientField& f) {
  json j;
  j["offset"] = f.poly.offset;
  j["sqrt"] = f.take_sqrt;
  j["scale"] = f.scale;
  j["terms"] = json::array();
  for (const auto& t : f.poly.terms) {
    json jt;
    jt["amp"] = t.amplitude;
    jt["kt"] = t.freq_t;
    jt["kx"] = {t.freq_x[0], t.freq_x[1]};
    jt["ky"] = {t.freq_y[0], t.freq_y[1]};
    jt["sin"] = t.use_sin;
    j["terms"].push_back(jt);
  }
  return j;
}

CoefficientField field_from_json(const json& j) {
  CoefficientField f;
  f.poly.offset = j.at("offset").get<double>();
  f.take_sqrt = j.at("sqrt").get<bool>();
  f.scale = j.at("scale").get<double>();
  for (const auto& jt : j.at("terms")) {
    TrigTerm t;
    t.amplitude = jt.at("amp").get<double>();
    t.freq_t = jt.at("kt").get<int>();
    t.freq_x = {jt.at("kx")[0].get<int>(), jt.at("kx")[1].get<int>()};
    t.freq_y = {jt.at("ky")[0].get<int>(), jt.at("ky")[1].get<int>()};
    t.use_sin = jt.at("sin").get<bool>();
    f.poly.terms.push_back(t);
  }
  return f;
}

}  // namespace

std::string spec_to_json(const SystemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["m"] = spec.m;
  j["dim"] = spec.dim;
  j["form"] = spec.form == Form::control ? "control_form" : "general_form";
  j["controls"] = {{"theta", spec.controls.theta}, {"zeta", spec.controls.zeta}};
  j["gamma"] = spec.gamma;
  j["mu"] = spec.mu;
  j["constants"] = {{"C_a", spec.constants.C_a},
                    {"C_f", spec.constants.C_f},
                    {"C_sup", spec.constants.C_sup},
                    {"nu", spec.constants.nu}};
  j["coefficients"] = json::array();
  for (int i = 0; i < spec.m; ++i)
    for (int th = 0; th < spec.controls.n_theta(); ++th)
      for (int z = 0; z < spec.controls.n_zeta(); ++z) {
        const auto& blk = spec.block(i, th, z);
        json jb;
        jb["i"] = i;
        jb["theta"] = th;
        jb["zeta"] = z;
        jb["a"] = json::array();
        jb["b"] = json::array();
        for (int k = 0; k < spec.dim; ++k) {
          jb["a"].push_back(field_to_json(blk.a[size_t(k)]));
          jb["b"].push_back(field_to_json(blk.b[size_t(k)]));
        }
        jb["l"] = field_to_json(blk.l);
        jb["d"] = json::array();
        for (int q = 0; q < spec.m; ++q)
          jb["d"].push_back(field_to_json(blk.d_row[size_t(q)]));
        jb["trace_coeff"] = blk.trace_coeff;
        j["coefficients"].push_back(jb);
      }
  j["u0"] = json::array();
  for (const auto& f : spec.u0) j["u0"].push_back(field_to_json(f));
  return j.dump(2) + "\n";
}

SystemSpec spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  SystemSpec s;
  s.name = j.at("name").get<std::string>();
  s.m = j.at("m").get<int>();
  s.dim = j.at("dim").get<int>();
  s.form = j.at("form").get<std::string>() == "general_form" ? Form::general
                                                             : Form::control;
  s.controls.theta = j.at("controls").at("theta").get<std::vector<std::string>>();
  s.controls.zeta = j.at("controls").at("zeta").get<std::vector<std::string>>();
  s.gamma = j.at("gamma").get<double>();
  s.mu = j.at("mu").get<double>();
  s.constants.C_a = j.at("constants").at("C_a").get<double>();
  s.constants.C_f = j.at("constants").at("C_f").get<double>();
  s.constants.C_sup = j.at("constants").at("C_sup").get<double>();
  s.constants.nu = j.at("constants").at("nu").get<double>();
  CoefficientBlock blank;
  blank.d_row.assign(size_t(s.m), CoefficientField::zero());
  s.blocks.assign(size_t(s.m * s.controls.n_theta() * s.controls.n_zeta()),
                  blank);
  for (const auto& jb : j.at("coefficients")) {
    auto& blk = s.block(jb.at("i").get<int>(), jb.at("theta").get<int>(),
                        jb.at("zeta").get<int>());
    for (int k = 0; k < s.dim; ++k) {
      blk.a[size_t(k)] = field_from_json(jb.at("a")[size_t(k)]);
      blk.b[size_t(k)] = field_from_json(jb.at("b")[size_t(k)]);
    }
    blk.l = field_from_json(jb.at("l"));
    for (int q = 0; q < s.m; ++q)
      blk.d_row[size_t(q)] = field_from_json(jb.at("d")[size_t(q)]);
    blk.trace_coeff = jb.at("trace_coeff").get<double>();
  }
  for (const auto& jf : j.at("u0")) s.u0.push_back(field_from_json(jf));
  s.has_fast = false;
  for (const auto& blk : s.blocks) {
    for (const auto& f : blk.a)
      if (f.depends_on_fast()) s.has_fast = true;
    for (const auto& f : blk.b)
      if (f.depends_on_fast()) s.has_fast = true;
    if (blk.l.depends_on_fast()) s.has_fast = true;
    for (const auto& f : blk.d_row)
      if (f.depends_on_fast()) s.has_fast = true;
  }
  validate_spec(s);
  return s;
}

}  // namespace parlab
