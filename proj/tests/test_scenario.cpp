#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "parlab/scenario.hpp"

using namespace parlab;

TEST_CASE("catalog carries the required keys and validates on build") {
  const auto names = catalog_names();
  for (const char* key : {"heat_1d", "coupled_switch_2sys", "isaacs_1d",
                          "firstorder_2sys", "hom_linear_1d", "hom_linear_2d"})
    CHECK(std::find(names.begin(), names.end(), key) != names.end());
  for (const auto& name : names) {
    const SystemSpec spec = build_catalog_scenario(name);
    CHECK(spec.name == name);
    CHECK_NOTHROW(validate_spec(spec));
  }
  CHECK_THROWS_WITH_AS(build_catalog_scenario("nope"), "no such scenario: nope",
                       std::invalid_argument);
}

TEST_CASE("coefficient evaluation is exact for the trig catalog") {
  const SystemSpec heat = build_catalog_scenario("heat_1d");
  const CoefficientSample c = eval_coefficients(heat, 0, 0, 0, 0.3, Pt{0.4, 0.0});
  CHECK(c.A[0] == doctest::Approx(1.0));
  CHECK(c.b[0] == 0.0);
  CHECK(c.l == 0.0);

  const SystemSpec sw = build_catalog_scenario("coupled_switch_2sys");
  const double x = 0.21;
  const CoefficientSample c0 = eval_coefficients(sw, 0, 0, 0, 0.0, Pt{x, 0.0});
  const CoefficientSample c1 = eval_coefficients(sw, 1, 0, 0, 0.0, Pt{x, 0.0});
  CHECK(c0.l == doctest::Approx(std::cos(2.0 * M_PI * x)));
  CHECK(c1.l == doctest::Approx(std::sin(2.0 * M_PI * x)));
  CHECK(c0.d_row[0] == doctest::Approx(1.0));
  CHECK(c0.d_row[1] == doctest::Approx(-1.0));

  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const double y = 0.37;
  const CoefficientSample ch =
      eval_coefficients(hom, 0, 0, 0, 0.0, Pt{0.5, 0.0}, Pt{y, 0.0});
  CHECK(ch.A[0] == doctest::Approx(2.0 + std::sin(2.0 * M_PI * y)));
}

TEST_CASE("fast-variable arity is enforced") {
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const SystemSpec heat = build_catalog_scenario("heat_1d");
  CHECK(hom.has_fast);
  CHECK_FALSE(heat.has_fast);
  CHECK_THROWS_WITH_AS(eval_coefficients(hom, 0, 0, 0, 0.0, Pt{0.0, 0.0}),
                       "fast-variable arity mismatch", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      eval_coefficients(heat, 0, 0, 0, 0.0, Pt{0.0, 0.0}, Pt{0.1, 0.0}),
      "fast-variable arity mismatch", std::invalid_argument);
  CHECK_THROWS_AS(eval_coefficients(heat, 1, 0, 0, 0.0, Pt{0.0, 0.0}),
                  std::out_of_range);
}

TEST_CASE("structural sup bounds are rigorous") {
  const SystemSpec isaacs = build_catalog_scenario("isaacs_1d");
  CHECK(isaacs.a_sq_max() == doctest::Approx(0.25));
  CHECK(isaacs.b_sum_max() == doctest::Approx(0.5));
  CHECK(isaacs.d_diag_max() == doctest::Approx(0.0));
  const SystemSpec sw = build_catalog_scenario("coupled_switch_2sys");
  CHECK(sw.d_diag_max() == doctest::Approx(1.0));
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  CHECK(hom.a_sq_max() == doctest::Approx(3.0));
}

TEST_CASE("quasi-monotonicity verification passes the catalog") {
  for (const auto& name : catalog_names()) {
    const SystemSpec spec = build_catalog_scenario(name);
    const auto rep = verify_quasi_monotonicity(spec, 500, 0);
    INFO(name, " witness: ", rep.witness);
    CHECK(rep.pass);
    CHECK(rep.estimated_gamma >= spec.gamma - 1e-9);
  }
}

TEST_CASE("quasi-monotonicity verification finds planted violations") {
  // Anti-monotone coupling: positive off-diagonal, d_ii < 0. Built by hand
  // because validate_spec would reject it.
  SystemSpec bad = build_catalog_scenario("coupled_switch_2sys");
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      bad.block(i, 0, 0).d_row[size_t(j)] =
          CoefficientField::constant(i == j ? -1.0 : 1.0);
  const auto rep = verify_quasi_monotonicity(bad, 200, 0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.witness.empty());
  CHECK_THROWS_AS(validate_spec(bad), std::invalid_argument);
}

TEST_CASE("ellipticity verification") {
  const auto heat = verify_ellipticity(build_catalog_scenario("heat_1d"), 200, 0);
  CHECK(heat.pass);
  CHECK(heat.estimated_nu == doctest::Approx(1.0));
  CHECK_FALSE(heat.degenerate);
  const auto fo =
      verify_ellipticity(build_catalog_scenario("firstorder_2sys"), 200, 0);
  CHECK(fo.pass);
  CHECK(fo.degenerate);
  const auto hom =
      verify_ellipticity(build_catalog_scenario("hom_linear_1d"), 500, 0);
  CHECK(hom.pass);
  CHECK(hom.estimated_nu >= 1.0 - 1e-9);
}

TEST_CASE("declared structural constants dominate sampled ones") {
  for (const auto& name : catalog_names()) {
    const SystemSpec spec = build_catalog_scenario(name);
    const auto rep = verify_constants(spec, 500, 0);
    INFO(name, ": C_a ", rep.sampled_C_a, " C_f ", rep.sampled_C_f, " C_sup ",
         rep.sampled_C_sup);
    CHECK(rep.pass);
  }
}

TEST_CASE("scenario JSON round-trip is lossless") {
  for (const auto& name : catalog_names()) {
    const SystemSpec spec = build_catalog_scenario(name);
    const std::string text = spec_to_json(spec);
    const SystemSpec back = spec_from_json(text);
    CHECK(spec_to_json(back) == text);
    CHECK(back.m == spec.m);
    CHECK(back.has_fast == spec.has_fast);
    // Spot-check coefficient agreement at a few points.
    const std::optional<Pt> y =
        spec.has_fast ? std::optional<Pt>(Pt{0.313, 0.171}) : std::nullopt;
    for (int i = 0; i < spec.m; ++i) {
      const auto c1 = eval_coefficients(spec, i, 0, 0, 0.2, Pt{0.41, 0.09}, y);
      const auto c2 = eval_coefficients(back, i, 0, 0, 0.2, Pt{0.41, 0.09}, y);
      CHECK(c1.A[0] == c2.A[0]);
      CHECK(c1.l == c2.l);
      CHECK(c1.d_row == c2.d_row);
    }
  }
}

TEST_CASE("validate_spec rejects malformed systems") {
  SystemSpec s = build_catalog_scenario("heat_1d");
  s.mu = 0.0;
  CHECK_THROWS_AS(validate_spec(s), std::invalid_argument);
  s = build_catalog_scenario("heat_1d");
  s.u0.clear();
  CHECK_THROWS_AS(validate_spec(s), std::invalid_argument);
  s = build_catalog_scenario("coupled_switch_2sys");
  s.block(0, 0, 0).d_row[1] = CoefficientField::constant(0.0);  // row sum 1
  CHECK_THROWS_AS(validate_spec(s), std::invalid_argument);
}
