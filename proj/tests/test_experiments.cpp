#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "parlab/experiments.hpp"

using namespace parlab;

TEST_CASE("vanishing viscosity on an already-parabolic scenario is first order") {
  const SystemSpec spec = build_catalog_scenario("heat_1d");
  const SpaceGrid grid(1, 64);
  const ExperimentReport rep = vanishing_viscosity_study(
      spec, {0.1, 0.05, 0.025, 0.0125}, grid, 0.05);
  INFO("exponent ", rep.fit.exponent);
  CHECK(std::abs(rep.fit.exponent - 1.0) <= 0.2);
  CHECK(rep.pass);
  for (size_t k = 1; k < rep.rows.size(); ++k)
    CHECK(rep.rows[k].error < rep.rows[k - 1].error);
}

TEST_CASE("vanishing viscosity rejects non-decreasing lists") {
  const SystemSpec spec = build_catalog_scenario("heat_1d");
  CHECK_THROWS_WITH_AS(
      vanishing_viscosity_study(spec, {0.1, 0.1, 0.1}, SpaceGrid(1, 32), 0.01),
      "eps list not decreasing", std::invalid_argument);
  CHECK_THROWS_AS(
      vanishing_viscosity_study(spec, {0.1, 0.05}, SpaceGrid(1, 32), 0.01),
      std::invalid_argument);
}

TEST_CASE("perturbed specs are exact trig-family members") {
  const SystemSpec base = build_catalog_scenario("costonly_1d");
  const SystemSpec pl = perturb_spec(base, PerturbationKind::l, 0.2);
  const Pt x{0.3, 0.0};
  CHECK(eval_coefficients(pl, 0, 0, 0, 0.0, x).l ==
        doctest::Approx(eval_coefficients(base, 0, 0, 0, 0.0, x).l + 0.2));

  const SystemSpec heat = build_catalog_scenario("heat_1d");
  const SystemSpec pa = perturb_spec(heat, PerturbationKind::a, 0.5);
  CHECK(eval_coefficients(pa, 0, 0, 0, 0.0, x).A[0] == doctest::Approx(2.25));

  const SystemSpec sw = build_catalog_scenario("coupled_switch_2sys");
  const SystemSpec pd = perturb_spec(sw, PerturbationKind::d, 0.1);
  CHECK_NOTHROW(validate_spec(pd));  // scaling keeps the generator rows
  // Constant shifts of sqrt-form coefficients leave the trig family.
  SystemSpec sqrt_cost = build_catalog_scenario("hom_linear_1d");
  sqrt_cost.blocks[0].l = sqrt_cost.blocks[0].a[0];
  CHECK_THROWS_AS(perturb_spec(sqrt_cost, PerturbationKind::l, 0.1),
                  std::invalid_argument);
}

TEST_CASE("continuous dependence sweep: l-kind is exactly linear") {
  const SystemSpec spec = build_catalog_scenario("costonly_1d");
  const SpaceGrid grid(1, 128);
  const double T = 0.1;
  const ExperimentReport rep = continuous_dependence_sweep(
      spec, PerturbationKind::l, {0.1, 0.05, 0.025}, grid, T);
  CHECK(rep.pass);
  CHECK(std::abs(rep.fit.exponent - 1.0) <= 1e-10);
  for (const auto& row : rep.rows)
    CHECK(std::abs(row.error - row.param * T) <= 1e-12);
}

TEST_CASE("continuous dependence sweep: d- and b-kind scalings") {
  const SystemSpec sw = build_catalog_scenario("coupled_switch_2sys");
  const ExperimentReport rd = continuous_dependence_sweep(
      sw, PerturbationKind::d, {0.1, 0.05, 0.025}, SpaceGrid(1, 64), 0.1);
  INFO("d exponent ", rd.fit.exponent);
  CHECK(std::abs(rd.fit.exponent - 1.0) <= 0.15);
  CHECK(rd.pass);

  const SystemSpec isaacs = build_catalog_scenario("isaacs_1d");
  const ExperimentReport rb = continuous_dependence_sweep(
      isaacs, PerturbationKind::b, {0.1, 0.05, 0.025}, SpaceGrid(1, 64), 0.1);
  INFO("b exponent ", rb.fit.exponent);
  CHECK(std::abs(rb.fit.exponent - isaacs.mu) <= 0.15);
  CHECK(rb.pass);
}

TEST_CASE("effective solver reduces to the plain solver without oscillations") {
  const SystemSpec heat = build_catalog_scenario("heat_1d");
  const SpaceGrid grid(1, 64);
  const Trajectory plain = solve_parabolic(heat, grid, 0.05, {});
  const Trajectory eff =
      effective_problem_solver(heat, grid, 0.05, EffectivePath::measure,
                               SpaceGrid(1, 64));
  CHECK(difference_norms(plain.final_state(), eff.final_state()).sup <= 1e-12);
}

TEST_CASE("effective solver matches the effective heat kernel") {
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const SpaceGrid grid(1, 128);
  const double T = 0.02;
  const Trajectory eff = effective_problem_solver(
      hom, grid, T, EffectivePath::measure, SpaceGrid(1, 256));
  const double decay = std::exp(-std::sqrt(3.0) * 4.0 * M_PI * M_PI * T);
  double err = 0.0;
  for (int64_t j = 0; j < grid.size(); ++j)
    err = std::max(err, std::abs(eff.final_state().comp[0][size_t(j)] -
                                 decay * std::sin(2.0 * M_PI * grid.point(j)[0])));
  CHECK(err <= 5e-3);
}

TEST_CASE("measure-path and lambda-path effective solves agree") {
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const SpaceGrid grid(1, 64);
  const double T = 0.02;
  const SpaceGrid cell(1, 128);
  const Trajectory m =
      effective_problem_solver(hom, grid, T, EffectivePath::measure, cell);
  const Trajectory l =
      effective_problem_solver(hom, grid, T, EffectivePath::lambda, cell);
  CHECK(difference_norms(m.final_state(), l.final_state()).sup <= 2e-3);
}

TEST_CASE("general-path effective solve tracks the linear paths") {
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const SpaceGrid grid(1, 24);
  const double T = 0.005;
  const Trajectory m = effective_problem_solver(
      hom, grid, T, EffectivePath::measure, SpaceGrid(1, 64));
  const Trajectory g = effective_problem_solver(
      hom, grid, T, EffectivePath::general, SpaceGrid(1, 64));
  CHECK(difference_norms(m.final_state(), g.final_state()).sup <= 1e-2);
}

TEST_CASE("homogenization study: errors decrease and preconditions bite") {
  const SystemSpec hom = build_catalog_scenario("hom_linear_1d");
  const SpaceGrid grid(1, 256);
  const ExperimentReport rep = homogenization_study(
      hom, {1.0 / 4, 1.0 / 8, 1.0 / 16}, grid, 0.05, EffectivePath::measure,
      SpaceGrid(1, 128));
  CHECK(rep.pass);
  for (size_t k = 1; k < rep.rows.size(); ++k)
    CHECK(rep.rows[k].error < rep.rows[k - 1].error);

  CHECK_THROWS_WITH_AS(
      homogenization_study(hom, {1.0 / 2, 1.0 / 3, 1.0 / 4}, SpaceGrid(1, 128),
                           0.01, EffectivePath::measure, SpaceGrid(1, 64)),
      "eps/grid incommensurate", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      homogenization_study(hom, {1.0 / 2, 1.0 / 4, 1.0 / 16}, SpaceGrid(1, 128),
                           0.01, EffectivePath::measure, SpaceGrid(1, 64)),
      "under-resolved fast scale", std::invalid_argument);
}

TEST_CASE("experiment reports are deterministic CSV") {
  const SystemSpec spec = build_catalog_scenario("heat_1d");
  const SpaceGrid grid(1, 32);
  const ExperimentReport r1 =
      vanishing_viscosity_study(spec, {0.1, 0.05, 0.025}, grid, 0.01);
  const ExperimentReport r2 =
      vanishing_viscosity_study(spec, {0.1, 0.05, 0.025}, grid, 0.01);
  CHECK(r1.csv() == r2.csv());
  const std::string csv = r1.csv();
  CHECK(csv.rfind("study,scenario,param,error,fitted_exponent,residual,pass\n",
                  0) == 0);
  CHECK(csv.find("vanishing_viscosity,heat_1d,") != std::string::npos);
}
