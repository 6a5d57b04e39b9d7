#include <gtest/gtest.h>

#include <cmath>

#include "mpmm/el_verify.hpp"

using namespace mpmm;

TEST(ElVerify, ZeroIsTrivialSolution) {
  RadialModel m(ProblemSpec::hardy_subcritical(2, 5, 0.0, NonlinearitySpec(1.0, 8.0 / 3.0), build_radial_grid(5, 10.0, 100)));
  EXPECT_EQ(el_residual(m, m.zero()), 0.0);
  EXPECT_EQ(multiplier_of(m, m.zero()), 0.0);
}

TEST(ElVerify, ToyCriticalSphere) {
  ToyModel m({2, 4});
  const double r = std::sqrt(0.5);
  EXPECT_LE(el_residual(m, {r, 0.0}), 1e-10);
  EXPECT_LE(el_residual(m, {r * std::cos(1.0), r * std::sin(1.0)}), 1e-10);
  EXPECT_GT(el_residual(m, {1.0, 0.0}), 0.1);
}

TEST(ElVerify, ToyMultipliers) {
  ToyModel m({2, 4});
  EXPECT_NEAR(multiplier_of(m, {1.0, 0.0}), 0.5, 1e-15);
  EXPECT_NEAR(multiplier_of(m, {std::sqrt(0.5), 0.0}), 1.0, 1e-15);
}

TEST(ElVerify, ToyUnitMultiplierLevel) {
  ToyModel m({2, 4});
  auto spec = ProblemSpec::toy({2, 4});
  ScaleOptions o;
  o.minimize = MinimizeOptions::toy_defaults();
  auto r = minimize_on_level(m, 1.0, m.seed(), o.minimize);
  auto s = pick_solution_scale(m, spec, r.minimizer, r.i_value, o);
  EXPECT_NEAR(s.lambda_unit_multiplier, 0.25, 1e-8);
  EXPECT_NEAR(s.lambda_on_path, 0.25, 1e-10);
  EXPECT_NEAR(s.theta, 1.0, 1e-8);
  EXPECT_LE(s.residual, 10 * o.minimize.grad_tol);
}

TEST(ElVerify, ThetaMonotoneAlongScalingPath) {
  RadialModel m(ProblemSpec::hardy_subcritical(2, 5, 0.0, NonlinearitySpec(1.0, 8.0 / 3.0), build_radial_grid(5, 20.0, 200)));
  auto r = minimize_on_level(m, 1.0, m.seed());
  ASSERT_TRUE(r.converged);
  double prev = 1e300;
  for (double l : log_space(1.0, 1e4, 12)) {
    const double theta = multiplier_of(m, scaling_path(m, r.minimizer, l));
    EXPECT_LT(theta, prev) << l;
    prev = theta;
  }
}

TEST(ElVerify, HardyUnitMultiplierNearDerivedArgmax) {
  auto spec = ProblemSpec::hardy_subcritical(2, 5, 0.0, NonlinearitySpec(1.0, 8.0 / 3.0), build_radial_grid(5, 30.0, 400));
  RadialModel m(spec);
  ScaleOptions o;
  auto r = minimize_on_level(m, 1.0, m.seed(), o.minimize);
  ASSERT_TRUE(r.converged);
  auto s = pick_solution_scale(m, spec, r.minimizer, r.i_value, o);
  EXPECT_NEAR(s.lambda_unit_multiplier / closed_form_lambda_bar(spec, r.i_value).derived_argmax, 1.0, 0.02);
  EXPECT_LE(s.residual, 10 * o.minimize.grad_tol);
  EXPECT_NEAR(s.theta, 1.0, 1e-6);
}

TEST(ElVerify, CriticalResidualFavoursAmplitudeExponentOneOverPStar) {
  auto spec = ProblemSpec::critical_bounded(2, 5, 0.3 * 20.19, build_radial_grid(5, 1.0, 200));
  RadialModel m(spec);
  ScaleOptions o;
  auto r = minimize_on_level(m, 1.0, m.seed(), o.minimize);
  ASSERT_TRUE(r.converged);
  auto s = pick_solution_scale(m, spec, r.minimizer, r.i_value, o);
  EXPECT_LE(s.residual, 10 * o.minimize.grad_tol);
  double one_over = -1, p_over = -1;
  for (const auto& c : s.candidates) {
    if (c.label == "amplitude_lambda_bar^(1/p*)") one_over = c.residual;
    if (c.label == "amplitude_lambda_bar^(p/p*)") p_over = c.residual;
  }
  ASSERT_GE(one_over, 0);
  ASSERT_GE(p_over, 0);
  EXPECT_LT(one_over, p_over);
}
