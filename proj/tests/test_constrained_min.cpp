#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpmm/constrained_min.hpp"
#include "mpmm/level_curve.hpp"
#include "mpmm/models.hpp"

using namespace mpmm;

namespace {

RadialModel hardy_model(double mu_fraction = 0.0) {
  return RadialModel(ProblemSpec::hardy_subcritical(2, 5, mu_fraction * hardy_constant(2, 5),
                                                    NonlinearitySpec(1.0, 8.0 / 3.0), build_radial_grid(5, 20.0, 200)));
}

RadialModel critical_model() {
  return RadialModel(ProblemSpec::critical_bounded(2, 5, 0.3 * 20.19, build_radial_grid(5, 1.0, 200)));
}

std::vector<double> i_values(const std::vector<SweepEntry<GridFunction>>& sweep) {
  std::vector<double> out;
  for (const auto& e : sweep) out.push_back(e.result.i_value);
  return out;
}

}  // namespace

TEST(ConstrainedMin, ToyUnitLevel) {
  ToyModel m({2, 4});
  auto r = minimize_on_level(m, 1.0, {0.3, 0.9}, MinimizeOptions::toy_defaults());
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.i_value, 1.0, 1e-8);
  EXPECT_NEAR(std::sqrt(m.T(r.minimizer)), 1.0, 1e-8);
  EXPECT_NEAR(r.multiplier, 0.5, 1e-8);
}

TEST(ConstrainedMin, ToySweepMatchesClosedForm) {
  ToyModel m({2, 4});
  SweepOptions so;
  so.minimize = MinimizeOptions::toy_defaults();
  const auto lambdas = log_space(0.1, 2.0, 20);
  auto sweep = continuation_sweep(m, lambdas, so);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    ASSERT_TRUE(sweep[k].error.empty());
    EXPECT_NEAR(sweep[k].result.i_value, std::sqrt(lambdas[k]), 1e-8);
    EXPECT_FALSE(sweep[k].jump);
  }
}

TEST(ConstrainedMin, ToyColdSweepAgreesWithWarm) {
  ToyModel m({3, 3});
  SweepOptions warm, cold;
  warm.minimize = cold.minimize = MinimizeOptions::toy_defaults();
  cold.warm_start = false;
  const auto lambdas = log_space(0.01, 5.0, 12);
  auto a = continuation_sweep(m, lambdas, warm);
  auto b = continuation_sweep(m, lambdas, cold);
  for (std::size_t k = 0; k < lambdas.size(); ++k) EXPECT_NEAR(a[k].result.i_value, b[k].result.i_value, 1e-8);
}

TEST(ConstrainedMin, RejectsBadInputs) {
  ToyModel m({2, 4});
  EXPECT_THROW(minimize_on_level(m, 0.0, {1.0, 0.0}), ValidationError);
  EXPECT_THROW(minimize_on_level(m, 1.0, m.zero()), ValidationError);
  MinimizeOptions bad;
  bad.backtrack = 1.5;
  EXPECT_THROW(minimize_on_level(m, 1.0, {1.0, 0.0}, bad), ValidationError);
  EXPECT_THROW(continuation_sweep(m, {2.0, 1.0}), ValidationError);
}

TEST(ConstrainedMin, ConstraintIsHeld) {
  auto m = hardy_model();
  auto r = minimize_on_level(m, 3.0, m.seed());
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.constraint_error, 1e-10);
  EXPECT_NEAR(m.U(r.minimizer), 3.0, 3e-10);
  EXPECT_EQ(r.minimizer.values.back(), 0.0);
}

TEST(ConstrainedMin, HardyMultiStartConsistency) {
  auto m = hardy_model();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> width(0.5, 3.0), amp(0.5, 2.0);
  std::vector<double> values;
  for (int s = 0; s < 5; ++s) {
    const double w = width(rng), a = amp(rng);
    auto u0 = sample(m.grid(), [&](double r) { return a * std::exp(-(r / w) * (r / w)) * (1 + 0.2 * std::sin(r)); });
    m.pin(u0);
    auto r = minimize_on_level(m, 1.0, u0);
    ASSERT_TRUE(r.converged) << "seed " << s;
    EXPECT_GT(r.i_value, 0.0);
    values.push_back(r.i_value);
  }
  for (double v : values) EXPECT_NEAR(v / values.front(), 1.0, 1e-4);
}

TEST(ConstrainedMin, IDecreasesToZeroAsLambdaShrinks) {
  auto m = hardy_model();
  const auto lambdas = log_space(1e-3, 1.0, 4);
  auto sweep = continuation_sweep(m, lambdas);
  for (std::size_t k = 1; k < sweep.size(); ++k) EXPECT_LT(sweep[k - 1].result.i_value, sweep[k].result.i_value);
  EXPECT_LT(sweep.front().result.i_value, 0.02 * sweep.back().result.i_value);
}

TEST(ConstrainedMin, HardySlope) {
  auto m = hardy_model();
  const auto lambdas = log_space(0.1, 10.0, 9);
  auto sweep = continuation_sweep(m, lambdas);
  for (const auto& e : sweep) ASSERT_TRUE(e.result.converged);
  const auto fit = fit_power_law(lambdas, i_values(sweep));
  EXPECT_NEAR(fit.exponent / 0.6, 1.0, 0.01);
}

TEST(ConstrainedMin, HardyWithPotentialSlope) {
  auto m = hardy_model(0.5);
  const auto lambdas = log_space(0.1, 10.0, 9);
  auto sweep = continuation_sweep(m, lambdas);
  for (const auto& e : sweep) ASSERT_TRUE(e.result.converged);
  EXPECT_NEAR(fit_power_law(lambdas, i_values(sweep)).exponent / 0.6, 1.0, 0.01);
}

TEST(ConstrainedMin, CriticalSlope) {
  auto m = critical_model();
  const auto lambdas = log_space(0.1, 10.0, 9);
  auto sweep = continuation_sweep(m, lambdas);
  for (const auto& e : sweep) ASSERT_TRUE(e.result.converged);
  EXPECT_NEAR(fit_power_law(lambdas, i_values(sweep)).exponent / 0.6, 1.0, 0.01);
}

TEST(ConstrainedMin, RetractionHitsLevel) {
  auto m = critical_model();
  auto u = retract(m, m.seed(), 7.0);
  ASSERT_TRUE(u.has_value());
  EXPECT_NEAR(m.U(*u) / 7.0, 1.0, 1e-14);
}
