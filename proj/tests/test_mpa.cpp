#include <gtest/gtest.h>

#include <cmath>

#include "mpmm/maxmin.hpp"
#include "mpmm/mpa.hpp"

using namespace mpmm;

namespace {

std::vector<double> ray(double r, double angle = 0.0) { return {r * std::cos(angle), r * std::sin(angle)}; }

// every image keeps F finite, the ends stay fixed and admissible
template <class M>
int gamma_violations(const M& model, const DiscretePath<typename M::point_type>& path) {
  int bad = 0;
  if (norm(model, path.points.front()) != 0) ++bad;
  if (!(path.endpoint_energy() < 0)) ++bad;
  for (std::size_t j = 0; j < path.size(); ++j)
    if (!std::isfinite(path.energies[j]) || path.energies[j] != model.F(path.points[j])) ++bad;
  return bad;
}

}  // namespace

TEST(Mpa, InitRejectsInadmissibleEndpoint) {
  ToyModel m({2, 4});
  EXPECT_THROW(init_path(m, m.zero(), 16), ValidationError);
  EXPECT_THROW(init_path(m, ray(0.5), 16), ValidationError);  // F > 0
  EXPECT_THROW(init_path(m, ray(2.0), 8), ValidationError);   // too few images
}

TEST(Mpa, InitialStraightPathCrossesBarrier) {
  ToyModel m({2, 4});
  auto path = init_path(m, ray(2.0), 16);
  EXPECT_EQ(path.size(), 18u);
  EXPECT_DOUBLE_EQ(path.endpoint_energy(), -12.0);
  EXPECT_GE(path_maximum(m, path).value, 0.25 - 1e-12);
  EXPECT_EQ(gamma_violations(m, path), 0);
}

TEST(Mpa, ToyQ4Level) {
  ToyModel m({2, 4});
  auto est = estimate_c(m, ray(2.0), MpaOptions::toy_defaults());
  EXPECT_NEAR(est.c_mpa, 0.25, 1e-3);
  EXPECT_NEAR(norm(m, est.argmax_point), std::pow(0.25, 0.25), 1e-3);
  EXPECT_EQ(gamma_violations(m, est.path), 0);
}

TEST(Mpa, ToyQ3Level) {
  ToyModel m({2, 3});
  auto est = estimate_c(m, ray(2.0), MpaOptions::toy_defaults());
  EXPECT_NEAR(est.c_mpa, 4.0 / 27.0, 1e-3);
}

TEST(Mpa, BentPathRelaxesDownToLevel) {
  // a detour through a high-energy region must be pulled back down
  ToyModel m({2, 4});
  auto path = init_polyline_path(m, {m.zero(), ray(0.3, 2.5), ray(0.7, 1.0), ray(2.0)}, 30);
  const double start = path_maximum(m, path).value;
  auto est = estimate_c(m, path, MpaOptions::toy_defaults());
  EXPECT_LE(est.c_mpa, start);
  EXPECT_NEAR(est.c_mpa, 0.25, 1e-3);
  EXPECT_EQ(gamma_violations(m, est.path), 0);
}

TEST(Mpa, TraceIsMonotone) {
  ToyModel m({2, 6});
  auto path = init_polyline_path(m, {m.zero(), ray(0.6, 1.2), ray(1.5)}, 20);
  auto est = estimate_c(m, path, MpaOptions::toy_defaults());
  ASSERT_FALSE(est.trace.empty());
  for (std::size_t k = 1; k < est.trace.size(); ++k)
    EXPECT_LE(est.trace[k].max_energy, est.trace[k - 1].max_energy * (1 + 1e-14));
}

TEST(Mpa, DeformKeepsEndpoints) {
  ToyModel m({2, 4});
  auto path = init_polyline_path(m, {m.zero(), ray(0.5, 1.0), ray(2.0)}, 20);
  auto res = deform(m, path, 0.5);
  ASSERT_FALSE(res.stagnant);
  EXPECT_EQ(res.path.points.front(), path.points.front());
  EXPECT_EQ(res.path.points.back(), path.points.back());
  EXPECT_EQ(gamma_violations(m, res.path), 0);
}

TEST(Mpa, CriticalPathIsFixedPointUpToReparameterization) {
  // on the straight ray every image is critical for F restricted to the
  // hyperplane normal to the path, so deformation only slides images along it
  ToyModel m({2, 4});
  auto path = init_path(m, ray(2.0), 20);
  auto res = deform(m, path, 0.5);
  for (const auto& p : res.path.points) EXPECT_NEAR(p[1], 0.0, 1e-15);
}

TEST(Mpa, LevelCrossingScan) {
  ToyModel m({2, 4});
  auto est = estimate_c(m, ray(2.0), MpaOptions::toy_defaults());
  const auto levels = log_space(1e-4, 8.0, 50);
  EXPECT_TRUE(uncrossed_levels(m, est.path, levels).empty());
  EXPECT_EQ(uncrossed_levels(m, est.path, {1e6}).size(), 1u);
}

TEST(Mpa, HardyAgreesWithMaxMin) {
  auto spec = ProblemSpec::hardy_subcritical(2, 5, 0.0, NonlinearitySpec(1.0, 8.0 / 3.0), build_radial_grid(5, 20.0, 200));
  RadialModel m(spec);
  MaxMinOptions o;
  o.points_per_decade = 10;
  auto run = compute_level_curve(m, spec, o);
  const auto endpoint = scaling_path(m, run.v, 2.0 * run.curve.lambda_star_star);
  ASSERT_LT(m.F(endpoint), 0.0);
  auto est = estimate_c(m, endpoint);
  EXPECT_NEAR(est.c_mpa / run.curve.c_maxmin, 1.0, 0.03);
  EXPECT_EQ(gamma_violations(m, est.path), 0);
  std::vector<double> levels;
  for (double l : run.curve.lambdas)
    if (l < m.U(endpoint)) levels.push_back(l);
  EXPECT_TRUE(uncrossed_levels(m, est.path, levels).empty());
}
