#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpmm/grid.hpp"

using namespace mpmm;

TEST(Grid, InvariantsHold) {
  for (double stretch : {1.0, 1.05, 1.5}) {
    auto g = build_radial_grid(5, 30.0, 800, stretch);
    ASSERT_EQ(g->size(), 800u);
    EXPECT_GT(g->node(0), 0.0);
    EXPECT_EQ(g->nodes().back(), 30.0);
    for (std::size_t k = 1; k < g->size(); ++k) EXPECT_GT(g->node(k), g->node(k - 1));
    for (double w : g->weights()) EXPECT_GT(w, 0.0);
  }
}

TEST(Grid, TwoNodeOffsetConvention) {
  // nodes at (k + 1/2)/(m - 1/2) R, last pinned at R
  auto g = build_radial_grid(3, 1.0, 2, 1.0);
  ASSERT_EQ(g->size(), 2u);
  EXPECT_NEAR(g->node(0), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(g->node(1), 1.0);
  EXPECT_NEAR(g->edges()[1], 2.0 / 3.0, 1e-15);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(build_radial_grid(3, -1.0, 100), ValidationError);
  EXPECT_THROW(build_radial_grid(3, 0.0, 100), ValidationError);
  EXPECT_THROW(build_radial_grid(3, 1.0, 1), ValidationError);
  EXPECT_THROW(build_radial_grid(0, 1.0, 100), ValidationError);
  EXPECT_THROW(build_radial_grid(3, 1.0, 100, 0.0), ValidationError);
}

TEST(Grid, QuadratureOfOneIsBallVolume) {
  auto g = build_radial_grid(3, 1.0, 400, 1.0);
  const double vol = quadrature(sample(g, [](double) { return 1.0; }));
  EXPECT_NEAR(vol / (4.0 / 3.0 * std::numbers::pi), 1.0, 1e-3);
  // cell weights tile the ball exactly
  EXPECT_NEAR(vol / ball_volume(3, 1.0), 1.0, 1e-13);
}

TEST(Grid, QuadratureOfRSquared) {
  auto g = build_radial_grid(3, 1.0, 400, 1.0);
  const double v = quadrature(sample(g, [](double r) { return r * r; }));
  EXPECT_NEAR(v / (4.0 * std::numbers::pi / 5.0), 1.0, 1e-3);
}

TEST(Grid, QuadratureSecondOrder) {
  // error of int exp(-r^2) over B_3 in R^3 should drop ~4x per refinement
  auto exact = [] {
    // 4 pi int_0^3 r^2 e^{-r^2} dr
    const double a = 3.0;
    return 4 * std::numbers::pi * (std::sqrt(std::numbers::pi) / 4 * std::erf(a) - a / 2 * std::exp(-a * a));
  }();
  double prev = 0;
  for (std::size_t m : {100u, 200u, 400u}) {
    auto g = build_radial_grid(3, 3.0, m, 1.0);
    const double err = std::abs(quadrature(sample(g, [](double r) { return std::exp(-r * r); })) - exact);
    if (prev > 0) {
      EXPECT_GT(prev / err, 3.0);
    }
    prev = err;
  }
}

TEST(Grid, QuadratureIsLinear) {
  auto g = build_radial_grid(4, 2.0, 100);
  auto f = sample(g, [](double r) { return std::sin(r); });
  EXPECT_EQ(quadrature(GridFunction(g)), 0.0);
  auto f3 = apply_scaling(f, {ScalingAction::Kind::amplitude, 3.0});
  EXPECT_NEAR(quadrature(f3), 3.0 * quadrature(f), 1e-14 * std::abs(quadrature(f)));
}

TEST(Grid, AmplitudeIsExactGroupAction) {
  auto g = build_radial_grid(3, 1.0, 64);
  auto u = sample(g, [](double r) { return std::cos(r); });
  auto a = apply_scaling(apply_scaling(u, {ScalingAction::Kind::amplitude, 2.0}),
                         {ScalingAction::Kind::amplitude, 4.0});
  auto b = apply_scaling(u, {ScalingAction::Kind::amplitude, 8.0});
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(apply_scaling(u, {ScalingAction::Kind::amplitude, 1.0}).values, u.values);
}

TEST(Grid, DilationIdentity) {
  auto g = build_radial_grid(3, 10.0, 200);
  auto u = sample(g, [](double r) { return std::exp(-r * r); });
  EXPECT_EQ(apply_scaling(u, {ScalingAction::Kind::dilation, 1.0}).values, u.values);
}

TEST(Grid, RejectsNonPositiveBeta) {
  auto g = build_radial_grid(3, 1.0, 16);
  GridFunction u(g);
  EXPECT_THROW(apply_scaling(u, {ScalingAction::Kind::dilation, 0.0}), ValidationError);
  EXPECT_THROW(apply_scaling(u, {ScalingAction::Kind::amplitude, -1.0}), ValidationError);
}

TEST(Grid, DilationScalesMassByBetaToTheN) {
  // int G(u(x/beta)) = beta^n int G(u) for compactly supported smooth u
  auto g = build_radial_grid(3, 12.0, 2000, 1.0);
  auto G = [](double s) { return s * s - 0.3 * s * s * s * s; };
  auto u = sample(g, [](double r) { return r < 2.5 ? std::pow(std::cos(std::numbers::pi * r / 5.0), 4) : 0.0; });
  auto mass = [&](const GridFunction& v) {
    GridFunction out(v.grid);
    for (std::size_t k = 0; k < v.size(); ++k) out.values[k] = G(v.values[k]);
    return quadrature(out);
  };
  const double base = mass(u);
  for (double beta : {0.25, 0.5, 2.0, 4.0}) {
    const double scaled = mass(apply_scaling(u, {ScalingAction::Kind::dilation, beta}));
    EXPECT_NEAR(scaled / (std::pow(beta, 3) * base), 1.0, 1e-3) << "beta=" << beta;
  }
}

TEST(Grid, DilationPreservesNonNegativity) {
  auto g = build_radial_grid(5, 30.0, 300);
  auto u = sample(g, [](double r) { return std::exp(-r); });
  for (double beta : {0.3, 1.7, 3.0}) {
    auto v = apply_scaling(u, {ScalingAction::Kind::dilation, beta});
    for (double x : v.values) EXPECT_GE(x, 0.0);
  }
}

TEST(Grid, TailCheck) {
  auto g = build_radial_grid(5, 30.0, 400);
  EXPECT_TRUE(tail_is_small(sample(g, [](double r) { return std::exp(-r); })));
  EXPECT_FALSE(tail_is_small(sample(g, [](double r) { return 1.0 / (1.0 + r); })));
}

TEST(Grid, SerializedNodesRoundTrip) {
  auto g = build_radial_grid(5, 3.0, 50);
  std::vector<double> nodes(g->nodes().begin(), g->nodes().end());
  auto h = grid_from_nodes(5, 3.0, g->stretch(), nodes);
  EXPECT_EQ(std::vector<double>(h.nodes().begin(), h.nodes().end()), nodes);
  double vol = 0;
  for (double w : h.weights()) vol += w;
  EXPECT_NEAR(vol, ball_volume(5, 3.0), 1e-12 * vol);
}
