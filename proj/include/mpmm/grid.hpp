#pragma once

// Radial grids on the ball B_R in R^n, node quadrature and the two scaling
// actions (dilation u(r) -> u(r/beta), amplitude u -> beta u).
//
// Node convention: with xi_k = (k + 1/2) / (m - 1/2) and cell edges
// e_k = R (k / (m - 1/2))^stretch, node r_k = R xi_k^stretch sits at the
// (mapped) midpoint of cell [e_k, e_{k+1}], except the last node which sits
// at r_{m-1} = R and owns the half cell [e_{m-1}, R]. For stretch = 1 the
// first node is at half the first cell width. There is never a node at r = 0.
//
// Quadrature weights hold the exact n-dimensional volume of each shell
// cell, sphere area included, so sum_k w_k f(r_k) approximates the
// integral of f(|x|) over B_R with second-order accuracy and integrates
// the constant 1 exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>

#include "errors.hpp"

namespace mpmm {

/// Surface area of the unit sphere S^{n-1}.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the ball of radius R in R^n.
inline double ball_volume(int n, double R) {
  return sphere_area(n) * std::pow(R, n) / n;
}

class RadialGrid {
public:
  int n() const { return n_; }
  double R() const { return R_; }
  std::size_t size() const { return nodes_.size(); }
  double stretch() const { return stretch_; }

  std::span<const double> nodes() const { return nodes_; }
  /// Shell-cell volumes, one per node (sphere area folded in).
  std::span<const double> weights() const { return weights_; }
  /// Cell edges e_0 = 0 < e_1 < ... < e_m = R.
  std::span<const double> edges() const { return edges_; }
  /// Volume of the shell between consecutive nodes r_k and r_{k+1}; used
  /// by the gradient energy. Size m - 1.
  std::span<const double> link_weights() const { return links_; }

  double node(std::size_t k) const { return nodes_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }

  /// Integral over each cell of r^{n-1-s} dr times the sphere area; the
  /// exact cell weights for a |x|^{-s} potential. Requires s < n.
  std::vector<double> singular_weights(double s) const {
    detail::require(s < n_, "singular weight |x|^-s needs s < n");
    const double a = n_ - s;
    const double omega = sphere_area(n_);
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k)
      out[k] = omega * (std::pow(edges_[k + 1], a) - std::pow(edges_[k], a)) / a;
    return out;
  }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.n_ == b.n_ && a.R_ == b.R_ && a.stretch_ == b.stretch_ &&
           a.nodes_ == b.nodes_;
  }

private:
  friend RadialGrid build_radial_grid_impl(int, double, std::size_t, double);
  friend RadialGrid grid_from_nodes(int, double, double, std::vector<double>);

  int n_ = 0;
  double R_ = 0;
  double stretch_ = 1;
  std::vector<double> nodes_;
  std::vector<double> edges_;
  std::vector<double> weights_;
  std::vector<double> links_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

namespace detail {

inline void finish_grid_weights(int n, std::span<const double> nodes,
                                std::span<const double> edges,
                                std::vector<double>& weights,
                                std::vector<double>& links) {
  const double omega = sphere_area(n);
  const std::size_t m = nodes.size();
  weights.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    weights[k] = omega * (std::pow(edges[k + 1], n) - std::pow(edges[k], n)) / n;
  links.resize(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k)
    links[k] = omega * (std::pow(nodes[k + 1], n) - std::pow(nodes[k], n)) / n;
}

}  // namespace detail

inline RadialGrid build_radial_grid_impl(int n, double R, std::size_t m, double stretch) {
  detail::require(n >= 1, "grid: dimension n must be >= 1");
  detail::require(std::isfinite(R) && R > 0, "grid: radius R must be positive");
  detail::require(m >= 2, "grid: need at least 2 nodes");
  detail::require(std::isfinite(stretch) && stretch > 0, "grid: stretch must be positive");

  RadialGrid g;
  g.n_ = n;
  g.R_ = R;
  g.stretch_ = stretch;
  const double denom = static_cast<double>(m) - 0.5;
  g.nodes_.resize(m);
  g.edges_.resize(m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    g.nodes_[k] = R * std::pow((k + 0.5) / denom, stretch);
    g.edges_[k] = R * std::pow(k / denom, stretch);
  }
  g.nodes_[m - 1] = R;
  g.edges_[m] = R;
  detail::finish_grid_weights(n, g.nodes_, g.edges_, g.weights_, g.links_);
  return g;
}

/// Grid from explicit nodes (used when reading a serialized grid). Cell
/// edges are the midpoints between nodes, e_0 = 0, e_m = R.
inline RadialGrid grid_from_nodes(int n, double R, double stretch, std::vector<double> nodes) {
  detail::require(n >= 1 && R > 0 && nodes.size() >= 2, "grid: invalid serialized grid");
  detail::require(nodes.front() > 0 && nodes.back() == R, "grid: nodes must lie in (0, R] and end at R");
  for (std::size_t k = 1; k < nodes.size(); ++k)
    detail::require(nodes[k] > nodes[k - 1], "grid: nodes must be strictly increasing");
  RadialGrid g;
  g.n_ = n;
  g.R_ = R;
  g.stretch_ = stretch;
  g.nodes_ = std::move(nodes);
  const std::size_t m = g.nodes_.size();
  g.edges_.assign(m + 1, 0.0);
  for (std::size_t k = 1; k < m; ++k) g.edges_[k] = 0.5 * (g.nodes_[k - 1] + g.nodes_[k]);
  g.edges_[m] = R;
  detail::finish_grid_weights(n, g.nodes_, g.edges_, g.weights_, g.links_);
  return g;
}

/// Shared, immutable grid. m counts nodes.
inline GridPtr build_radial_grid(int n, double R, std::size_t m, double stretch = 1.05) {
  return std::make_shared<const RadialGrid>(build_radial_grid_impl(n, R, m, stretch));
}

inline bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Radial profile on a grid: the discrete representative of u(|x|).
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
  GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    detail::require(values.size() == grid->size(), "grid function size does not match its grid");
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
};

/// Samples f(r) at every node.
template <class Fn>
GridFunction sample(const GridPtr& grid, Fn&& f) {
  GridFunction u(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) u.values[k] = f(grid->node(k));
  return u;
}

/// sum_k w_k g_k.
inline double quadrature(const GridFunction& g) {
  const auto w = g.grid->weights();
  double s = 0;
  for (std::size_t k = 0; k < g.size(); ++k) s += w[k] * g.values[k];
  return s;
}

struct ScalingAction {
  enum class Kind { dilation, amplitude };
  Kind kind;
  double beta;
};

namespace detail {

/// Monotone piecewise-cubic interpolant of u on [-r_0, R]; the ghost node
/// at -r_0 mirrors u_0 so the profile is even through the origin.
inline boost::math::interpolators::pchip<std::vector<double>> radial_interpolant(const GridFunction& u) {
  const auto r = u.grid->nodes();
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(r.size() + 1);
  y.reserve(r.size() + 1);
  x.push_back(-r[0]);
  y.push_back(u.values[0]);
  x.insert(x.end(), r.begin(), r.end());
  y.insert(y.end(), u.values.begin(), u.values.end());
  return {std::move(x), std::move(y)};
}

}  // namespace detail

/// Evaluates the monotone cubic interpolant of u at arbitrary radii; zero
/// beyond R.
inline std::vector<double> interpolate(const GridFunction& u, std::span<const double> radii) {
  std::vector<double> out(radii.size(), 0.0);
  if (u.size() < 3) {
    // too few nodes for a cubic; fall back to linear
    const auto r = u.grid->nodes();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double x = radii[i];
      if (x > u.grid->R()) continue;
      if (x <= r[0]) { out[i] = u.values[0]; continue; }
      const auto it = std::upper_bound(r.begin(), r.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - r.begin());
      if (k >= r.size()) { out[i] = u.values.back(); continue; }
      const double t = (x - r[k - 1]) / (r[k] - r[k - 1]);
      out[i] = (1 - t) * u.values[k - 1] + t * u.values[k];
    }
    return out;
  }
  const auto spline = detail::radial_interpolant(u);
  const double R = u.grid->R();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = radii[i];
    if (x <= R) out[i] = spline(std::max(x, 0.0));
  }
  return out;
}

/// amplitude: beta * u, exact. dilation: r -> u(r / beta) interpolated
/// back onto the same grid, extended by zero outside the original support.
inline GridFunction apply_scaling(const GridFunction& u, const ScalingAction& a) {
  detail::require(std::isfinite(a.beta) && a.beta > 0, "scaling: beta must be positive");
  GridFunction out(u.grid);
  if (a.kind == ScalingAction::Kind::amplitude) {
    for (std::size_t k = 0; k < u.size(); ++k) out.values[k] = a.beta * u.values[k];
    return out;
  }
  if (a.beta == 1.0) return u;
  const auto r = u.grid->nodes();
  std::vector<double> pulled(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) pulled[k] = r[k] / a.beta;
  out.values = interpolate(u, pulled);
  return out;
}

/// True when |u| over the outer tenth of the radius stays below
/// rel * max|u|; a truncated-domain sanity check.
inline bool tail_is_small(const GridFunction& u, double rel = 1e-8) {
  double peak = 0;
  for (double v : u.values) peak = std::max(peak, std::abs(v));
  if (peak == 0) return true;
  const double cut = 0.9 * u.grid->R();
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u.grid->node(k) >= cut && std::abs(u.values[k]) > rel * peak) return false;
  return true;
}

}  // namespace mpmm
