#pragma once

// Discrete p-Rayleigh quotient  mu_p = min sum L|Du|^p / sum w|u|^p  on a
// Dirichlet radial grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "discrete_ops.hpp"
#include "grid.hpp"

namespace mpmm {

struct RayleighOptions {
  int max_iters = 20000;
  double tol = 1e-7;   // preconditioned residual relative to the quotient;
                       // the quotient error is of order tol^2
};

struct RayleighEstimate {
  double value = 0;  // best quotient seen
  bool converged = false;
  int iterations = 0;
  double residual = 0;
  std::vector<double> eigenvector;
};

/// Normalized preconditioned gradient descent on the quotient, with the H^1
/// Gram matrix as preconditioner and an exact (Brent) line search.
inline RayleighEstimate estimate_mu_p(const RadialGrid& grid, double p,
                                      const RayleighOptions& opts = {}) {
  detail::require(p > 1, "mu_p: p must exceed 1");
  const std::size_t m = grid.size();
  detail::require(m >= 3, "mu_p: grid too small");
  const auto w = grid.weights();
  const auto A = detail::gram_matrix(grid, 1.0, /*dirichlet=*/true);
  const double R = grid.R();

  auto normalize = [&](std::vector<double>& u) {
    double s = 0;
    for (std::size_t k = 0; k < m; ++k) s += w[k] * std::pow(std::abs(u[k]), p);
    const double f = std::pow(s, -1.0 / p);
    for (double& x : u) x *= f;
  };
  auto quotient = [&](const std::vector<double>& u) {
    double den = 0;
    for (std::size_t k = 0; k < m; ++k) den += w[k] * std::pow(std::abs(u[k]), p);
    return detail::link_energy(grid, u, p) / den;
  };

  std::vector<double> u(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double r = grid.node(k) / R;
    u[k] = std::cos(0.5 * std::numbers::pi * r);
  }
  u[m - 1] = 0;
  normalize(u);

  RayleighEstimate out;
  double rq = quotient(u);
  double step = 1.0;  // bracket scale for the line search
  std::vector<double> grad(m), trial(m);
  for (int it = 0; it < opts.max_iters; ++it) {
    // d/du of N - rq * Den at normalized u (Den = 1)
    std::fill(grad.begin(), grad.end(), 0.0);
    detail::add_link_energy_partials(grid, u, p, 1.0, grad);
    for (std::size_t k = 0; k < m; ++k)
      grad[k] -= rq * p * w[k] * detail::signed_power_regularized(u[k], p);
    grad[m - 1] = 0;
    const auto d = A.solve(grad);
    double slope = 0;
    for (std::size_t k = 0; k < m; ++k) slope += grad[k] * d[k];
    out.iterations = it;
    out.residual = std::sqrt(std::max(slope, 0.0)) / rq;
    if (out.residual <= opts.tol) {
      out.converged = true;
      break;
    }
    // exact line search: the quotient is smooth in the step, minimize it
    // with Brent on [0, 2 * step_scale]
    auto along = [&](double t) {
      for (std::size_t k = 0; k < m; ++k) trial[k] = u[k] - t * d[k];
      return quotient(trial);
    };
    const auto [t_best, rq_best] =
        boost::math::tools::brent_find_minima(along, 0.0, 2.0 * step, std::numeric_limits<double>::digits / 2);
    bool accepted = rq_best < rq;
    if (accepted) {
      for (std::size_t k = 0; k < m; ++k) u[k] -= t_best * d[k];
      normalize(u);
      rq = quotient(u);
      // keep the bracket a little wider than the last useful step
      step = std::max(t_best, 1e-3);
    }
    if (!accepted) break;
  }
  out.value = rq;
  out.eigenvector = std::move(u);
  return out;
}

}  // namespace mpmm
