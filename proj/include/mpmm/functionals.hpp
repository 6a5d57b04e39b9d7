#pragma once

// Discrete energies T, U, F = T - U of the two radial model problems and
// their exact discrete gradients. Gradients are Riesz representers for the
// quadrature pairing <a, b> = sum_k w_k a_k b_k, so that
//   dT(u)[h] = <grad_T(u), h>
// for every admissible h (h_{m-1} = 0 on the pinned outer node).

#include <cmath>
#include <cstddef>
#include <vector>

#include "discrete_ops.hpp"
#include "grid.hpp"
#include "problem.hpp"

namespace mpmm {

namespace detail {

inline void check_on_grid(const ProblemSpec& spec, const GridFunction& u) {
  require(spec.variant() != Variant::toy, "radial functionals do not apply to the toy variant");
  require(u.grid != nullptr && same_grid(u.grid, spec.grid()), "grid function lives on a different grid");
}

inline double potential_sum(const ProblemSpec& spec, const GridFunction& u) {
  const auto& w = spec.variant() == Variant::hardy_subcritical
                      ? std::span<const double>(spec.singular_weights())
                      : spec.grid()->weights();
  double s = 0;
  for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * std::pow(std::abs(u.values[k]), spec.p());
  return s;
}

}  // namespace detail

/// Gradient part of T alone: int |grad u|^p, discretized on links.
inline double gradient_energy(const ProblemSpec& spec, const GridFunction& u) {
  detail::check_on_grid(spec, u);
  return detail::link_energy(*spec.grid(), u.values, spec.p());
}

inline double eval_T(const ProblemSpec& spec, const GridFunction& u) {
  detail::check_on_grid(spec, u);
  const double p = spec.p();
  const double grad = detail::link_energy(*spec.grid(), u.values, p);
  if (spec.mu() == 0) return grad / p;
  return (grad - spec.mu() * detail::potential_sum(spec, u)) / p;
}

inline double eval_U(const ProblemSpec& spec, const GridFunction& u) {
  detail::check_on_grid(spec, u);
  const auto w = spec.grid()->weights();
  double s = 0;
  if (spec.variant() == Variant::hardy_subcritical) {
    const auto& g = spec.nonlinearity();
    for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * g.G(u.values[k]);
    return s;
  }
  const double ps = spec.pstar();
  for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * std::pow(std::abs(u.values[k]), ps);
  return s / ps;
}

inline double eval_F(const ProblemSpec& spec, const GridFunction& u) {
  return eval_T(spec, u) - eval_U(spec, u);
}

inline GridFunction grad_T(const ProblemSpec& spec, const GridFunction& u) {
  detail::check_on_grid(spec, u);
  const auto& grid = *spec.grid();
  const double p = spec.p();
  const auto w = grid.weights();
  GridFunction out(spec.grid());
  detail::add_link_energy_partials(grid, u.values, p, 1.0 / p, out.values);
  if (spec.mu() != 0) {
    const auto pw = spec.variant() == Variant::hardy_subcritical
                        ? std::span<const double>(spec.singular_weights())
                        : grid.weights();
    for (std::size_t k = 0; k < u.size(); ++k)
      out.values[k] -= spec.mu() * pw[k] * detail::signed_power_regularized(u.values[k], p);
  }
  for (std::size_t k = 0; k < u.size(); ++k) out.values[k] /= w[k];
  if (spec.dirichlet()) out.values.back() = 0;
  return out;
}

inline GridFunction grad_U(const ProblemSpec& spec, const GridFunction& u) {
  detail::check_on_grid(spec, u);
  GridFunction out(spec.grid());
  if (spec.variant() == Variant::hardy_subcritical) {
    const auto& g = spec.nonlinearity();
    for (std::size_t k = 0; k < u.size(); ++k) out.values[k] = g.g(u.values[k]);
  } else {
    const double ps = spec.pstar();
    for (std::size_t k = 0; k < u.size(); ++k)
      out.values[k] = detail::signed_power(u.values[k], ps);
  }
  if (spec.dirichlet()) out.values.back() = 0;
  return out;
}

/// Quadrature pairing sum_k w_k a_k b_k.
inline double weighted_inner(const GridFunction& a, const GridFunction& b) {
  detail::require(same_grid(a.grid, b.grid), "inner product across different grids");
  const auto w = a.grid->weights();
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += w[k] * a.values[k] * b.values[k];
  return s;
}

inline double weighted_norm(const GridFunction& a) { return std::sqrt(weighted_inner(a, a)); }

/// Discrete mu_p of a critical-bounded problem (its Dirichlet ball).
inline RayleighEstimate estimate_mu_p(const ProblemSpec& spec, const RayleighOptions& opts = {}) {
  detail::require(spec.variant() == Variant::critical_bounded, "mu_p is defined for critical-bounded problems");
  return estimate_mu_p(*spec.grid(), spec.p(), opts);
}

}  // namespace mpmm
