#pragma once

// Finite-dimensional analytic instance: X = R^d, T(u) = |u|^2, U(u) = |u|^q.
// Everything is a function of |u| alone, so the level quantities have
// closed forms and serve as exact oracles for the generic engines.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "errors.hpp"

namespace mpmm {

struct ToyProblem {
  int d = 2;
  double q = 4;

  void validate() const {
    detail::require(d >= 1, "toy: dimension d must be >= 1");
    detail::require(std::isfinite(q) && q > 2, "toy: exponent q must exceed 2");
  }
};

/// i_lambda = min |u|^2 over |u|^q = lambda, attained on |u| = lambda^{1/q}.
inline double toy_i_lambda(const ToyProblem& prob, double lambda) {
  prob.validate();
  detail::require(lambda >= 0, "toy: lambda must be non-negative");
  return std::pow(lambda, 2.0 / prob.q);
}

struct ToyClosedForm {
  double lambda_star;
  double lambda_star_star;
  double lambda_bar;
  double c;
};

inline ToyClosedForm toy_closed_form(const ToyProblem& prob) {
  prob.validate();
  const double q = prob.q;
  const double lambda_bar = std::pow(2.0 / q, q / (q - 2.0));
  return {1.0, 1.0, lambda_bar, std::pow(lambda_bar, 2.0 / q) - lambda_bar};
}

/// Mountain-pass level from its definition restricted to radial paths
/// t -> t e: max over r in [0, r_end] of r^2 - r^q, with r_end the first
/// radius where the energy turns negative. Any path from 0 to a negative
/// energy point crosses every sphere below r_end, so this is exact.
inline double toy_c_bruteforce(const ToyProblem& prob, std::size_t resolution) {
  prob.validate();
  detail::require(resolution >= 100, "toy: resolution must be >= 100");
  const double q = prob.q;
  auto energy = [q](double r) { return r * r - std::pow(r, q); };
  double r_end = 1.0;
  while (!(energy(r_end) < 0)) r_end *= 1.5;
  double best = 0;
  double best_r = 0;
  const double dr = r_end / static_cast<double>(resolution);
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double r = dr * static_cast<double>(i);
    if (energy(r) > best) {
      best = energy(r);
      best_r = r;
    }
  }
  // polish on the bracketing cells with a golden-section search
  double a = std::max(0.0, best_r - dr), b = std::min(r_end, best_r + dr);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = energy(x1), f2 = energy(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = energy(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = energy(x1);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace mpmm
