#pragma once

// Euler-Lagrange verification: residual of F'(u) = 0 in the weighted dual
// pairing, the least-squares multiplier, and the search for the level at
// which a scaled minimizer has unit multiplier.

#include <cmath>
#include <string>
#include <vector>

#include "constrained_min.hpp"
#include "discrete_ops.hpp"
#include "errors.hpp"
#include "maxmin.hpp"
#include "models.hpp"
#include "problem.hpp"

namespace mpmm {

/// |grad_T - grad_U| / (1 + |grad_T|).
template <EnergyModel M>
double el_residual(const M& model, const typename M::point_type& u) {
  const auto gT = model.grad_T(u);
  const auto gU = model.grad_U(u);
  return norm(model, model.combine(1.0, gT, -1.0, gU)) / (1.0 + norm(model, gT));
}

/// argmin over theta of |grad_T - theta grad_U|; 0 when grad_U vanishes.
template <EnergyModel M>
double multiplier_of(const M& model, const typename M::point_type& u) {
  return multiplier_and_residual(model, u).first;
}

struct ScaleCandidate {
  std::string label;
  double lambda = 0;     // level the candidate sits on (or is labelled by)
  double theta = 0;
  double residual = 0;
};

template <class Point>
struct SolutionScale {
  double lambda_on_path = 0;          // theta = 1 along gamma, by bisection
  double lambda_unit_multiplier = 0;  // theta = 1 among true minimizers
  Point solution;                     // minimizer at lambda_unit_multiplier
  double theta = 0;
  double residual = 0;
  bool polished = false;
  double regularization_delta = 0;    // gradient regularization in effect
  std::vector<ScaleCandidate> candidates;
};

struct ScaleOptions {
  MinimizeOptions minimize;   // polish uses grad_tol / 100 of this
  double theta_tol = 1e-10;
  int max_polish = 30;
};

namespace detail {

/// Root of theta(lambda) - 1 in log lambda; theta decreases along every
/// scaling path here, so the bracket is grown geometrically from a guess.
template <class Fn>
double unit_root_log(Fn theta_minus_one, double guess) {
  double a = std::log(guess), b = a;
  double fa = theta_minus_one(std::exp(a)), fb = fa;
  for (int k = 0; k < 200 && fa * fb > 0; ++k) {
    if (fa > 0) { a = b; fa = fb; b += std::log(2.0); fb = theta_minus_one(std::exp(b)); }
    else { b = a; fb = fa; a -= std::log(2.0); fa = theta_minus_one(std::exp(a)); }
  }
  if (fa * fb > 0) throw ConvergenceError("unit multiplier: no sign change of theta - 1 along the path");
  if (a > b) { std::swap(a, b); std::swap(fa, fb); }
  for (int it = 0; it < 200 && b - a > 1e-14 * (1 + std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = theta_minus_one(std::exp(mid));
    if ((fm > 0) == (fa > 0)) { a = mid; fa = fm; } else { b = mid; fb = fm; }
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace detail

/// Locates the unit-multiplier level: bisection of theta along the scaling
/// path of v, then a secant polish on true constrained minimizers so the
/// reported residual is that of an actual member of M_lambda. Tabulates
/// the residual at the closed-form candidates as well.
template <EnergyModel M>
SolutionScale<typename M::point_type> pick_solution_scale(const M& model, const ProblemSpec& spec,
                                                          const typename M::point_type& v, double i_1,
                                                          const ScaleOptions& opts = {}) {
  using Point = typename M::point_type;
  SolutionScale<Point> out;
  out.regularization_delta = spec.p() < 2 ? detail::kGradientDelta : 0.0;
  const auto forms = closed_form_lambda_bar(spec, i_1);

  out.lambda_on_path = detail::unit_root_log(
      [&](double l) { return multiplier_of(model, scaling_path(model, v, l)) - 1.0; }, forms.derived_argmax);

  MinimizeOptions tight = opts.minimize;
  tight.grad_tol = opts.minimize.grad_tol * 1e-2;
  auto solve = [&](double lambda) {
    auto r = minimize_on_level(model, lambda, scaling_path(model, v, lambda), tight);
    if (!r.converged) {
      // the tighter target can sit below rounding on fine grids
      auto loose = minimize_on_level(model, lambda, r.minimizer, opts.minimize);
      if (loose.residual < r.residual) r = std::move(loose);
    }
    return r;
  };
  double x0 = std::log(out.lambda_on_path);
  auto r0 = solve(std::exp(x0));
  double x1 = x0 + 1e-3;
  auto r1 = solve(std::exp(x1));
  for (int it = 0; it < opts.max_polish; ++it) {
    if (std::abs(r1.multiplier - 1.0) <= opts.theta_tol) break;
    const double slope = (r1.multiplier - r0.multiplier) / (x1 - x0);
    if (!(std::abs(slope) > 0) || !std::isfinite(slope)) break;
    const double x2 = x1 - (r1.multiplier - 1.0) / slope;
    if (x2 == x1) break;
    x0 = x1;
    r0 = std::move(r1);
    x1 = x2;
    r1 = solve(std::exp(x1));
  }
  out.polished = std::abs(r1.multiplier - 1.0) <= 1e3 * opts.theta_tol;
  out.lambda_unit_multiplier = std::exp(x1);
  out.theta = multiplier_of(model, r1.minimizer);
  out.residual = el_residual(model, r1.minimizer);
  out.solution = std::move(r1.minimizer);

  auto add = [&](std::string label, double lambda, const Point& u) {
    out.candidates.push_back({std::move(label), lambda, multiplier_of(model, u), el_residual(model, u)});
  };
  add("unit_multiplier", out.lambda_unit_multiplier, out.solution);
  add("derived_argmax", forms.derived_argmax, scaling_path(model, v, forms.derived_argmax));
  if (spec.variant() == Variant::critical_bounded) {
    // two readings of the amplitude factor applied to v at lambda_bar
    const double lb = forms.published_formula;
    const double ps = spec.pstar();
    add("amplitude_lambda_bar^(1/p*)", lb, model.combine(std::pow(lb, 1.0 / ps), v, 0.0, v));
    add("amplitude_lambda_bar^(p/p*)", lb, model.combine(std::pow(lb, spec.p() / ps), v, 0.0, v));
  } else {
    add("published_formula", forms.published_formula, scaling_path(model, v, forms.published_formula));
  }
  return out;
}

}  // namespace mpmm
