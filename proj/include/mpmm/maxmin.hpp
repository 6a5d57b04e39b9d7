#pragma once

// Max-min engine: sample i(lambda) by continuation, build the level curve,
// refine its maximizer with true minimizations, and evaluate F along the
// scaling path gamma(lambda) = (group action)(v) with v in M_1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "constrained_min.hpp"
#include "level_curve.hpp"
#include "models.hpp"
#include "problem.hpp"

namespace mpmm {

/// lambda_bar two ways: the published closed form for each variant and
/// the analytic argmax of lambda^s i_1 - lambda.
struct LambdaBarForms {
  double published_formula = std::numeric_limits<double>::quiet_NaN();
  double derived_argmax = 0;
};

inline LambdaBarForms closed_form_lambda_bar(const ProblemSpec& spec, double i_1) {
  detail::require(std::isfinite(i_1) && i_1 > 0, "lambda_bar: i_1 must be positive");
  LambdaBarForms out;
  const double s = spec.scaling_exponent();
  out.derived_argmax = std::pow(s * i_1, 1.0 / (1.0 - s));
  const double p = spec.p();
  const double n = spec.n();
  switch (spec.variant()) {
    case Variant::hardy_subcritical:
      out.published_formula = std::pow(i_1, n / p) * std::pow((n - p) / p, n / p);
      break;
    case Variant::critical_bounded: {
      const double ps = spec.pstar();
      out.published_formula = std::pow(i_1 * p / ps, ps / (ps - p));
      break;
    }
    case Variant::toy:
      out.published_formula = toy_closed_form(spec.toy_problem()).lambda_bar;
      break;
  }
  return out;
}

/// gamma(lambda): v in M_1 carried to level lambda by the natural action
/// (dilation by lambda^{1/n}, or amplitude by lambda^{1/p*} resp. lambda^{1/q}).
template <EnergyModel M>
typename M::point_type scaling_path(const M& model, const typename M::point_type& v, double lambda) {
  detail::require(std::isfinite(lambda) && lambda > 0, "scaling path: lambda must be positive");
  if (lambda == 1.0) return v;
  return model.transport(v, 1.0, lambda);
}

struct PathSample {
  double lambda;
  double F;
  double T;
  double U;
};

template <EnergyModel M>
std::vector<PathSample> evaluate_F_along_path(const M& model, const typename M::point_type& v,
                                              const std::vector<double>& lambdas) {
  std::vector<PathSample> out(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t k) {
    const auto u = scaling_path(model, v, lambdas[k]);
    const double t = model.T(u), uu = model.U(u);
    out[k] = {lambdas[k], t - uu, t, uu};
  });
  return out;
}

struct MaxMinOptions {
  std::optional<double> lambda_min;  // default: lambda_bar estimate / 10
  std::optional<double> lambda_max;  // default: 2.5 x lambda** estimate
  double points_per_decade = 50;
  bool refine = true;           // golden-section on true minimizations
  double refine_tol = 1e-6;     // relative width of the final lambda bracket
  SweepOptions sweep;
};

template <class Point>
struct MaxMinRun {
  Point v;  // minimizer at lambda = 1
  double i_1 = 0;
  MinimizeResult<Point> unit_level;
  std::vector<SweepEntry<Point>> sweep;
  std::vector<MinimizeResult<Point>> refinements;
  LevelCurve curve;
  PowerLawFit fit;
  LambdaBarForms forms;
  int unconverged = 0;

  /// Minimizer from the sweep or refinements closest to lambda (log scale).
  const MinimizeResult<Point>& nearest(double lambda) const {
    const MinimizeResult<Point>* best = &unit_level;
    double gap = std::abs(std::log(lambda));
    auto consider = [&](const MinimizeResult<Point>& r) {
      if (r.lambda <= 0 || r.minimizer.size() == 0) return;
      const double g = std::abs(std::log(lambda / r.lambda));
      if (g < gap) { gap = g; best = &r; }
    };
    for (const auto& e : sweep) if (e.error.empty()) consider(e.result);
    for (const auto& r : refinements) consider(r);
    return *best;
  }
};

/// Runs the full max-min pipeline on a model. The sampled range defaults
/// to [lambda_bar/10, 2.5 lambda**] estimated from i_1 and the model's
/// scaling exponent.
template <EnergyModel M>
MaxMinRun<typename M::point_type> compute_level_curve(const M& model, const ProblemSpec& spec,
                                                      const MaxMinOptions& opts = {}) {
  using Point = typename M::point_type;
  MaxMinRun<Point> run;
  const auto& mopts = opts.sweep.minimize;
  run.unit_level = minimize_on_level(model, 1.0, model.seed(), mopts);
  if (!run.unit_level.converged)
    throw ConvergenceError("max-min: minimization at lambda = 1 did not converge");
  run.v = run.unit_level.minimizer;
  run.i_1 = run.unit_level.i_value;

  const double s = model.scaling_exponent();
  const double lbar_est = std::pow(s * run.i_1, 1.0 / (1.0 - s));
  const double lss_est = std::pow(run.i_1, 1.0 / (1.0 - s));
  const double lo = opts.lambda_min.value_or(lbar_est / 10.0);
  const double hi = opts.lambda_max.value_or(2.5 * lss_est);
  detail::require(lo > 0 && hi > lo, "max-min: invalid lambda range");
  const auto count = static_cast<std::size_t>(
      std::max(8.0, std::ceil(opts.points_per_decade * std::log10(hi / lo)) + 1));
  const auto lambdas = log_space(lo, hi, count);
  run.sweep = continuation_sweep(model, lambdas, opts.sweep, scaling_path(model, run.v, lambdas.front()));

  std::map<double, double> samples;
  for (const auto& e : run.sweep) {
    if (!e.error.empty()) continue;
    if (!e.result.converged) ++run.unconverged;
    samples[e.result.lambda] = e.result.i_value;
  }
  auto flatten = [&] {
    std::vector<double> l, i;
    for (const auto& [a, b] : samples) { l.push_back(a); i.push_back(b); }
    return std::pair{l, i};
  };
  {
    const auto [l, i] = flatten();
    run.curve = build_level_curve(l, i);
  }

  // true minimizations near the maximizer and at the first negative crossing
  auto true_I = [&](double x) {
    const double lambda = std::exp(x);
    const auto& near = run.nearest(lambda);
    auto r = minimize_on_level(model, lambda, model.transport(near.minimizer, near.lambda, lambda), mopts);
    const double value = r.i_value - lambda;
    if (!r.converged) ++run.unconverged;
    samples[lambda] = r.i_value;
    run.refinements.push_back(std::move(r));
    return value;
  };
  if (opts.refine) {
    if (run.curve.argmax_set.size() == 1) {
      const auto& L = run.curve.lambdas;
      const std::size_t k = run.curve.argmax_set.front();
      const double a = std::log(L[k == 0 ? 0 : k - 1]);
      const double b = std::log(L[std::min(k + 1, L.size() - 1)]);
      detail::golden_max(true_I, a, b, opts.refine_tol);
    }
    const auto& I = run.curve.I_values;
    const auto neg = std::find_if(I.begin(), I.end(), [](double v) { return v < 0; });
    const auto k = static_cast<std::size_t>(neg - I.begin());
    if (k > 0 && I[k - 1] > 0) {
      const double a = std::log(run.curve.lambdas[k - 1]), b = std::log(run.curve.lambdas[k]);
      std::uintmax_t iters = 60;
      auto tol = [&](double x, double y) { return std::abs(x - y) <= opts.refine_tol * 1e-3; };
      boost::math::tools::toms748_solve(true_I, a, b, I[k - 1], I[k], tol, iters);
    }
    const auto [l, i] = flatten();
    run.curve = build_level_curve(l, i);
  }
  {
    const auto [l, i] = flatten();
    run.fit = fit_power_law(l, i);
  }
  run.forms = closed_form_lambda_bar(spec, run.i_1);
  return run;
}

}  // namespace mpmm
