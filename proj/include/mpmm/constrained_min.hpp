#pragma once

// i_lambda = min { T(u) : U(u) = lambda } by projected, preconditioned
// gradient descent with an amplitude retraction onto the level set, plus
// lambda-continuation with group-action warm starts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "models.hpp"
#include "parallel.hpp"

namespace mpmm {

struct MinimizeOptions {
  int max_iters = 20000;
  double grad_tol = 1e-6;
  double constraint_tol = 1e-10;
  double step = 1.0;
  double backtrack = 0.5;

  void validate() const {
    detail::require(max_iters > 0, "minimize: max_iters must be positive");
    detail::require(grad_tol > 0 && constraint_tol > 0, "minimize: tolerances must be positive");
    detail::require(step > 0, "minimize: step must be positive");
    detail::require(backtrack > 0 && backtrack < 1, "minimize: backtrack must lie in (0, 1)");
  }

  static MinimizeOptions toy_defaults() {
    MinimizeOptions o;
    o.grad_tol = 1e-8;
    return o;
  }
};

template <class Point>
struct MinimizeResult {
  double lambda = 0;
  double i_value = 0;  // T at the minimizer
  Point minimizer;
  double multiplier = 0;  // least-squares theta in grad_T ~ theta grad_U
  int iterations = 0;
  bool converged = false;
  double residual = 0;  // |grad_T - theta grad_U| / (1 + |grad_T|)
  double constraint_error = 0;  // |U - lambda| / lambda
};

/// Stationarity measures at u: least-squares multiplier and the relative
/// residual of grad_T - theta grad_U in the model's pairing.
template <EnergyModel M>
std::pair<double, double> multiplier_and_residual(const M& model, const typename M::point_type& u) {
  const auto gT = model.grad_T(u);
  const auto gU = model.grad_U(u);
  const double uu = model.inner(gU, gU);
  const double theta = uu > 0 ? model.inner(gT, gU) / uu : 0.0;
  const double res = norm(model, model.combine(1.0, gT, -theta, gU));
  return {theta, res / (1.0 + norm(model, gT))};
}

/// Moves u onto {U = lambda} along beta -> beta u. For every model here
/// U(beta u) crosses each positive level exactly once, so the root is
/// bracketed by doubling and polished by TOMS 748. Empty if no bracket
/// exists (u = 0, or U bounded along the ray).
template <EnergyModel M>
std::optional<typename M::point_type> retract(const M& model, const typename M::point_type& u,
                                              double lambda) {
  const AmplitudeCurve curve = model.amplitude_curve(u);
  auto f = [&](double beta) { return curve(beta) - lambda; };
  double hi = 1.0;
  int guard = 0;
  while (!(f(hi) >= 0)) {
    if (++guard > 400 || !std::isfinite(f(hi))) return std::nullopt;
    hi *= 2.0;
  }
  double lo = hi;
  guard = 0;
  while (f(lo) >= 0) {
    if (++guard > 2000) return std::nullopt;
    lo *= 0.5;
  }
  if (f(hi) == 0) return model.combine(hi, u, 0.0, u);
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, iters);
  const double beta = std::abs(f(a)) < std::abs(f(b)) ? a : b;
  return model.combine(beta, u, 0.0, u);
}

/// Minimizes T on {U = lambda} from the seed u0.
///
/// Direction: the preconditioned gradient of T with its component along
/// the preconditioned gradient of U removed (so it is tangent to the level
/// set to first order). Each trial point is retracted back to the level set
/// and accepted by an Armijo test on T. Iterates never increase T beyond
/// rounding.
template <EnergyModel M>
MinimizeResult<typename M::point_type> minimize_on_level(const M& model, double lambda,
                                                         const typename M::point_type& u0,
                                                         const MinimizeOptions& opts = {}) {
  using Point = typename M::point_type;
  opts.validate();
  detail::require(std::isfinite(lambda) && lambda > 0, "minimize: lambda must be positive");
  auto start = retract(model, u0, lambda);
  if (!start) throw ValidationError("minimize: infeasible seed, cannot reach U = lambda by amplitude scaling");

  MinimizeResult<Point> out;
  out.lambda = lambda;
  Point u = std::move(*start);
  double t_now = model.T(u);
  double step = opts.step;
  constexpr double kArmijo = 1e-4;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int it = 0;; ++it) {
    const auto gT = model.grad_T(u);
    const auto gU = model.grad_U(u);
    const double uu = model.inner(gU, gU);
    const double theta = uu > 0 ? model.inner(gT, gU) / uu : 0.0;
    const double gnorm = norm(model, gT);
    out.iterations = it;
    out.multiplier = theta;
    out.residual = norm(model, model.combine(1.0, gT, -theta, gU)) / (1.0 + gnorm);
    out.constraint_error = std::abs(model.U(u) - lambda) / lambda;
    if (out.residual <= opts.grad_tol && out.constraint_error <= opts.constraint_tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iters) break;

    // Tangent direction built from the residual r = gT - theta gU rather
    // than from gT itself: near convergence gT is large and r tiny, and the
    // slope would otherwise drown in cancellation.
    const auto r = model.combine(1.0, gT, -theta, gU);
    const auto a = model.precondition(r, theta);
    const auto b = model.precondition(gU, theta);
    const double bu = model.inner(gU, b);
    const double alpha = bu > 0 ? model.inner(gU, a) / bu : 0.0;
    const auto dir = model.combine(-1.0, a, alpha, b);
    const double slope = model.inner(r, dir);
    if (!(slope < 0)) break;  // stationary to rounding along the tangent

    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 80; ++bt) {
      auto trial = retract(model, model.combine(1.0, u, s, dir), lambda);
      if (trial) {
        const double t_trial = model.T(*trial);
        if (t_trial <= t_now + kArmijo * s * slope + 16 * eps * std::abs(t_now)) {
          accepted = true;
          u = std::move(*trial);
          t_now = t_trial;
          break;
        }
      }
      s *= opts.backtrack;
    }
    if (!accepted) {
      // The predicted decrease is below the rounding noise of T: accept a
      // step that lowers the stationarity residual while T stays flat.
      s = step;
      for (int bt = 0; bt < 20 && !accepted; ++bt, s *= opts.backtrack) {
        auto trial = retract(model, model.combine(1.0, u, s, dir), lambda);
        if (!trial) continue;
        const double t_trial = model.T(*trial);
        if (t_trial > t_now + 64 * eps * std::abs(t_now)) continue;
        if (multiplier_and_residual(model, *trial).second < out.residual) {
          accepted = true;
          u = std::move(*trial);
          t_now = t_trial;
        }
      }
    }
    if (!accepted) break;
    step = std::min(1.25 * s, 1e3 * opts.step);
  }
  out.i_value = model.T(u);
  out.minimizer = std::move(u);
  return out;
}

template <class Point>
struct SweepEntry {
  MinimizeResult<Point> result;
  double step_distance = 0;  // distance to the previous minimizer
  bool jump = false;         // step_distance exceeds half the larger norm
  std::string error;         // non-empty if this solve threw
};

struct SweepOptions {
  MinimizeOptions minimize;
  bool warm_start = true;
};

/// Solves each level in turn; each solve starts from the previous minimizer
/// carried to the new level by the model's group action. Individual
/// failures are recorded and the sweep continues. With warm_start off the
/// solves are independent and run in parallel.
template <EnergyModel M>
std::vector<SweepEntry<typename M::point_type>> continuation_sweep(const M& model,
                                                                   const std::vector<double>& lambdas,
                                                                   const SweepOptions& opts = {},
                                                                   std::optional<typename M::point_type> seed = std::nullopt) {
  using Point = typename M::point_type;
  detail::require(!lambdas.empty(), "sweep: no levels given");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    detail::require(lambdas[k] > 0, "sweep: levels must be positive");
    if (k > 0) detail::require(lambdas[k] > lambdas[k - 1], "sweep: levels must be increasing");
  }
  const Point first = seed ? *seed : model.seed();
  std::vector<SweepEntry<Point>> out(lambdas.size());

  if (!opts.warm_start) {
    parallel_for(lambdas.size(), [&](std::size_t k) {
      try {
        out[k].result = minimize_on_level(model, lambdas[k], first, opts.minimize);
      } catch (const std::exception& e) {
        out[k].error = e.what();
        out[k].result.lambda = lambdas[k];
      }
    });
  } else {
    std::optional<Point> prev;
    double prev_lambda = 0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      try {
        const Point start = prev ? model.transport(*prev, prev_lambda, lambdas[k]) : first;
        out[k].result = minimize_on_level(model, lambdas[k], start, opts.minimize);
        prev = out[k].result.minimizer;
        prev_lambda = lambdas[k];
      } catch (const std::exception& e) {
        out[k].error = e.what();
        out[k].result.lambda = lambdas[k];
      }
    }
  }
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!out[k].error.empty() || !out[k - 1].error.empty()) continue;
    const auto& a = out[k - 1].result.minimizer;
    const auto& b = out[k].result.minimizer;
    out[k].step_distance = distance(model, a, b);
    out[k].jump = out[k].step_distance > 0.5 * std::max(norm(model, a), norm(model, b));
  }
  return out;
}

/// n log-spaced points covering [lo, hi].
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  detail::require(lo > 0 && hi > lo && n >= 2, "log_space: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::exp(a + (b - a) * k / (n - 1.0));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace mpmm
