#pragma once

// The level curve I(lambda) = i(lambda) - lambda built from samples: its
// first non-positive and first negative crossings (lambda*, lambda**), the
// argmax set on (0, lambda**) and the max-min value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>

#include "errors.hpp"

namespace mpmm {

struct LevelCurve {
  std::vector<double> lambdas;
  std::vector<double> i_values;
  std::vector<double> I_values;  // exactly i_values - lambdas
  double lambda_star = 0;
  double lambda_star_star = 0;
  std::vector<std::size_t> argmax_set;
  double lambda_bar = 0;
  double c_maxmin = 0;
  bool single_crossing = true;
  bool argmax_at_boundary = false;

  /// I interpolated monotonically in log(lambda); linear if < 4 samples.
  double interpolate(double lambda) const;
};

namespace detail {

/// Golden-section maximization of f on [a, b].
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                            double tol = 1e-13) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

inline double interpolate_log(const std::vector<double>& lambdas, const std::vector<double>& values,
                              double lambda) {
  const std::size_t n = lambdas.size();
  if (lambda <= lambdas.front()) return values.front();
  if (lambda >= lambdas.back()) return values.back();
  const double x = std::log(lambda);
  if (n >= 4) {
    std::vector<double> lx(n), y(values);
    for (std::size_t k = 0; k < n; ++k) lx[k] = std::log(lambdas[k]);
    const boost::math::interpolators::pchip<std::vector<double>> spline(std::move(lx), std::move(y));
    return spline(x);
  }
  const auto it = std::upper_bound(lambdas.begin(), lambdas.end(), lambda);
  const std::size_t k = static_cast<std::size_t>(it - lambdas.begin());
  const double a = std::log(lambdas[k - 1]), b = std::log(lambdas[k]);
  const double t = (x - a) / (b - a);
  return (1 - t) * values[k - 1] + t * values[k];
}

/// Polynomial through the samples k-2..k+2 (clipped to the range), in
/// log lambda. The monotone interpolant flattens every extremum onto a
/// sample, so the maximizer is located on this local fit instead.
inline std::function<double(double)> local_polynomial(const std::vector<double>& lambdas,
                                                      const std::vector<double>& values, std::size_t k) {
  const std::size_t lo = k >= 2 ? k - 2 : 0;
  const std::size_t hi = std::min(lo + 4, lambdas.size() - 1);
  std::vector<double> x, y;
  for (std::size_t j = hi >= 4 ? std::min(lo, hi - 4) : 0; j <= hi; ++j) {
    x.push_back(std::log(lambdas[j]));
    y.push_back(values[j]);
  }
  return [x = std::move(x), y = std::move(y)](double t) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double w = y[i];
      for (std::size_t j = 0; j < x.size(); ++j)
        if (j != i) w *= (t - x[j]) / (x[i] - x[j]);
      s += w;
    }
    return s;
  };
}

}  // namespace detail

inline double LevelCurve::interpolate(double lambda) const {
  return detail::interpolate_log(lambdas, I_values, lambda);
}

/// Builds the curve from (lambda, i) samples with strictly increasing
/// lambda. The samples must contain a strictly negative I, and the first
/// sample must have I > 0; otherwise the range has to be widened.
inline LevelCurve build_level_curve(const std::vector<double>& lambdas, const std::vector<double>& i_values,
                                    double tie_tol = 1e-9) {
  detail::require(lambdas.size() == i_values.size(), "level curve: sample arrays differ in length");
  detail::require(lambdas.size() >= 2, "level curve: need at least two samples");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    detail::require(lambdas[k] > 0 && std::isfinite(lambdas[k]), "level curve: lambda must be positive");
    detail::require(std::isfinite(i_values[k]), "level curve: i values must be finite");
    if (k > 0) detail::require(lambdas[k] > lambdas[k - 1], "level curve: lambda must be strictly increasing");
  }
  LevelCurve c;
  c.lambdas = lambdas;
  c.i_values = i_values;
  c.I_values.resize(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) c.I_values[k] = i_values[k] - lambdas[k];
  const auto& I = c.I_values;

  auto widen = [&](const char* why) {
    std::ostringstream os;
    os << "level curve: " << why << " in [" << lambdas.front() << ", " << lambdas.back()
       << "]; widen the sweep";
    throw ValidationError(os.str());
  };
  if (!(I.front() > 0)) widen("I is not positive at the smallest lambda");
  const auto first_nonpos = std::find_if(I.begin(), I.end(), [](double v) { return v <= 0; });
  const auto first_neg = std::find_if(I.begin(), I.end(), [](double v) { return v < 0; });
  if (first_neg == I.end()) widen("no sign change of I = i - lambda");

  // boundary between {I >= 0 / > 0} and {I <= 0 / < 0} on the interpolant
  auto crossing = [&](std::size_t k, bool strict) {
    double lo = std::log(lambdas[k - 1]), hi = std::log(lambdas[k]);
    auto past = [&](double x) {
      const double v = c.interpolate(std::exp(x));
      return strict ? v < 0 : v <= 0;
    };
    if (past(lo)) return lambdas[k - 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (past(mid) ? hi : lo) = mid;
    }
    return std::exp(hi);
  };
  const std::size_t ks = static_cast<std::size_t>(first_nonpos - I.begin());
  const std::size_t kss = static_cast<std::size_t>(first_neg - I.begin());
  c.lambda_star = I[ks] == 0 ? lambdas[ks] : crossing(ks, false);
  c.lambda_star_star = crossing(kss, true);

  int changes = 0;
  double last = 0;
  for (double v : I) {
    if (v == 0) continue;
    if (last != 0 && (v > 0) != (last > 0)) ++changes;
    last = v;
  }
  c.single_crossing = changes == 1;

  // argmax over samples in (0, lambda**)
  double best = -std::numeric_limits<double>::infinity();
  std::size_t kbest = 0;
  for (std::size_t k = 0; k < lambdas.size() && lambdas[k] < c.lambda_star_star; ++k)
    if (I[k] > best) {
      best = I[k];
      kbest = k;
    }
  for (std::size_t k = 0; k < lambdas.size() && lambdas[k] < c.lambda_star_star; ++k)
    if (I[k] >= best - tie_tol * std::abs(best)) c.argmax_set.push_back(k);

  if (c.argmax_set.size() > 1) {
    c.lambda_bar = 0.5 * (lambdas[c.argmax_set.front()] + lambdas[c.argmax_set.back()]);
    c.c_maxmin = std::max(best, c.interpolate(c.lambda_bar));
  } else {
    c.argmax_at_boundary = kbest == 0;
    const double a = std::log(lambdas[kbest == 0 ? 0 : kbest - 1]);
    const double b = std::log(std::min(lambdas[std::min(kbest + 1, lambdas.size() - 1)], c.lambda_star_star));
    if (b > a) {
      const auto [x, v] = detail::golden_max(detail::local_polynomial(lambdas, I, kbest), a, b);
      if (v > best) {
        c.lambda_bar = std::exp(x);
        c.c_maxmin = v;
      } else {
        c.lambda_bar = lambdas[kbest];
        c.c_maxmin = best;
      }
    } else {
      c.lambda_bar = lambdas[kbest];
      c.c_maxmin = best;
    }
  }
  return c;
}

/// Least-squares fit of log i = log a + s log lambda over the samples.
struct PowerLawFit {
  double coefficient = 0;  // a
  double exponent = 0;     // s
  /// argmax of a lambda^s - lambda, (s a)^{1/(1-s)}.
  double argmax() const { return std::pow(exponent * coefficient, 1.0 / (1.0 - exponent)); }
};

inline PowerLawFit fit_power_law(const std::vector<double>& lambdas, const std::vector<double>& i_values) {
  detail::require(lambdas.size() == i_values.size() && lambdas.size() >= 2, "power-law fit: need >= 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    detail::require(lambdas[k] > 0 && i_values[k] > 0, "power-law fit: samples must be positive");
    const double x = std::log(lambdas[k]), y = std::log(i_values[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double s = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::exp((sy - s * sx) / n), s};
}

}  // namespace mpmm
