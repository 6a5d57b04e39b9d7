#pragma once

// Link-difference energies on a radial grid and the tridiagonal H^1 Gram
// matrix used to precondition every descent in the library.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "grid.hpp"

namespace mpmm::detail {

/// Regularization of |t|^{p-2} t for p < 2, applied only inside gradients.
inline constexpr double kGradientDelta = 1e-10;

inline double signed_power(double t, double p) {
  // |t|^{p-2} t
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

inline double signed_power_regularized(double t, double p) {
  if (p >= 2.0) return signed_power(t, p);
  return std::pow(t * t + kGradientDelta * kGradientDelta, 0.5 * (p - 2.0)) * t;
}

/// sum_k L_k |(u_{k+1} - u_k) / (r_{k+1} - r_k)|^p
inline double link_energy(const RadialGrid& g, std::span<const double> u, double p) {
  const auto r = g.nodes();
  const auto L = g.link_weights();
  double s = 0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double d = (u[k + 1] - u[k]) / (r[k + 1] - r[k]);
    s += L[k] * std::pow(std::abs(d), p);
  }
  return s;
}

/// Adds coef * d/du link_energy to out (raw partial derivatives).
inline void add_link_energy_partials(const RadialGrid& g, std::span<const double> u, double p,
                                     double coef, std::span<double> out) {
  const auto r = g.nodes();
  const auto L = g.link_weights();
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double h = r[k + 1] - r[k];
    const double d = (u[k + 1] - u[k]) / h;
    const double flux = coef * p * L[k] * signed_power_regularized(d, p) / h;
    out[k] -= flux;
    out[k + 1] += flux;
  }
}

/// Symmetric tridiagonal matrix; sub[k] couples rows k and k+1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> sub;

  /// Solves A x = b by the Thomas algorithm. A must be SPD.
  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t m = diag.size();
    std::vector<double> c(m, 0.0), x(b.begin(), b.end());
    double denom = diag[0];
    if (m > 1) c[0] = sub[0] / denom;
    x[0] /= denom;
    for (std::size_t k = 1; k < m; ++k) {
      denom = diag[k] - sub[k - 1] * c[k - 1];
      if (k + 1 < m) c[k] = sub[k] / denom;
      x[k] = (x[k] - sub[k - 1] * x[k - 1]) / denom;
    }
    for (std::size_t k = m - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
    return x;
  }

  std::vector<double> apply(std::span<const double> x) const {
    const std::size_t m = diag.size();
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k) {
      y[k] = diag[k] * x[k];
      if (k > 0) y[k] += sub[k - 1] * x[k - 1];
      if (k + 1 < m) y[k] += sub[k] * x[k + 1];
    }
    return y;
  }
};

/// Stiffness of sum_k L_k D_k^2 plus mass_coef * diag(w). With dirichlet,
/// the last node is decoupled (unit diagonal) so solves leave it at b_{m-1}.
inline Tridiagonal gram_matrix(const RadialGrid& g, double mass_coef, bool dirichlet) {
  const std::size_t m = g.size();
  const auto r = g.nodes();
  const auto L = g.link_weights();
  const auto w = g.weights();
  Tridiagonal A;
  A.diag.assign(m, 0.0);
  A.sub.assign(m - 1, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = r[k + 1] - r[k];
    const double c = L[k] / (h * h);
    A.diag[k] += c;
    A.diag[k + 1] += c;
    A.sub[k] = -c;
  }
  for (std::size_t k = 0; k < m; ++k) A.diag[k] += mass_coef * w[k];
  if (dirichlet) {
    A.diag[m - 1] = 1.0;
    A.sub[m - 2] = 0.0;
  }
  return A;
}

}  // namespace mpmm::detail
