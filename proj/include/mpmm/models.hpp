#pragma once

// Energy models: the common surface the generic engines (constrained
// minimization, level curves, mountain-pass deformation, verification)
// are written against.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <memory>
#include <vector>

#include "discrete_ops.hpp"
#include "functionals.hpp"
#include "problem.hpp"
#include "toy.hpp"

namespace mpmm {

/// beta -> c1 beta^e1 + c2 beta^e2; the exact amplitude profile of U for
/// every model here.
struct AmplitudeCurve {
  double c1 = 0, e1 = 2, c2 = 0, e2 = 2;
  double operator()(double beta) const { return c1 * std::pow(beta, e1) + c2 * std::pow(beta, e2); }
};

template <class M>
concept EnergyModel = requires(const M& m, const typename M::point_type& u, double s) {
  { m.T(u) } -> std::convertible_to<double>;
  { m.U(u) } -> std::convertible_to<double>;
  { m.F(u) } -> std::convertible_to<double>;
  // Riesz representers for the model's quadrature pairing.
  { m.grad_T(u) } -> std::same_as<typename M::point_type>;
  { m.grad_U(u) } -> std::same_as<typename M::point_type>;
  { m.inner(u, u) } -> std::convertible_to<double>;
  // Maps a gradient to the descent metric (identity for Euclidean models);
  // the scalar is the current Lagrange multiplier, 1 for F = T - U.
  { m.precondition(u, s) } -> std::same_as<typename M::point_type>;
  { m.combine(s, u, s, u) } -> std::same_as<typename M::point_type>;
  // The natural group action carrying level lambda_from to lambda_to.
  { m.transport(u, s, s) } -> std::same_as<typename M::point_type>;
  { m.zero() } -> std::same_as<typename M::point_type>;
  // beta -> U(beta u)
  { m.amplitude_curve(u) } -> std::same_as<AmplitudeCurve>;
  { m.seed() } -> std::same_as<typename M::point_type>;
  { m.scaling_exponent() } -> std::convertible_to<double>;
};

template <EnergyModel M>
double norm(const M& m, const typename M::point_type& u) {
  return std::sqrt(m.inner(u, u));
}

template <EnergyModel M>
double distance(const M& m, const typename M::point_type& a, const typename M::point_type& b) {
  return norm(m, m.combine(1.0, a, -1.0, b));
}

/// Radial p-Laplacian problems on a RadialGrid.
class RadialModel {
public:
  using point_type = GridFunction;

  explicit RadialModel(ProblemSpec spec)
      : spec_(std::make_shared<const ProblemSpec>(std::move(spec))) {
    detail::require(spec_->variant() != Variant::toy, "RadialModel needs a PDE variant");
    gram_ = detail::gram_matrix(*spec_->grid(), 1.0, spec_->dirichlet());
  }

  const ProblemSpec& spec() const { return *spec_; }
  const GridPtr& grid() const { return spec_->grid(); }

  double T(const GridFunction& u) const { return eval_T(*spec_, u); }
  double U(const GridFunction& u) const { return eval_U(*spec_, u); }
  double F(const GridFunction& u) const { return eval_F(*spec_, u); }
  GridFunction grad_T(const GridFunction& u) const { return mpmm::grad_T(*spec_, u); }
  GridFunction grad_U(const GridFunction& u) const { return mpmm::grad_U(*spec_, u); }
  double inner(const GridFunction& a, const GridFunction& b) const { return weighted_inner(a, b); }

  /// Solves (K + c M) s = M g with K the link stiffness and M = diag(w).
  /// The mass coefficient c tracks the zero-order part of the Hessian of
  /// T - theta U: max(1, theta m) for hardy-subcritical, 1 otherwise.
  GridFunction precondition(const GridFunction& g, double theta = 1.0) const {
    const auto w = grid()->weights();
    std::vector<double> rhs(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) rhs[k] = w[k] * g.values[k];
    if (spec_->dirichlet()) rhs.back() = 0;
    double c = 1.0;
    if (spec_->variant() == Variant::hardy_subcritical) c = std::max(1.0, theta * spec_->nonlinearity().m());
    if (c == 1.0) return GridFunction(grid(), gram_.solve(rhs));
    return GridFunction(grid(), detail::gram_matrix(*grid(), c, spec_->dirichlet()).solve(rhs));
  }

  GridFunction combine(double a, const GridFunction& x, double b, const GridFunction& y) const {
    GridFunction out(grid());
    for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = a * x.values[k] + b * y.values[k];
    return out;
  }

  /// Dilation by (lambda_to/lambda_from)^{1/n} for hardy-subcritical
  /// (U scales like beta^n), amplitude (lambda_to/lambda_from)^{1/p*} for
  /// critical-bounded (U scales like beta^{p*}).
  GridFunction transport(const GridFunction& u, double lambda_from, double lambda_to) const {
    detail::require(lambda_from > 0 && lambda_to > 0, "transport needs positive levels");
    const double ratio = lambda_to / lambda_from;
    GridFunction out;
    if (spec_->variant() == Variant::hardy_subcritical) {
      out = apply_scaling(u, {ScalingAction::Kind::dilation, std::pow(ratio, 1.0 / spec_->n())});
    } else {
      out = apply_scaling(u, {ScalingAction::Kind::amplitude, std::pow(ratio, 1.0 / spec_->pstar())});
    }
    pin(out);
    return out;
  }

  GridFunction zero() const { return GridFunction(grid()); }

  /// beta -> U(beta u) in closed form.
  AmplitudeCurve amplitude_curve(const GridFunction& u) const {
    if (spec_->variant() == Variant::critical_bounded) return {0, 2, U(u), spec_->pstar()};
    const auto w = grid()->weights();
    const auto& g = spec_->nonlinearity();
    double quad = 0, high = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      quad += w[k] * u.values[k] * u.values[k];
      high += w[k] * std::pow(std::abs(u.values[k]), g.q());
    }
    return {-0.5 * g.m() * quad, 2, high / g.q(), g.q()};
  }

  /// exp(-(r/l)^2) with l = min(1, R/3), pinned at R.
  GridFunction seed() const {
    const double ell = std::min(1.0, grid()->R() / 3.0);
    auto u = sample(grid(), [ell](double r) { return std::exp(-(r / ell) * (r / ell)); });
    pin(u);
    return u;
  }

  double scaling_exponent() const { return spec_->scaling_exponent(); }

  void pin(GridFunction& u) const {
    if (spec_->dirichlet()) u.values.back() = 0;
  }

private:
  std::shared_ptr<const ProblemSpec> spec_;
  detail::Tridiagonal gram_;
};

/// X = R^d with T = |u|^2 and U = |u|^q.
class ToyModel {
public:
  using point_type = std::vector<double>;

  explicit ToyModel(ToyProblem prob) : prob_(prob) { prob_.validate(); }

  const ToyProblem& problem() const { return prob_; }

  double T(const point_type& u) const { return norm2(u); }
  double U(const point_type& u) const { return std::pow(norm2(u), 0.5 * prob_.q); }
  double F(const point_type& u) const { return T(u) - U(u); }
  point_type grad_T(const point_type& u) const { return scaled(2.0, u); }
  point_type grad_U(const point_type& u) const {
    const double r2 = norm2(u);
    if (r2 == 0) return zero();
    return scaled(prob_.q * std::pow(r2, 0.5 * (prob_.q - 2)), u);
  }
  double inner(const point_type& a, const point_type& b) const {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  point_type precondition(const point_type& g, double = 1.0) const { return g; }
  point_type combine(double a, const point_type& x, double b, const point_type& y) const {
    point_type out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
  }
  point_type transport(const point_type& u, double lambda_from, double lambda_to) const {
    detail::require(lambda_from > 0 && lambda_to > 0, "transport needs positive levels");
    return scaled(std::pow(lambda_to / lambda_from, 1.0 / prob_.q), u);
  }
  point_type zero() const { return point_type(static_cast<std::size_t>(prob_.d), 0.0); }
  AmplitudeCurve amplitude_curve(const point_type& u) const { return {0, 2, U(u), prob_.q}; }
  /// First unit vector.
  point_type seed() const {
    auto e = zero();
    e[0] = 1.0;
    return e;
  }
  double scaling_exponent() const { return 2.0 / prob_.q; }

private:
  static double norm2(const point_type& u) {
    double s = 0;
    for (double x : u) s += x * x;
    return s;
  }
  static point_type scaled(double a, const point_type& u) {
    point_type out(u);
    for (double& x : out) x *= a;
    return out;
  }

  ToyProblem prob_;
};

static_assert(EnergyModel<RadialModel>);
static_assert(EnergyModel<ToyModel>);

}  // namespace mpmm
