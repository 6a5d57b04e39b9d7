#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"
#include "rayleigh.hpp"
#include "toy.hpp"

namespace mpmm {

enum class Variant { hardy_subcritical, critical_bounded, toy };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::hardy_subcritical: return "hardy-subcritical";
    case Variant::critical_bounded: return "critical-bounded";
    case Variant::toy: return "toy";
  }
  return "?";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "hardy-subcritical") return Variant::hardy_subcritical;
  if (s == "critical-bounded") return Variant::critical_bounded;
  if (s == "toy") return Variant::toy;
  throw ValidationError("unknown variant '" + s + "'");
}

/// ((n-p)/p)^p, the sharp constant of the Hardy inequality.
inline double hardy_constant(double p, int n) {
  detail::require(p > 1 && p < n, "hardy constant needs 1 < p < n");
  return std::pow((n - p) / p, p);
}

/// np / (n - p).
inline double critical_exponent(double p, int n) {
  detail::require(p < n, "critical exponent needs p < n");
  return n * p / (n - p);
}

/// A validated variational problem. Construction runs every admissibility
/// check and throws ValidationError on the first failure.
class ProblemSpec {
public:
  /// T(u) = (1/p) int |grad u|^p - mu |x|^-p |u|^p,  U(u) = int G(u), on B_R
  /// with u(R) = 0.
  static ProblemSpec hardy_subcritical(double p, int n, double mu, NonlinearitySpec g, GridPtr grid) {
    ProblemSpec s;
    s.variant_ = Variant::hardy_subcritical;
    s.p_ = p;
    s.n_ = n;
    s.mu_ = mu;
    detail::require(p > 1 && p < n, "hardy-subcritical needs 1 < p < n");
    s.pstar_ = critical_exponent(p, n);
    const double ch = hardy_constant(p, n);
    if (!(mu >= 0 && mu < ch)) {
      std::ostringstream os;
      os << "hardy-subcritical needs 0 <= mu < ((n-p)/p)^p = " << ch << ", got mu = " << mu;
      throw ValidationError(os.str());
    }
    const std::string bad = g.check_conditions(s.pstar_);
    detail::require(bad.empty(), "nonlinearity: " + bad);
    detail::require(g.q() > p, "nonlinearity: q must exceed p");
    s.g_ = g;
    s.attach_grid(std::move(grid));
    s.singular_ = s.grid_->singular_weights(p);
    return s;
  }

  /// T(u) = (1/p) int |grad u|^p - mu |u|^p,  U(u) = (1/p*) int |u|^{p*},
  /// on the ball Omega = B_R with u = 0 on its boundary.
  static ProblemSpec critical_bounded(double p, int n, double mu, GridPtr grid,
                                      std::optional<double> known_mu_p = std::nullopt) {
    ProblemSpec s;
    s.variant_ = Variant::critical_bounded;
    s.p_ = p;
    s.n_ = n;
    s.mu_ = mu;
    detail::require(p > 1 && p * p < n, "critical-bounded needs 1 < p^2 < n");
    s.pstar_ = critical_exponent(p, n);
    s.attach_grid(std::move(grid));
    if (known_mu_p) {
      s.mu_p_ = *known_mu_p;
    } else {
      const auto est = estimate_mu_p(*s.grid_, p);
      if (!est.converged) {
        std::ostringstream os;
        os << "mu_p estimate did not converge (best " << est.value << ")";
        throw ConvergenceError(os.str());
      }
      s.mu_p_ = est.value;
    }
    if (!(mu > 0 && mu < s.mu_p_)) {
      std::ostringstream os;
      os << "critical-bounded needs 0 < mu < mu_p = " << s.mu_p_ << ", got mu = " << mu;
      throw ValidationError(os.str());
    }
    return s;
  }

  static ProblemSpec toy(ToyProblem t) {
    t.validate();
    ProblemSpec s;
    s.variant_ = Variant::toy;
    s.toy_ = t;
    s.p_ = 2;
    s.n_ = t.d;
    s.pstar_ = t.q;
    return s;
  }

  Variant variant() const { return variant_; }
  double p() const { return p_; }
  int n() const { return n_; }
  double mu() const { return mu_; }
  double pstar() const { return pstar_; }
  const NonlinearitySpec& nonlinearity() const { return g_; }
  const GridPtr& grid() const { return grid_; }
  const ToyProblem& toy_problem() const { return toy_; }
  /// Cell weights for the |x|^{-p} potential (hardy-subcritical only).
  const std::vector<double>& singular_weights() const { return singular_; }
  /// Discrete mu_p on this grid (critical-bounded only).
  double mu_p() const { return mu_p_; }
  /// Both PDE variants pin u at the outer node.
  bool dirichlet() const { return variant_ != Variant::toy; }

  /// Exponent s of the scaling law i_lambda = lambda^s i_1.
  double scaling_exponent() const {
    switch (variant_) {
      case Variant::hardy_subcritical: return 1.0 - p_ / n_;
      case Variant::critical_bounded: return p_ / pstar_;
      case Variant::toy: return 2.0 / toy_.q;
    }
    return 0;
  }

private:
  void attach_grid(GridPtr grid) {
    detail::require(grid != nullptr, "problem needs a grid");
    detail::require(grid->n() == n_, "grid dimension does not match problem dimension");
    detail::require(grid->size() >= 8, "problem grid needs at least 8 nodes");
    grid_ = std::move(grid);
  }

  Variant variant_ = Variant::toy;
  double p_ = 2;
  int n_ = 1;
  double mu_ = 0;
  double pstar_ = 0;
  double mu_p_ = 0;
  NonlinearitySpec g_;
  GridPtr grid_;
  ToyProblem toy_;
  std::vector<double> singular_;
};

}  // namespace mpmm
