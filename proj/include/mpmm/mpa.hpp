#pragma once

// Mountain-pass level from its definition, c = inf over paths from 0 to a
// negative-energy point of the max of F along the path: a discretized path
// (string) is relaxed by damped preconditioned steepest descent of F on its
// interior images, followed by equal arc-length resampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "level_curve.hpp"
#include "models.hpp"
#include "parallel.hpp"

namespace mpmm {

template <class Point>
struct DiscretePath {
  std::vector<Point> points;   // points.front() is 0, F(points.back()) < 0
  std::vector<double> energies;

  std::size_t size() const { return points.size(); }
  double endpoint_energy() const { return energies.back(); }
};

/// Path through the given waypoints (0 first, admissible endpoint last),
/// with interior + 2 points spread uniformly in the polyline parameter.
template <EnergyModel M>
DiscretePath<typename M::point_type> init_polyline_path(const M& model,
                                                        const std::vector<typename M::point_type>& waypoints,
                                                        std::size_t interior) {
  detail::require(interior >= 16, "path: need at least 16 interior points");
  detail::require(waypoints.size() >= 2, "path: need at least two waypoints");
  detail::require(norm(model, waypoints.front()) == 0, "path: must start at 0");
  detail::require(model.F(waypoints.back()) < 0, "path: endpoint must have F < 0 to be admissible");
  DiscretePath<typename M::point_type> path;
  const std::size_t count = interior + 2;
  const double legs = static_cast<double>(waypoints.size() - 1);
  for (std::size_t j = 0; j < count; ++j) {
    const double x = legs * static_cast<double>(j) / static_cast<double>(count - 1);
    const auto leg = std::min(static_cast<std::size_t>(x), waypoints.size() - 2);
    const double t = x - static_cast<double>(leg);
    path.points.push_back(model.combine(1.0 - t, waypoints[leg], t, waypoints[leg + 1]));
  }
  path.points.front() = waypoints.front();
  path.points.back() = waypoints.back();
  path.energies.resize(count);
  for (std::size_t j = 0; j < count; ++j) path.energies[j] = model.F(path.points[j]);
  return path;
}

/// Straight path from 0 to the endpoint.
template <EnergyModel M>
DiscretePath<typename M::point_type> init_path(const M& model, const typename M::point_type& endpoint,
                                               std::size_t interior) {
  return init_polyline_path(model, {model.zero(), endpoint}, interior);
}

template <class Point>
struct PathMaximum {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t image = 0;  // index of the highest image
  Point point;            // location of the refined maximum on the polyline
};

/// sup of F over the polyline: every segment is scanned at a few interior
/// points, then the best segment is polished by golden section on its
/// neighbourhood. Images alone can miss a barrier that lies between them.
template <EnergyModel M>
PathMaximum<typename M::point_type> path_maximum(const M& model, const DiscretePath<typename M::point_type>& path,
                                                 int samples_per_segment = 8) {
  PathMaximum<typename M::point_type> out;
  const auto& E = path.energies;
  const std::size_t j = static_cast<std::size_t>(std::max_element(E.begin(), E.end()) - E.begin());
  out.image = j;
  out.value = E[j];
  out.point = path.points[j];
  const std::size_t segments = path.size() - 1;
  std::vector<double> best_t(segments, 0.0), best_v(segments, -std::numeric_limits<double>::infinity());
  parallel_for(segments, [&](std::size_t seg) {
    const auto& a = path.points[seg];
    const auto& b = path.points[seg + 1];
    for (int i = 1; i < samples_per_segment; ++i) {
      const double t = static_cast<double>(i) / samples_per_segment;
      const double v = model.F(model.combine(1.0 - t, a, t, b));
      if (v > best_v[seg]) { best_v[seg] = v; best_t[seg] = t; }
    }
  });
  const std::size_t top = static_cast<std::size_t>(std::max_element(best_v.begin(), best_v.end()) - best_v.begin());
  // polish the best sampled segment and the two touching the highest image
  std::vector<std::size_t> candidates{top};
  if (j > 0) candidates.push_back(j - 1);
  if (j < segments) candidates.push_back(j);
  for (std::size_t seg : candidates) {
    const auto& a = path.points[seg];
    const auto& b = path.points[seg + 1];
    auto along = [&](double t) { return model.F(model.combine(1.0 - t, a, t, b)); };
    const auto [t, v] = detail::golden_max(along, 0.0, 1.0, 1e-10);
    if (v > out.value) {
      out.value = v;
      out.point = model.combine(1.0 - t, a, t, b);
      out.image = E[seg] >= E[seg + 1] ? seg : seg + 1;
    }
    if (best_v[seg] > out.value) {
      out.value = best_v[seg];
      out.point = model.combine(1.0 - best_t[seg], a, best_t[seg], b);
      out.image = E[seg] >= E[seg + 1] ? seg : seg + 1;
    }
  }
  return out;
}

namespace detail {

/// Piecewise-linear resampling to equal arc length in the model's norm.
template <EnergyModel M>
std::vector<typename M::point_type> resample_uniform(const M& model,
                                                     const std::vector<typename M::point_type>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) s[j] = s[j - 1] + distance(model, pts[j], pts[j - 1]);
  const double total = s.back();
  if (!(total > 0)) return pts;
  std::vector<typename M::point_type> out;
  out.reserve(n);
  out.push_back(pts.front());
  std::size_t seg = 1;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n - 1);
    while (seg < n - 1 && s[seg] < target) ++seg;
    const double len = s[seg] - s[seg - 1];
    const double t = len > 0 ? std::clamp((target - s[seg - 1]) / len, 0.0, 1.0) : 0.0;
    out.push_back(model.combine(1.0 - t, pts[seg - 1], t, pts[seg]));
  }
  out.push_back(pts.back());
  return out;
}

}  // namespace detail

struct MpaOptions {
  std::size_t interior = 30;
  double step = 0.5;
  double min_step = 1e-12;
  double c_tol = 1e-3;     // relative improvement over `window` sweeps
  int window = 10;
  int max_sweeps = 10000;

  static MpaOptions toy_defaults() {
    MpaOptions o;
    o.c_tol = 1e-6;
    return o;
  }
};

template <class Point>
struct DeformResult {
  DiscretePath<Point> path;
  double step = 0;       // step actually used
  bool stagnant = false; // no non-increasing sweep found above min_step
};

/// One accepted sweep: every interior image with F >= 0 takes a damped
/// descent step on F, then the path is resampled. Images already below
/// zero stay put; F is unbounded below, so letting them slide would fold
/// the path back over its endpoint. A sweep that raises the path maximum
/// is rejected and retried at half the step. Endpoints never move.
template <EnergyModel M>
DeformResult<typename M::point_type> deform(const M& model, const DiscretePath<typename M::point_type>& path,
                                            double step, double min_step = 1e-12) {
  using Point = typename M::point_type;
  detail::require(path.size() >= 3, "deform: path too short");
  const double before = path_maximum(model, path).value;
  const std::size_t n = path.size();
  std::vector<Point> descent(n);
  parallel_for(n - 2, [&](std::size_t i) {
    if (path.energies[i + 1] < 0) return;
    const auto& u = path.points[i + 1];
    descent[i + 1] = model.precondition(model.combine(1.0, model.grad_T(u), -1.0, model.grad_U(u)), 1.0);
  });
  // no image may travel more than half the mean image spacing per sweep
  double length = 0;
  for (std::size_t j = 1; j < n; ++j) length += distance(model, path.points[j], path.points[j - 1]);
  const double reach = 0.5 * length / static_cast<double>(n - 1);
  std::vector<double> dnorm(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j)
    if (path.energies[j] >= 0) dnorm[j] = norm(model, descent[j]);
  for (double s = step; s >= min_step; s *= 0.5) {
    std::vector<Point> moved(path.points);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      if (path.energies[j] < 0) continue;
      const double sj = dnorm[j] * s > reach ? reach / dnorm[j] : s;
      moved[j] = model.combine(1.0, path.points[j], -sj, descent[j]);
    }
    DiscretePath<Point> next;
    next.points = detail::resample_uniform(model, moved);
    next.energies.resize(n);
    parallel_for(n, [&](std::size_t j) { next.energies[j] = model.F(next.points[j]); });
    const double after = path_maximum(model, next).value;
    if (after <= before + 1e-14 * std::abs(before)) return {std::move(next), s, false};
  }
  return {path, 0.0, true};
}

template <class Point>
struct McEstimate {
  double c_mpa = 0;
  Point argmax_point;
  int sweeps = 0;
  bool converged = false;
  bool stagnant = false;
  DiscretePath<Point> path;
  struct TraceRow {
    int sweep;
    double max_energy;
    std::size_t argmax_index;
  };
  std::vector<TraceRow> trace;
};

/// Deforms the given admissible path until the path maximum improves by
/// less than c_tol (relative) over `window` sweeps.
template <EnergyModel M>
McEstimate<typename M::point_type> estimate_c(const M& model, DiscretePath<typename M::point_type> start,
                                              const MpaOptions& opts = {}) {
  detail::require(start.size() >= 18, "path: need at least 16 interior points");
  detail::require(start.endpoint_energy() < 0, "path: endpoint must have F < 0 to be admissible");
  McEstimate<typename M::point_type> out;
  out.path = std::move(start);
  auto top = path_maximum(model, out.path);
  out.trace.push_back({0, top.value, top.image});
  std::vector<double> history{top.value};
  double step = opts.step;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    auto res = deform(model, out.path, step, opts.min_step);
    if (res.stagnant) {
      out.stagnant = true;
      break;
    }
    out.path = std::move(res.path);
    step = std::min(opts.step, 1.5 * res.step);
    top = path_maximum(model, out.path);
    out.sweeps = sweep;
    out.trace.push_back({sweep, top.value, top.image});
    history.push_back(top.value);
    if (static_cast<int>(history.size()) > opts.window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(opts.window)];
      if (old - top.value <= opts.c_tol * std::abs(top.value)) {
        out.converged = true;
        break;
      }
    }
  }
  out.c_mpa = top.value;
  out.argmax_point = top.point;
  return out;
}

template <EnergyModel M>
McEstimate<typename M::point_type> estimate_c(const M& model, const typename M::point_type& endpoint,
                                              const MpaOptions& opts = {}) {
  return estimate_c(model, init_path(model, endpoint, opts.interior), opts);
}

/// Levels lambda for which U along the path never straddles lambda
/// between consecutive images (an empty result means every level is
/// crossed).
template <EnergyModel M>
std::vector<double> uncrossed_levels(const M& model, const DiscretePath<typename M::point_type>& path,
                                     const std::vector<double>& levels) {
  std::vector<double> U(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) U[j] = model.U(path.points[j]);
  std::vector<double> missing;
  for (double lambda : levels) {
    bool crossed = false;
    for (std::size_t j = 1; j < U.size() && !crossed; ++j)
      crossed = (U[j - 1] - lambda) * (U[j] - lambda) <= 0;
    if (!crossed) missing.push_back(lambda);
  }
  return missing;
}

}  // namespace mpmm
