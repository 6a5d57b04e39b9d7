#pragma once

// Run configuration (one JSON document), artifact serialization (CSV plot
// data and JSON summaries) and the error record written on failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "constrained_min.hpp"
#include "el_verify.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "level_curve.hpp"
#include "maxmin.hpp"
#include "mpa.hpp"
#include "problem.hpp"

namespace mpmm {

using json = nlohmann::json;

// ---------------------------------------------------------------- config

struct ProblemConfig {
  Variant variant = Variant::hardy_subcritical;
  double p = 2;
  int n = 5;
  std::optional<double> mu;
  std::optional<double> mu_fraction;  // of the Hardy constant, or of mu_p
  double m = 1;                        // linear coefficient of g
  std::optional<double> q;             // default (p + p*)/2, or 4 for the toy
  int d = 2;                           // toy dimension
  double R = 30;
  std::size_t grid_m = 800;
  double stretch = 1.05;
};

struct SweepConfig {
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<std::size_t> count;  // overrides points_per_decade
  double points_per_decade = 50;
  bool warm_start = true;
  bool refine = true;
};

struct RunConfig {
  ProblemConfig problem;
  SweepConfig sweep;
  MinimizeOptions minimize;
  MpaOptions mpa;
  double endpoint_factor = 2.0;  // MPA endpoint on gamma at factor x lambda**
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int multistart = 0;            // extra randomized seeds in cmd minimize
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read_opt(j, key, v);
  out = v;
}

}  // namespace detail

inline ProblemConfig problem_config_from_json(const json& j) {
  detail::require(j.is_object(), "config: 'problem' must be an object");
  detail::reject_unknown(j, {"variant", "p", "n", "mu", "mu_fraction", "m", "q", "d", "grid"}, "problem");
  ProblemConfig c;
  detail::require(j.contains("variant"), "config: problem.variant is required");
  c.variant = variant_from_string(j.at("variant").get<std::string>());
  if (c.variant == Variant::critical_bounded) c.R = 1.0;
  detail::read_opt(j, "p", c.p);
  detail::read_opt(j, "n", c.n);
  detail::read_opt(j, "mu", c.mu);
  detail::read_opt(j, "mu_fraction", c.mu_fraction);
  detail::read_opt(j, "m", c.m);
  detail::read_opt(j, "q", c.q);
  detail::read_opt(j, "d", c.d);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::require(g.is_object(), "config: problem.grid must be an object");
    detail::reject_unknown(g, {"R", "m", "stretch"}, "problem.grid");
    detail::read_opt(g, "R", c.R);
    detail::read_opt(g, "m", c.grid_m);
    detail::read_opt(g, "stretch", c.stretch);
  }
  detail::require(!(c.mu && c.mu_fraction), "config: give either mu or mu_fraction, not both");
  return c;
}

inline RunConfig run_config_from_json(const json& j) {
  detail::require(j.is_object(), "config: top level must be a JSON object");
  detail::reject_unknown(j, {"problem", "sweep", "minimize", "mpa", "output_dir", "seed", "multistart"}, "config");
  RunConfig c;
  detail::require(j.contains("problem"), "config: 'problem' block is required");
  c.problem = problem_config_from_json(j.at("problem"));
  if (c.problem.variant == Variant::toy) {
    c.minimize = MinimizeOptions::toy_defaults();
    c.mpa = MpaOptions::toy_defaults();
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::reject_unknown(s, {"lambda_min", "lambda_max", "count", "points_per_decade", "warm_start", "refine"},
                           "sweep");
    detail::read_opt(s, "lambda_min", c.sweep.lambda_min);
    detail::read_opt(s, "lambda_max", c.sweep.lambda_max);
    detail::read_opt(s, "count", c.sweep.count);
    detail::read_opt(s, "points_per_decade", c.sweep.points_per_decade);
    detail::read_opt(s, "warm_start", c.sweep.warm_start);
    detail::read_opt(s, "refine", c.sweep.refine);
    detail::require(c.sweep.points_per_decade > 0, "sweep: points_per_decade must be positive");
    detail::require(!c.sweep.count || *c.sweep.count >= 2, "sweep: count must be >= 2");
  }
  if (j.contains("minimize")) {
    const auto& s = j.at("minimize");
    detail::reject_unknown(s, {"max_iters", "grad_tol", "constraint_tol", "step", "backtrack"}, "minimize");
    detail::read_opt(s, "max_iters", c.minimize.max_iters);
    detail::read_opt(s, "grad_tol", c.minimize.grad_tol);
    detail::read_opt(s, "constraint_tol", c.minimize.constraint_tol);
    detail::read_opt(s, "step", c.minimize.step);
    detail::read_opt(s, "backtrack", c.minimize.backtrack);
  }
  c.minimize.validate();
  if (j.contains("mpa")) {
    const auto& s = j.at("mpa");
    detail::reject_unknown(s, {"interior", "step", "c_tol", "window", "max_sweeps", "endpoint_factor"}, "mpa");
    detail::read_opt(s, "interior", c.mpa.interior);
    detail::read_opt(s, "step", c.mpa.step);
    detail::read_opt(s, "c_tol", c.mpa.c_tol);
    detail::read_opt(s, "window", c.mpa.window);
    detail::read_opt(s, "max_sweeps", c.mpa.max_sweeps);
    detail::read_opt(s, "endpoint_factor", c.endpoint_factor);
  }
  detail::require(c.mpa.interior >= 16, "mpa: interior must be >= 16");
  detail::require(c.mpa.step > 0 && c.mpa.c_tol > 0, "mpa: step and c_tol must be positive");
  detail::require(c.mpa.window >= 1 && c.mpa.max_sweeps >= 1, "mpa: window and max_sweeps must be >= 1");
  detail::require(c.endpoint_factor > 1, "mpa: endpoint_factor must exceed 1");
  detail::read_opt(j, "output_dir", c.output_dir);
  detail::read_opt(j, "seed", c.seed);
  detail::read_opt(j, "multistart", c.multistart);
  detail::require(c.multistart >= 0, "config: multistart must be >= 0");
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

/// Builds and validates the problem the config describes. A mu_fraction is
/// taken of the Hardy constant (hardy-subcritical) or of the discrete mu_p
/// on the configured grid (critical-bounded).
inline ProblemSpec build_problem(const ProblemConfig& c) {
  if (c.variant == Variant::toy) return ProblemSpec::toy(ToyProblem{c.d, c.q.value_or(4.0)});
  detail::require(c.p > 1 && c.n >= 1 && c.p < c.n, "problem: need 1 < p < n");
  auto grid = build_radial_grid(c.n, c.R, c.grid_m, c.stretch);
  if (c.variant == Variant::hardy_subcritical) {
    const double pstar = critical_exponent(c.p, c.n);
    const double q = c.q.value_or(0.5 * (c.p + pstar));
    const double mu = c.mu_fraction ? *c.mu_fraction * hardy_constant(c.p, c.n) : c.mu.value_or(0.0);
    return ProblemSpec::hardy_subcritical(c.p, c.n, mu, NonlinearitySpec(c.m, q), grid);
  }
  detail::require(c.p > 1 && c.p * c.p < c.n, "critical-bounded needs 1 < p^2 < n");
  const auto est = estimate_mu_p(*grid, c.p);
  if (!est.converged) throw ConvergenceError("mu_p estimate did not converge");
  detail::require(c.mu || c.mu_fraction, "critical-bounded needs mu or mu_fraction");
  const double mu = c.mu_fraction ? *c.mu_fraction * est.value : *c.mu;
  return ProblemSpec::critical_bounded(c.p, c.n, mu, grid, est.value);
}

// ----------------------------------------------------------- JSON forms

inline json to_json(const RadialGrid& g) {
  return {{"n", g.n()},
          {"R", g.R()},
          {"m", g.size()},
          {"stretch", g.stretch()},
          {"nodes", std::vector<double>(g.nodes().begin(), g.nodes().end())},
          {"weights", std::vector<double>(g.weights().begin(), g.weights().end())}};
}

inline GridPtr grid_from_json(const json& j) {
  try {
    const auto nodes = j.at("nodes").get<std::vector<double>>();
    detail::require(nodes.size() == j.at("m").get<std::size_t>(), "grid: m does not match the node count");
    return std::make_shared<const RadialGrid>(grid_from_nodes(j.at("n").get<int>(), j.at("R").get<double>(),
                                                               j.at("stretch").get<double>(), nodes));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("grid: malformed JSON: ") + e.what());
  }
}

inline json to_json(const ProblemSpec& s) {
  json j{{"variant", to_string(s.variant())}};
  if (s.variant() == Variant::toy) {
    j["d"] = s.toy_problem().d;
    j["q"] = s.toy_problem().q;
    return j;
  }
  j["p"] = s.p();
  j["n"] = s.n();
  j["mu"] = s.mu();
  j["pstar"] = s.pstar();
  if (s.variant() == Variant::hardy_subcritical) {
    j["m"] = s.nonlinearity().m();
    j["q"] = s.nonlinearity().q();
    j["hardy_constant"] = hardy_constant(s.p(), s.n());
  } else {
    j["mu_p"] = s.mu_p();
  }
  j["grid"] = {{"R", s.grid()->R()}, {"m", s.grid()->size()}, {"stretch", s.grid()->stretch()}};
  return j;
}

template <class Point>
json to_json(const MinimizeResult<Point>& r) {
  return {{"lambda", r.lambda},         {"i_value", r.i_value},       {"multiplier", r.multiplier},
          {"iterations", r.iterations}, {"converged", r.converged},   {"residual", r.residual},
          {"constraint_error", r.constraint_error}};
}

inline json to_json(const LevelCurve& c, const LambdaBarForms& forms) {
  return {{"lambda_star", c.lambda_star},
          {"lambda_star_star", c.lambda_star_star},
          {"lambda_bar", c.lambda_bar},
          {"c_maxmin", c.c_maxmin},
          {"published_lambda_bar", forms.published_formula},
          {"derived_lambda_bar", forms.derived_argmax},
          {"argmax_set_size", c.argmax_set.size()},
          {"single_crossing", c.single_crossing},
          {"argmax_at_boundary", c.argmax_at_boundary}};
}

// ------------------------------------------------------------ artifacts

/// Output directory holding every artifact of one run.
class ArtifactDir {
public:
  explicit ArtifactDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_))
      throw IoError("cannot create output directory '" + root_.string() + "'");
  }

  const std::filesystem::path& root() const { return root_; }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(root_ / name);
    if (!out) throw IoError("cannot write '" + (root_ / name).string() + "'");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
  }

  void write_json(const std::string& name, const json& j) const {
    auto out = open(name);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + name + "'");
  }

private:
  std::filesystem::path root_;
};

inline void write_point_csv(std::ostream& out, const GridFunction& u) {
  out << "r,value\n";
  for (std::size_t k = 0; k < u.size(); ++k) out << u.grid->node(k) << ',' << u.values[k] << '\n';
}

inline void write_point_csv(std::ostream& out, const std::vector<double>& u) {
  out << "index,value\n";
  for (std::size_t k = 0; k < u.size(); ++k) out << k << ',' << u[k] << '\n';
}

template <class Point>
void write_sweep_csv(std::ostream& out, const std::vector<SweepEntry<Point>>& sweep) {
  out << "lambda,i_value,multiplier,iterations,converged,residual\n";
  for (const auto& e : sweep) {
    const auto& r = e.result;
    out << r.lambda << ',' << r.i_value << ',' << r.multiplier << ',' << r.iterations << ','
        << (e.error.empty() && r.converged ? 1 : 0) << ',' << r.residual << '\n';
  }
}

inline void write_level_curve_csv(std::ostream& out, const LevelCurve& c) {
  out << "lambda,i,I\n";
  for (std::size_t k = 0; k < c.lambdas.size(); ++k)
    out << c.lambdas[k] << ',' << c.i_values[k] << ',' << c.I_values[k] << '\n';
}

template <class Point>
void write_trace_csv(std::ostream& out, const McEstimate<Point>& est) {
  out << "sweep,max_energy,argmax_index\n";
  for (const auto& row : est.trace) out << row.sweep << ',' << row.max_energy << ',' << row.argmax_index << '\n';
}

inline void write_path_csv(std::ostream& out, const std::vector<PathSample>& path) {
  out << "lambda,F,T,U\n";
  for (const auto& s : path) out << s.lambda << ',' << s.F << ',' << s.T << ',' << s.U << '\n';
}

/// Minimal CSV reader for round-trip checks: header plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV '" + path.string() + "'");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("non-numeric cell '" + cell + "' in '" + path.string() + "'");
      }
    }
    if (row.size() != t.header.size()) throw IoError("ragged row in '" + path.string() + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace mpmm
