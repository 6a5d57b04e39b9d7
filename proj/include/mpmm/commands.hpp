#pragma once

// The six CLI commands. Each reads a RunConfig, runs one pipeline and
// writes its artifacts into the output directory. Failures are mapped to
// exit codes and recorded in error.json.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "el_verify.hpp"
#include "io.hpp"
#include "maxmin.hpp"
#include "models.hpp"
#include "mpa.hpp"
#include "toy.hpp"

namespace mpmm {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitConvergence = 3, kExitIo = 4 };

struct CommandArgs {
  std::string command;
  std::filesystem::path config;
  std::optional<double> lambda;
  std::optional<std::string> out;
  std::optional<double> q;  // toy overrides
  std::optional<int> d;
};

namespace detail {

inline MaxMinOptions maxmin_options(const RunConfig& cfg) {
  MaxMinOptions o;
  o.lambda_min = cfg.sweep.lambda_min;
  o.lambda_max = cfg.sweep.lambda_max;
  o.points_per_decade = cfg.sweep.points_per_decade;
  o.refine = cfg.sweep.refine;
  o.sweep.minimize = cfg.minimize;
  o.sweep.warm_start = cfg.sweep.warm_start;
  return o;
}

/// Randomized seeds for the multi-start diagnostic.
inline GridFunction random_seed(const RadialModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> width(0.5, 2.0), amp(0.5, 2.0);
  const double ell = std::min(width(rng), model.grid()->R() / 3.0);
  const double a = amp(rng);
  auto u = sample(model.grid(), [&](double r) { return a * std::exp(-(r / ell) * (r / ell)); });
  model.pin(u);
  return u;
}

inline std::vector<double> random_seed(const ToyModel& model, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  auto u = model.zero();
  for (double& x : u) x = gauss(rng);
  return u;
}

inline json tail_report(const GridFunction& u) { return tail_is_small(u); }
inline json tail_report(const std::vector<double>&) { return nullptr; }

template <class Run>
void write_maxmin_artifacts(const ArtifactDir& dir, const Run& run) {
  {
    auto out = dir.open("sweep.csv");
    write_sweep_csv(out, run.sweep);
  }
  {
    auto out = dir.open("level_curve.csv");
    write_level_curve_csv(out, run.curve);
  }
  {
    auto out = dir.open("minimizer_unit.csv");
    write_point_csv(out, run.v);
  }
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <class Model, class Run>
json maxmin_summary(const Model& model, const ProblemSpec& spec, const Run& run, double path_max_F) {
  json j = to_json(run.curve, run.forms);
  const double expected = model.scaling_exponent();
  const double fit_argmax = run.fit.argmax();
  j["problem"] = to_json(spec);
  j["i_1"] = run.i_1;
  j["lambda_star_star_scaling_law"] = std::pow(run.i_1, 1.0 / (1.0 - expected));
  j["power_law_fit"] = {{"coefficient", run.fit.coefficient},
                        {"exponent", run.fit.exponent},
                        {"expected_exponent", expected},
                        {"argmax", fit_argmax}};
  // the numerical argmax is the referee between the two closed forms
  const double num = run.curve.lambda_bar;
  j["lambda_bar_adjudication"] = {
      {"numerical", num},
      {"fitted_power_law_argmax", fit_argmax},
      {"derived_formula", run.forms.derived_argmax},
      {"published_formula", run.forms.published_formula},
      {"relative_gap_fitted", rel_gap(num, fit_argmax)},
      {"relative_gap_derived", rel_gap(num, run.forms.derived_argmax)},
      {"relative_gap_published", rel_gap(num, run.forms.published_formula)},
      {"derived_matches", rel_gap(num, run.forms.derived_argmax) <= 0.02},
      {"published_matches", rel_gap(num, run.forms.published_formula) <= 0.02}};
  j["path_max_F"] = path_max_F;
  j["samples"] = run.curve.lambdas.size();
  j["refinements"] = run.refinements.size();
  j["unconverged"] = run.unconverged;
  std::size_t jumps = 0;
  for (const auto& e : run.sweep) jumps += e.jump ? 1 : 0;
  j["continuity_jumps"] = jumps;
  j["tail_small_at_unit_level"] = tail_report(run.v);
  return j;
}

template <class Model>
auto run_maxmin(const Model& model, const ProblemSpec& spec, const RunConfig& cfg) {
  return compute_level_curve(model, spec, maxmin_options(cfg));
}

/// F along gamma on the sweep levels; returns the samples and their max
/// over (0, lambda**).
template <class Model, class Run>
std::pair<std::vector<PathSample>, double> path_profile(const Model& model, const Run& run) {
  auto samples = evaluate_F_along_path(model, run.v, run.curve.lambdas);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.lambda < run.curve.lambda_star_star) best = std::max(best, s.F);
  // the refined maximizer itself, so the path max is not limited by spacing
  const auto at_bar = scaling_path(model, run.v, run.curve.lambda_bar);
  best = std::max(best, model.F(at_bar));
  return {std::move(samples), best};
}

// ------------------------------------------------------------- commands

template <class Model>
int cmd_minimize(const Model& model, const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir,
                 double lambda) {
  auto r = minimize_on_level(model, lambda, model.seed(), cfg.minimize);
  {
    auto out = dir.open("minimizer.csv");
    write_point_csv(out, r.minimizer);
  }
  json j{{"problem", to_json(spec)}, {"result", to_json(r)}, {"tail_small", tail_report(r.minimizer)}};
  if (cfg.multistart > 0) {
    std::mt19937_64 rng(cfg.seed);
    json starts = json::array();
    double spread = 0;
    for (int k = 0; k < cfg.multistart; ++k) {
      auto rk = minimize_on_level(model, lambda, random_seed(model, rng), cfg.minimize);
      spread = std::max(spread, std::abs(rk.i_value - r.i_value) / std::abs(r.i_value));
      starts.push_back(to_json(rk));
    }
    j["multistart"] = {{"seed", cfg.seed}, {"runs", starts}, {"max_relative_spread", spread}};
  }
  dir.write_json("minimize.json", j);
  if (!r.converged) throw ConvergenceError("minimize: not converged within max_iters (partial artifacts written)");
  return kExitOk;
}

template <class Model>
int cmd_sweep(const Model& model, const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir) {
  double lo, hi;
  std::optional<typename Model::point_type> seed;
  if (cfg.sweep.lambda_min && cfg.sweep.lambda_max) {
    lo = *cfg.sweep.lambda_min;
    hi = *cfg.sweep.lambda_max;
  } else {
    // default range from the unit level and the scaling exponent
    auto unit = minimize_on_level(model, 1.0, model.seed(), cfg.minimize);
    const double s = model.scaling_exponent();
    lo = cfg.sweep.lambda_min.value_or(std::pow(s * unit.i_value, 1.0 / (1.0 - s)) / 10.0);
    hi = cfg.sweep.lambda_max.value_or(2.5 * std::pow(unit.i_value, 1.0 / (1.0 - s)));
    seed = model.transport(unit.minimizer, 1.0, lo);
  }
  require(lo > 0 && hi > lo, "sweep: need 0 < lambda_min < lambda_max");
  const auto count = cfg.sweep.count.value_or(static_cast<std::size_t>(
      std::max(8.0, std::ceil(cfg.sweep.points_per_decade * std::log10(hi / lo)) + 1)));
  SweepOptions so{cfg.minimize, cfg.sweep.warm_start};
  const auto sweep = continuation_sweep(model, log_space(lo, hi, count), so, seed);
  {
    auto out = dir.open("sweep.csv");
    write_sweep_csv(out, sweep);
  }
  std::vector<double> l, i;
  std::size_t failed = 0, unconverged = 0, jumps = 0;
  for (const auto& e : sweep) {
    if (!e.error.empty()) { ++failed; continue; }
    if (!e.result.converged) ++unconverged;
    jumps += e.jump ? 1 : 0;
    l.push_back(e.result.lambda);
    i.push_back(e.result.i_value);
  }
  json j{{"problem", to_json(spec)}, {"count", count}, {"failed", failed}, {"unconverged", unconverged},
         {"continuity_jumps", jumps}};
  if (l.size() >= 2) {
    const auto fit = fit_power_law(l, i);
    j["power_law_fit"] = {{"coefficient", fit.coefficient}, {"exponent", fit.exponent},
                          {"expected_exponent", model.scaling_exponent()}};
  }
  dir.write_json("sweep.json", j);
  require(l.size() >= 2, "sweep: fewer than two successful solves");
  const auto curve = build_level_curve(l, i);  // surfaces "widen the sweep"
  {
    auto out = dir.open("level_curve.csv");
    write_level_curve_csv(out, curve);
  }
  // i_1 from the fitted law, since this command never solves at lambda = 1
  const auto forms = closed_form_lambda_bar(spec, fit_power_law(l, i).coefficient);
  j["level_curve"] = to_json(curve, forms);
  dir.write_json("sweep.json", j);
  if (unconverged > 0 || failed > 0) throw ConvergenceError("sweep: some levels did not converge (artifacts written)");
  return kExitOk;
}

template <class Model>
int cmd_maxmin(const Model& model, const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir) {
  const auto run = run_maxmin(model, spec, cfg);
  write_maxmin_artifacts(dir, run);
  const auto [path, path_max] = path_profile(model, run);
  {
    auto out = dir.open("path.csv");
    write_path_csv(out, path);
  }
  dir.write_json("maxmin.json", maxmin_summary(model, spec, run, path_max));
  if (run.unconverged > 0) throw ConvergenceError("maxmin: some levels did not converge (artifacts written)");
  return kExitOk;
}

template <class Model>
json mpa_record(const Model& model, const McEstimate<typename Model::point_type>& est, double lambda_ss) {
  const auto missing = uncrossed_levels(model, est.path, log_space(lambda_ss * 1e-3, lambda_ss, 64));
  return {{"c_mpa", est.c_mpa},
          {"sweeps", est.sweeps},
          {"converged", est.converged},
          {"stagnant", est.stagnant},
          {"argmax_norm", norm(model, est.argmax_point)},
          {"argmax_U", model.U(est.argmax_point)},
          {"endpoint_energy", est.path.endpoint_energy()},
          {"levels_not_crossed", missing.size()}};
}

template <class Model>
int cmd_mpa(const Model& model, const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir) {
  const auto run = run_maxmin(model, spec, cfg);
  write_maxmin_artifacts(dir, run);
  const double lss = run.curve.lambda_star_star;
  const auto endpoint = scaling_path(model, run.v, cfg.endpoint_factor * lss);
  const auto est = estimate_c(model, endpoint, cfg.mpa);
  {
    auto out = dir.open("mpa_trace.csv");
    write_trace_csv(out, est);
  }
  {
    auto out = dir.open("mpa_argmax.csv");
    write_point_csv(out, est.argmax_point);
  }
  json rec = mpa_record(model, est, lss);
  rec["endpoint_lambda"] = cfg.endpoint_factor * lss;
  rec["problem"] = to_json(spec);
  dir.write_json("mpa.json", rec);
  const double c = run.curve.c_maxmin;
  dir.write_json("comparison.json", {{"c_maxmin", c}, {"c_mpa", est.c_mpa},
                                     {"relative_gap", (est.c_mpa - c) / std::abs(c)}});
  if (est.stagnant) throw ConvergenceError("mpa: path deformation stagnated (artifacts written)");
  if (!est.converged) throw ConvergenceError("mpa: sweep budget exhausted (artifacts written)");
  return kExitOk;
}

template <class Model>
int cmd_verify(const Model& model, const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir) {
  const auto run = run_maxmin(model, spec, cfg);
  ScaleOptions so;
  so.minimize = cfg.minimize;
  const auto sc = pick_solution_scale(model, spec, run.v, run.i_1, so);
  {
    auto out = dir.open("solution.csv");
    write_point_csv(out, sc.solution);
  }
  json cands = json::array();
  for (const auto& c : sc.candidates)
    cands.push_back({{"label", c.label}, {"lambda", c.lambda}, {"theta", c.theta}, {"residual", c.residual}});
  const double bound = 10 * cfg.minimize.grad_tol;
  dir.write_json("verify.json",
                 {{"problem", to_json(spec)},
                  {"theta", sc.theta},
                  {"residual", sc.residual},
                  {"lambda_unit_multiplier", sc.lambda_unit_multiplier},
                  {"lambda_unit_multiplier_on_path", sc.lambda_on_path},
                  {"numerical_lambda_bar", run.curve.lambda_bar},
                  {"derived_lambda_bar", run.forms.derived_argmax},
                  {"relative_gap_to_derived", rel_gap(sc.lambda_unit_multiplier, run.forms.derived_argmax)},
                  {"relative_gap_to_numerical", rel_gap(sc.lambda_unit_multiplier, run.curve.lambda_bar)},
                  {"residual_bound", bound},
                  {"residual_within_bound", sc.residual <= bound},
                  {"regularization_delta", sc.regularization_delta},
                  {"candidates", cands}});
  if (!(sc.residual <= bound))
    throw ConvergenceError("verify: Euler-Lagrange residual above 10 x grad_tol (artifacts written)");
  return kExitOk;
}

inline int cmd_toy(const ProblemSpec& spec, const RunConfig& cfg, const ArtifactDir& dir) {
  const ToyProblem prob = spec.toy_problem();
  const ToyModel model(prob);
  const auto closed = toy_closed_form(prob);
  const double brute = toy_c_bruteforce(prob, 100000);
  const auto run = run_maxmin(model, spec, cfg);
  write_maxmin_artifacts(dir, run);

  // every path out of the well crosses the ridge |u| = lambda_bar^{1/q},
  // where F equals c, so the straight ray is already optimal
  const double rend = 2.0 * std::pow(run.curve.lambda_star_star, 1.0 / prob.q);
  auto endpoint = model.zero();
  endpoint[0] = rend;
  const auto est = estimate_c(model, endpoint, cfg.mpa);
  {
    auto out = dir.open("mpa_trace.csv");
    write_trace_csv(out, est);
  }
  json j{{"q", prob.q},
         {"d", prob.d},
         {"c_closed_form", closed.c},
         {"c_bruteforce", brute},
         {"c_maxmin", run.curve.c_maxmin},
         {"c_mpa", est.c_mpa},
         {"lambda_bar_closed_form", closed.lambda_bar},
         {"lambda_bar_maxmin", run.curve.lambda_bar},
         {"lambda_star_closed_form", closed.lambda_star},
         {"lambda_star_maxmin", run.curve.lambda_star},
         {"lambda_star_star_closed_form", closed.lambda_star_star},
         {"lambda_star_star_maxmin", run.curve.lambda_star_star},
         {"error_maxmin", std::abs(run.curve.c_maxmin - closed.c)},
         {"error_mpa", std::abs(est.c_mpa - closed.c)},
         {"mpa", mpa_record(model, est, run.curve.lambda_star_star)},
         {"saddle_norm_expected", std::pow(closed.lambda_bar, 1.0 / prob.q)}};
  dir.write_json("toy.json", j);
  if (!est.converged) throw ConvergenceError("toy: path deformation did not converge (artifacts written)");
  return kExitOk;
}

template <class Model>
int dispatch(const std::string& command, const Model& model, const ProblemSpec& spec, const RunConfig& cfg,
             const ArtifactDir& dir, const CommandArgs& args) {
  if (command == "minimize") return cmd_minimize(model, spec, cfg, dir, args.lambda.value_or(1.0));
  if (command == "sweep") return cmd_sweep(model, spec, cfg, dir);
  if (command == "maxmin") return cmd_maxmin(model, spec, cfg, dir);
  if (command == "mpa") return cmd_mpa(model, spec, cfg, dir);
  if (command == "verify") return cmd_verify(model, spec, cfg, dir);
  throw ValidationError("unknown command '" + command + "'");
}

inline void write_error(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message,
                        int code) {
  std::cerr << "error (" << kind << "): " << message << '\n';
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream f(out_dir / "error.json");
  if (f) f << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump(2) << '\n';
}

}  // namespace detail

/// Runs one command end to end and returns its exit code. Configuration
/// is fully validated before any compute starts.
inline int run_command(const CommandArgs& args) {
  std::filesystem::path out_dir = args.out.value_or("out");
  try {
    static const char* known[] = {"minimize", "sweep", "maxmin", "mpa", "verify", "toy"};
    bool ok = false;
    for (const char* k : known) ok = ok || args.command == k;
    detail::require(ok, "unknown command '" + args.command + "'");
    RunConfig cfg = load_run_config(args.config);
    if (!args.out) out_dir = cfg.output_dir;
    if (args.command == "toy") {
      detail::require(args.q || args.d || cfg.problem.variant == Variant::toy,
                      "toy: config problem must be the toy variant (or pass --q/--d)");
      if (cfg.problem.variant != Variant::toy) {
        cfg.problem = ProblemConfig{};
        cfg.problem.variant = Variant::toy;
        cfg.minimize = MinimizeOptions::toy_defaults();
        cfg.mpa = MpaOptions::toy_defaults();
      }
      if (args.q) cfg.problem.q = *args.q;
      if (args.d) cfg.problem.d = *args.d;
    }
    if (args.lambda) detail::require(std::isfinite(*args.lambda) && *args.lambda > 0, "--lambda must be positive");
    const ProblemSpec spec = build_problem(cfg.problem);
    const ArtifactDir dir(out_dir);
    if (args.command == "toy") return detail::cmd_toy(spec, cfg, dir);
    if (spec.variant() == Variant::toy)
      return detail::dispatch(args.command, ToyModel(spec.toy_problem()), spec, cfg, dir, args);
    return detail::dispatch(args.command, RadialModel(spec), spec, cfg, dir, args);
  } catch (const ValidationError& e) {
    detail::write_error(out_dir, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    detail::write_error(out_dir, "convergence", e.what(), kExitConvergence);
    return kExitConvergence;
  } catch (const IoError& e) {
    detail::write_error(out_dir, "io", e.what(), kExitIo);
    return kExitIo;
  } catch (const std::exception& e) {
    detail::write_error(out_dir, "internal", e.what(), kExitConvergence);
    return kExitConvergence;
  }
}

}  // namespace mpmm
