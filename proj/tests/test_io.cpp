#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpmm/commands.hpp"

using namespace mpmm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MPMM_TEST_DATA;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mpmm_test_io_" + name);
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command, const fs::path& config, const fs::path& out) {
  CommandArgs a;
  a.command = command;
  a.config = config;
  a.out = out.string();
  return run_command(a);
}

}  // namespace

TEST(Config, ParsesDefaults) {
  auto c = run_config_from_json(json::parse(R"({"problem": {"variant": "hardy-subcritical"}})"));
  EXPECT_EQ(c.problem.variant, Variant::hardy_subcritical);
  EXPECT_EQ(c.problem.p, 2);
  EXPECT_EQ(c.problem.n, 5);
  EXPECT_EQ(c.problem.R, 30);
  EXPECT_EQ(c.problem.grid_m, 800u);
  auto spec = build_problem(c.problem);
  EXPECT_EQ(spec.mu(), 0.0);
  EXPECT_NEAR(spec.nonlinearity().q(), 8.0 / 3.0, 1e-15);
}

TEST(Config, CriticalDefaultsToUnitBall) {
  auto c = run_config_from_json(json::parse(R"({"problem": {"variant": "critical-bounded", "mu_fraction": 0.3, "grid": {"m": 100}}})"));
  EXPECT_EQ(c.problem.R, 1.0);
  auto spec = build_problem(c.problem);
  EXPECT_NEAR(spec.mu() / spec.mu_p(), 0.3, 1e-15);
}

TEST(Config, RejectsMalformed) {
  EXPECT_THROW(run_config_from_json(json::parse(R"({"problem": {"variant": "nope"}})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"problem": {"variant": "toy"}, "extra": 1})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"sweep": {}})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"problem": {"variant": "toy", "p": "two"}})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"problem": {"variant": "toy"}, "mpa": {"interior": 4}})")),
               ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"problem": {"variant": "hardy-subcritical", "mu": 0, "mu_fraction": 0.1}})")),
               ValidationError);
  EXPECT_THROW(load_run_config(kData / "does_not_exist.json"), ValidationError);
}

TEST(Config, InvalidMuRejectedAtBuild) {
  auto c = load_run_config(kData / "invalid_mu.json");
  EXPECT_THROW(build_problem(c.problem), ValidationError);
}

TEST(Serialization, GridRoundTrip) {
  auto g = build_radial_grid(5, 30.0, 120);
  auto h = grid_from_json(json::parse(to_json(*g).dump()));
  EXPECT_TRUE(same_grid(g, h));
  EXPECT_THROW(grid_from_json(json::parse(R"({"n": 3})")), ValidationError);
}

TEST(Serialization, ProblemSchema) {
  auto c = load_run_config(kData / "hardy_small.json");
  auto j = to_json(build_problem(c.problem));
  for (const char* k : {"variant", "p", "n", "mu", "pstar", "m", "q", "hardy_constant", "grid"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["variant"], "hardy-subcritical");
}

TEST(Serialization, CsvRoundTrip) {
  auto dir = scratch("csv");
  ArtifactDir out(dir);
  auto g = build_radial_grid(3, 2.0, 40);
  auto u = sample(g, [](double r) { return std::exp(-r) / 3.0; });
  {
    auto f = out.open("u.csv");
    write_point_csv(f, u);
  }
  auto t = read_csv(dir / "u.csv");
  ASSERT_EQ(t.header, (std::vector<std::string>{"r", "value"}));
  ASSERT_EQ(t.rows.size(), u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    EXPECT_EQ(t.rows[k][0], g->node(k));
    EXPECT_EQ(t.rows[k][1], u.values[k]);
  }
}

TEST(Serialization, UnwritableDirectory) {
  EXPECT_THROW(ArtifactDir("/proc/mpmm_cannot_write/x"), IoError);
}

TEST(Commands, MinimizeToy) {
  auto out = scratch("minimize_toy");
  ASSERT_EQ(run("minimize", kData / "toy_q4.json", out), kExitOk);
  auto j = read_json(out / "minimize.json");
  EXPECT_NEAR(j["result"]["i_value"].get<double>(), 1.0, 1e-8);
  EXPECT_TRUE(fs::exists(out / "minimizer.csv"));
}

TEST(Commands, ToyReport) {
  auto out = scratch("toy");
  ASSERT_EQ(run("toy", kData / "toy_q4.json", out), kExitOk);
  auto j = read_json(out / "toy.json");
  EXPECT_NEAR(j["c_closed_form"].get<double>(), 0.25, 1e-15);
  EXPECT_NEAR(j["c_bruteforce"].get<double>(), 0.25, 1e-8);
  EXPECT_NEAR(j["c_maxmin"].get<double>(), 0.25, 1e-6);
  EXPECT_NEAR(j["c_mpa"].get<double>(), 0.25, 1e-3);
}

TEST(Commands, ExitCodes) {
  EXPECT_EQ(run("minimize", kData / "invalid_mu.json", scratch("invalid")), kExitValidation);
  EXPECT_EQ(run("minimize", kData / "missing.json", scratch("missing")), kExitValidation);
  EXPECT_EQ(run("toy", kData / "unknown_key.json", scratch("unknown")), kExitValidation);
  EXPECT_EQ(run("bogus", kData / "toy_q4.json", scratch("bogus")), kExitValidation);
  EXPECT_EQ(run("toy", kData / "toy_q4.json", "/proc/mpmm_cannot_write"), kExitIo);
  EXPECT_EQ(run("minimize", kData / "tiny_budget.json", scratch("budget")), kExitConvergence);
}

TEST(Commands, ErrorArtifact) {
  auto out = scratch("error_artifact");
  ASSERT_EQ(run("minimize", kData / "invalid_mu.json", out), kExitValidation);
  auto j = read_json(out / "error.json");
  EXPECT_EQ(j["error"], "validation");
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_NE(j["message"].get<std::string>().find("mu"), std::string::npos);
}

TEST(Commands, NarrowSweepAsksToWiden) {
  auto out = scratch("narrow");
  ASSERT_EQ(run("sweep", kData / "narrow_sweep.json", out), kExitValidation);
  EXPECT_NE(read_json(out / "error.json")["message"].get<std::string>().find("widen"), std::string::npos);
}

TEST(Commands, BitwiseReproducible) {
  auto a = scratch("repro_a"), b = scratch("repro_b");
  ASSERT_EQ(run("toy", kData / "toy_q4.json", a), kExitOk);
  ASSERT_EQ(run("toy", kData / "toy_q4.json", b), kExitOk);
  for (const char* f : {"toy.json", "mpa_trace.csv", "level_curve.csv", "sweep.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}
