// Command-line front end: mpmm <command> --config <path> [--lambda x] [--out dir]

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mpmm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Max-min and mountain-pass levels for radial p-Laplacian problems"};
  app.require_subcommand(1, 1);
  mpmm::CommandArgs args;
  std::string config;
  double lambda = 0, q = 0;
  int d = 0;
  std::string out;

  const char* commands[][2] = {
      {"minimize", "minimize T on U = lambda (default lambda = 1)"},
      {"sweep", "continuation sweep of i_lambda and the level curve"},
      {"maxmin", "max over lambda of i_lambda - lambda, with lambda_bar adjudication"},
      {"mpa", "mountain-pass level by path deformation, compared with max-min"},
      {"verify", "Euler-Lagrange residual at the unit-multiplier scaled minimizer"},
      {"toy", "closed form, brute force, max-min and path deformation on R^d"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--lambda", lambda, "constraint level for minimize");
    sub->add_option("--out", out, "output directory (overrides the config)");
    if (std::string(name) == "toy") {
      sub->add_option("--q", q, "toy exponent q > 2");
      sub->add_option("--d", d, "toy dimension d >= 1");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mpmm::kExitValidation;
  }
  auto* sub = app.get_subcommands().front();
  args.command = sub->get_name();
  args.config = config;
  if (sub->count("--lambda")) args.lambda = lambda;
  if (sub->count("--out")) args.out = out;
  if (sub->get_option_no_throw("--q") && sub->count("--q")) args.q = q;
  if (sub->get_option_no_throw("--d") && sub->count("--d")) args.d = d;
  return mpmm::run_command(args);
}
