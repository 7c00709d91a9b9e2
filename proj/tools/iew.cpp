// iew: batch driver for the integral-equation solvers.

#include <CLI11.hpp>

#include "iew/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Integral equation workbench"};
  app.set_version_flag("--version", iew::cli::version);
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Solve one problem config");
  run->add_option("config", config, "Problem config (JSON)")->required();
  run->add_option("--out", out, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Seed for noise and particle placement");

  auto* study = app.add_subcommand("study", "Run the parameter ladder declared in a config");
  study->add_option("config", config, "Problem config (JSON)")->required();
  study->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*run)
    return iew::cli::run_command(config, out, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
  return iew::cli::study_command(config, out);
}
