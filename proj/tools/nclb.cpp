#include <CLI11.hpp>

#include <iostream>

#include "nclb/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lower-bound verification toolkit for the non-cutoff Boltzmann operator"};
  std::string config;
  nclb::CliOptions opt;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "experiment config (YAML)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "output directory (overrides the config)");
  app.add_option("--workers", opt.workers, "worker threads; 0 keeps the runtime default")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized sampling (overrides the config)");
  app.add_flag("--fast", opt.fast, "sub-sampled batteries");
  app.add_option("--tolerance-scale", opt.tolerance_scale, "multiplier for every pass/fail tolerance")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nclb::exit_config;
  }
  if (seed_opt->count() > 0) opt.seed = seed;
  return nclb::run_guarded(config, opt, std::cout, std::cerr);
}
