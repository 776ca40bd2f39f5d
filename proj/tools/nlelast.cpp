// Command line front end. Parses an INI experiment config, dispatches one
// subcommand, and writes artifacts to the configured output directory.
// Exit codes: 0 success, 1 usage, 2 hypothesis violation, 3 nonconvergence,
// 4 internal error.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlelast/config.hpp"
#include "nlelast/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlelast: nonlocal linear elasticity toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("-c,--config", config_path, "experiment config file (INI)")
      ->required();
  app.add_option("-o,--output", output_dir, "output directory override");
  app.add_option("-t,--threads", threads, "worker thread override");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");

  const char* names[] = {"check-kernel", "symbol",        "solve-periodic",
                         "solve-dirichlet", "solve-shifted", "solve-nonzero",
                         "korn",         "pk",            "regularity"};
  const char* descs[] = {
      "verify kernel hypotheses at sampled probe points",
      "tabulate the Fourier symbol at random frequencies",
      "spectral solve on a periodic grid",
      "constrained solve with zero volume constraint",
      "constrained solve of the shifted operator (beta > 0)",
      "constrained solve with nonzero constraint data",
      "estimate the energy/Sobolev equivalence constants",
      "estimate the nonlocal Poincare constant",
      "interior regularity study over refined grids"};
  for (std::size_t i = 0; i < std::size(names); ++i)
    app.add_subcommand(names[i], descs[i]);

  CLI11_PARSE(app, argc, argv);

  nlelast::RunOptions opt;
  opt.subcommand = app.get_subcommands().front()->get_name();
  opt.output_dir = output_dir;
  opt.threads = threads;
  opt.seed = seed;
  opt.seed_set = seed_opt->count() > 0;

  try {
    nlelast::ExperimentConfig cfg = nlelast::parse_config_file(config_path);
    return nlelast::run(cfg, opt);
  } catch (const nlelast::Error& e) {
    std::cerr << "error (" << nlelast::error_kind_name(e.kind()) << "): "
              << e.what() << "\n";
    return nlelast::exit_code_for(e.kind());
  }
}
