#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ldmu/driver.hpp"
#include "ldmu/syntax.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ldmu: checker for fixed-point and inductive definitions"};
  app.require_subcommand(1);
  ldmu::Options opts;
  bool json = false;
  std::string file, theorem, subst, derivation;

  auto common = [&](CLI::App* c) {
    c->add_option("file", file, "script (.ld)")->required()->check(CLI::ExistingFile);
    c->add_flag("--json", json, "machine-readable report");
    c->add_flag("--unsafe-skip-stratification", opts.unsafe_skip_stratification,
                "skip the stratification gate");
    c->add_option("--seed", opts.seed, "seed for randomized checks");
    c->add_option("--trials", opts.trials, "random grounding oracle trials per clause");
  };
  CLI::App* check = app.add_subcommand("check", "stratification gate and theorem checks");
  common(check);
  CLI::App* strat = app.add_subcommand("strat", "stratification only");
  common(strat);
  CLI::App* ground = app.add_subcommand("ground", "ground a theorem's derivation and check it");
  common(ground);
  ground->add_option("theorem", theorem, "theorem name")->required();
  ground->add_option("subst", subst, "grounding, e.g. \"x = tt, y = ff\"; default: all");
  CLI::App* cutelim = app.add_subcommand("cutelim", "normalize a ground derivation");
  common(cutelim);
  cutelim->add_option("derivation", derivation, "ground derivation (.ldg)")
      ->required()
      ->check(CLI::ExistingFile);
  cutelim->add_option("--fuel", opts.fuel, "reduction step limit");
  cutelim->add_option("--trace", opts.trace_file, "write the reduction trace here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors and missing files share the IO exit code; --help exits 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    ldmu::Report r;
    if (*check)
      r = ldmu::cmd_check(file, opts);
    else if (*strat)
      r = ldmu::cmd_strat(file, opts);
    else if (*ground)
      r = ldmu::cmd_ground(file, theorem, subst, opts);
    else
      r = ldmu::cmd_cutelim(file, derivation, opts);
    if (json) {
      std::cout << ldmu::report_json(r);
    } else {
      bool color = std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
      std::cout << ldmu::report_text(r, color);
    }
    return r.exit_code();
  } catch (const ldmu::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ldmu::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
