#include <CLI11.hpp>

#include <iostream>

#include "gaugelab/cli.hpp"

using namespace gaugelab;

int main(int argc, char** argv) {
  CLI::App app{"gaugelab: non-standard and null Lagrangians, gauge forces and Galilean checks"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string scenario, route;
  app.add_option("--scenario", scenario, "scenario JSON file");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  app.add_flag("--strict", cfg.strict, "treat printed-form mismatches and failed invariance as failures");
  app.add_option("--route", route, "force route")->check(CLI::IsMember({"A", "B", "eq9"}));

  int code = cli::exit_ok;
  auto add = [&](const char* name, const char* help, int (*cmd)(const cli::RunConfig&, std::ostream&, std::ostream&)) {
    app.add_subcommand(name, help)->fallthrough()->callback([&, cmd] {
      if (!scenario.empty()) cfg.scenario = scenario;
      if (!route.empty()) cfg.route = forces::parse_route(route);
      code = cmd(cfg, std::cout, std::cerr);
    });
  };
  add("verify", "cross-check printed forms and run the invariant suite", cli::cmd_verify);
  add("derive", "print EL, energy, force and acceleration for a scenario", cli::cmd_derive);
  add("simulate", "integrate a scenario's equation of motion to CSV", cli::cmd_simulate);
  add("boost", "Galilean form and equation-of-motion invariance", cli::cmd_boost);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::exit_config;
  }
  return code;
}
