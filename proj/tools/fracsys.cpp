#include <iostream>

#include <CLI11.hpp>

#include "fracsys/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solver for linear multi-order fractional systems D^B U = F U + H"};
  app.require_subcommand(1);

  fracsys::RunRequest req;
  CLI::App* solve = app.add_subcommand("solve", "solve the system described by a YAML config");
  solve->add_option("--config", req.config_path, "configuration file")->required();
  solve->add_flag("--verify", req.verify, "also run talbot and adams and report deviations");
  solve->add_flag("--dump-config", req.dump_config, "print the parsed configuration and exit");
  solve->add_option("--out", req.out_dir, "output directory (overrides output.directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return fracsys::run(req, std::cout, std::cerr);
}
