#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cmcbr/error.hpp"
#include "cmcbr/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bel-Robinson energy lab for CMC-foliated vacuum spacetimes"};
  std::string command;
  std::string config_path;
  std::string output;
  int grid = 0;
  long long seed = -1;
  app.add_option("command", command, "verify | evolve | oracle | rescale-test")->required();
  app.add_option("--config", config_path, "key = value run configuration")->required();
  app.add_option("--output", output, "output file (overrides the config)");
  app.add_option("--grid", grid, "points per axis (overrides the config)");
  app.add_option("--seed", seed, "perturbation seed (overrides the config)");
  CLI11_PARSE(app, argc, argv);

  try {
    const cmcbr::Command chosen = cmcbr::parse_command(command);
    std::ifstream in(config_path, std::ios::binary);
    if (!in) cmcbr::raise(cmcbr::ErrorKind::ParseError, "cannot read config file '" + config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    cmcbr::RunConfig config = cmcbr::parse_config(text.str());
    // the positional command wins over a `command` key in the file
    config.command = chosen;
    if (!output.empty()) config.output = output;
    if (grid != 0) config.grid.n = {grid, grid, grid};
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    config.validate();
    return cmcbr::run(config, std::cout, std::cerr);
  } catch (const cmcbr::Error& e) {
    std::cerr << "error: kind=" << cmcbr::to_string(e.kind()) << " message=\"" << e.what() << "\"\n";
    return 2;
  }
}
