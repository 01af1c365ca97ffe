#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fluxbal/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Flux traces, finite-volume ledgers and balance-law verification"};
  app.set_version_flag("--version", std::string("fluxbal ") + FLUXBAL_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  for (const char* name : {"solve", "trace", "verify", "convergence"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "overrides the config seed");
  }
  CLI11_PARSE(app, argc, argv);
  return fluxbal::run_command(app.get_subcommands().front()->get_name(), config, out, seed);
}
