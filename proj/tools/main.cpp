// annewton: asynchronous network Newton experiments from the command line.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "annewton/config.hpp"
#include "annewton/harness.hpp"

namespace {

struct Flags {
  std::string config;
  annewton::CliOverrides cli;
};

template <class T>
void add_optional(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run config (default: built-in fig1 setup)")->check(CLI::ExistingFile);
  add_optional(app, "--seed", f.cli.seed, "base seed (overrides NN_SEED and the config)");
  add_optional(app, "--trials", f.cli.trials, "independent trials");
  add_optional(app, "--iters", f.cli.iters, "iterations per run");
  add_optional(app, "--out", f.cli.out, "output directory");
  add_optional(app, "--stride", f.cli.stride, "keep every N-th trace row");
  add_optional(app, "--epsilon", f.cli.epsilon, "stepsize");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous network Newton for penalized consensus optimization"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> modes[] = {
      {"validate", "check the network, objective and stepsize"},
      {"bounds", "print the convergence constants"},
      {"run", "simulate network Newton and write its trace"},
      {"compare", "network Newton against the gossip baseline"},
      {"accept", "run the acceptance suite"},
  };
  for (const auto& [name, help] : modes) add_common(app.add_subcommand(name, help), flags);
  CLI11_PARSE(app, argc, argv);

  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    annewton::RunConfig cfg = flags.config.empty() ? annewton::paper_fig1_config() : annewton::load_config(flags.config);
    cfg.mode = annewton::parse_mode(mode);
    annewton::apply_overrides(cfg, flags.cli, std::getenv("NN_SEED"));
    return annewton::cli_run(cfg, std::cout, std::cerr);
  } catch (const annewton::Error& e) {
    std::cerr << "error: " << e.what() << "\nhint: " << annewton::remediation(e.code()) << "\n";
    return 1;
  }
}
