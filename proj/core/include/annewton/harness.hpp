#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "annewton/config.hpp"
#include "annewton/error.hpp"
#include "annewton/objective.hpp"

namespace annewton {

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<long long> iters;
  std::optional<std::string> out;
  std::optional<std::size_t> stride;
  std::optional<double> epsilon;
};

/// Precedence, lowest first: config file, NN_SEED, command line.
/// `nn_seed` is the raw NN_SEED value or null when unset.
void apply_overrides(RunConfig& cfg, const CliOverrides& cli, const char* nn_seed);

/// One-line hint on how to fix a failure of the given class.
std::string_view remediation(ErrorCode code) noexcept;

template <class S>
std::shared_ptr<const PenalizedObjective<S>> build_objective(const RunConfig& cfg) {
  const ConsensusNetwork net = build_network(cfg.network, cfg.base_dir);
  if (cfg.agents.size() != net.size())
    throw Error(ErrorCode::ConfigParse, "objective.agents lists " + std::to_string(cfg.agents.size()) +
                                            " local functions for a network of " + std::to_string(net.size()) +
                                            " agents");
  return std::make_shared<const PenalizedObjective<S>>(make_objective<S>(net, cfg.alpha, cfg.agents));
}

/// Executes cfg.mode. Returns the process exit code: 0 on success, 1 on a
/// failed check or any library error (rendered to `err` with a hint).
int cli_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace annewton
