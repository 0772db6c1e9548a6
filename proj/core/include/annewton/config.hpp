#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "annewton/objective.hpp"
#include "annewton/simulator.hpp"
#include "annewton/topology.hpp"

namespace annewton {

inline constexpr int kSchemaVersion = 1;

enum class Mode { Validate, Bounds, Run, Compare, Accept };
std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view s);

struct NetworkSpec {
  enum class Builder { Laplacian, Metropolis, File };
  Builder builder = Builder::Laplacian;
  /// complete | path | ring | star | erdos_renyi | edge_list
  std::string graph = "complete";
  std::size_t n = 5;
  double kappa = 0.125;
  double p = 0.3;
  std::uint64_t graph_seed = 1;
  /// Resolved relative to the config file.
  std::string edges_file;
  std::string w_file;
};

/// Everything one invocation of the CLI needs. Loaded from JSON with a
/// required `schema_version`; unknown keys are rejected.
struct RunConfig {
  int schema_version = kSchemaVersion;
  Mode mode = Mode::Run;
  NetworkSpec network;
  double alpha = 1.0;
  std::vector<LocalSpec> agents;
  double epsilon = 0.8;
  StepsizePolicy policy = StepsizePolicy::Theorem2;
  long long iters = 2000;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t stride = 1;
  bool timestamps = true;
  double gossip_gamma = 0.05;
  long long gossip_iters = 5000;
  std::string out_dir = "out";
  bool plot = true;
  /// Directory that relative paths in the config resolve against.
  std::string base_dir = ".";
};

RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

ConsensusNetwork build_network(const NetworkSpec& spec, const std::string& base_dir = ".");

/// Five agents, f_i(x) = (x - i)^2, complete graph, W = I - L/8, alpha = 1,
/// epsilon = 0.8.
RunConfig paper_fig1_config();

}  // namespace annewton
