#include "annewton/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "annewton/error.hpp"

namespace annewton {

using nlohmann::json;

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Validate: return "validate";
    case Mode::Bounds: return "bounds";
    case Mode::Run: return "run";
    case Mode::Compare: return "compare";
    case Mode::Accept: return "accept";
  }
  return "unknown";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::Validate, Mode::Bounds, Mode::Run, Mode::Compare, Mode::Accept})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::ConfigParse,
              fmt::format("unknown mode '{}' (expected validate, bounds, run, compare or accept)", s));
}

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigParse, fmt::format("{}: {}", where, what));
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) parse_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.contains(key)) {
      std::string list;
      for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
      parse_error(where, fmt::format("unknown key '{}' (allowed: {})", key, list));
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_error(where + "." + key, e.what());
  }
}

LocalSpec parse_local(const json& j, const std::string& where) {
  reject_unknown(j, where, {"builder", "a", "b", "r"});
  std::string builder;
  read(j, "builder", builder, where);
  LocalSpec spec;
  read(j, "a", spec.a, where);
  read(j, "b", spec.b, where);
  read(j, "r", spec.r, where);
  if (builder == "quadratic") {
    spec.kind = LocalSpec::Kind::Quadratic;
    if (j.contains("r")) parse_error(where, "quadratic takes only 'a' and 'b'");
  } else if (builder == "logcosh_ridge") {
    spec.kind = LocalSpec::Kind::LogCoshRidge;
  } else {
    parse_error(where + ".builder", fmt::format("unknown builder '{}' (expected quadratic or logcosh_ridge)", builder));
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    parse_error("config", e.what());
  }
  reject_unknown(root, "config", {"schema_version", "mode", "network", "objective", "run", "gossip", "output"});
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (!root.contains("schema_version")) parse_error("config", "missing required key 'schema_version'");
  read(root, "schema_version", cfg.schema_version, "config");
  if (cfg.schema_version != kSchemaVersion)
    parse_error("config.schema_version",
                fmt::format("unsupported version {} (this build reads version {})", cfg.schema_version, kSchemaVersion));
  if (root.contains("mode")) {
    std::string m;
    read(root, "mode", m, "config");
    cfg.mode = parse_mode(m);
  }

  if (root.contains("network")) {
    const auto& j = root["network"];
    reject_unknown(j, "network", {"builder", "graph", "n", "kappa", "p", "graph_seed", "edges_file", "w_file"});
    std::string builder = "laplacian";
    read(j, "builder", builder, "network");
    if (builder == "laplacian") cfg.network.builder = NetworkSpec::Builder::Laplacian;
    else if (builder == "metropolis") cfg.network.builder = NetworkSpec::Builder::Metropolis;
    else if (builder == "file") cfg.network.builder = NetworkSpec::Builder::File;
    else parse_error("network.builder", fmt::format("unknown builder '{}' (expected laplacian, metropolis or file)", builder));
    read(j, "graph", cfg.network.graph, "network");
    read(j, "n", cfg.network.n, "network");
    read(j, "kappa", cfg.network.kappa, "network");
    read(j, "p", cfg.network.p, "network");
    read(j, "graph_seed", cfg.network.graph_seed, "network");
    read(j, "edges_file", cfg.network.edges_file, "network");
    read(j, "w_file", cfg.network.w_file, "network");
  }

  if (root.contains("objective")) {
    const auto& j = root["objective"];
    reject_unknown(j, "objective", {"alpha", "agents"});
    read(j, "alpha", cfg.alpha, "objective");
    if (j.contains("agents")) {
      if (!j["agents"].is_array()) parse_error("objective.agents", "expected an array");
      for (std::size_t k = 0; k < j["agents"].size(); ++k)
        cfg.agents.push_back(parse_local(j["agents"][k], fmt::format("objective.agents[{}]", k)));
    }
  }

  if (root.contains("run")) {
    const auto& j = root["run"];
    reject_unknown(j, "run", {"epsilon", "policy", "iters", "trials", "seed", "stride", "timestamps"});
    read(j, "epsilon", cfg.epsilon, "run");
    if (j.contains("policy")) {
      std::string p;
      read(j, "policy", p, "run");
      cfg.policy = parse_stepsize_policy(p);
    }
    read(j, "iters", cfg.iters, "run");
    read(j, "trials", cfg.trials, "run");
    read(j, "seed", cfg.seed, "run");
    read(j, "stride", cfg.stride, "run");
    read(j, "timestamps", cfg.timestamps, "run");
  }

  if (root.contains("gossip")) {
    const auto& j = root["gossip"];
    reject_unknown(j, "gossip", {"gamma", "iters"});
    read(j, "gamma", cfg.gossip_gamma, "gossip");
    read(j, "iters", cfg.gossip_iters, "gossip");
  }

  if (root.contains("output")) {
    const auto& j = root["output"];
    reject_unknown(j, "output", {"dir", "plot"});
    read(j, "dir", cfg.out_dir, "output");
    read(j, "plot", cfg.plot, "output");
  }

  if (cfg.iters < 0) parse_error("run.iters", "must be non-negative");
  if (cfg.trials < 1) parse_error("run.trials", "must be at least 1");
  if (cfg.stride < 1) parse_error("run.stride", "must be at least 1");
  if (cfg.gossip_iters < 0) parse_error("gossip.iters", "must be non-negative");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string dump_config(const RunConfig& cfg) {
  json root;
  root["schema_version"] = cfg.schema_version;
  root["mode"] = std::string(to_string(cfg.mode));
  auto& net = root["network"];
  switch (cfg.network.builder) {
    case NetworkSpec::Builder::Laplacian: net["builder"] = "laplacian"; break;
    case NetworkSpec::Builder::Metropolis: net["builder"] = "metropolis"; break;
    case NetworkSpec::Builder::File: net["builder"] = "file"; break;
  }
  net["graph"] = cfg.network.graph;
  net["n"] = cfg.network.n;
  net["kappa"] = cfg.network.kappa;
  net["p"] = cfg.network.p;
  net["graph_seed"] = cfg.network.graph_seed;
  if (!cfg.network.edges_file.empty()) net["edges_file"] = cfg.network.edges_file;
  if (!cfg.network.w_file.empty()) net["w_file"] = cfg.network.w_file;
  root["objective"]["alpha"] = cfg.alpha;
  auto& agents = root["objective"]["agents"] = json::array();
  for (const auto& s : cfg.agents) {
    json a;
    a["builder"] = s.kind == LocalSpec::Kind::Quadratic ? "quadratic" : "logcosh_ridge";
    a["a"] = s.a;
    a["b"] = s.b;
    if (s.kind == LocalSpec::Kind::LogCoshRidge) a["r"] = s.r;
    agents.push_back(a);
  }
  auto& run = root["run"];
  run["epsilon"] = cfg.epsilon;
  run["policy"] = std::string(to_string(cfg.policy));
  run["iters"] = cfg.iters;
  run["trials"] = cfg.trials;
  run["seed"] = cfg.seed;
  run["stride"] = cfg.stride;
  run["timestamps"] = cfg.timestamps;
  root["gossip"]["gamma"] = cfg.gossip_gamma;
  root["gossip"]["iters"] = cfg.gossip_iters;
  root["output"]["dir"] = cfg.out_dir;
  root["output"]["plot"] = cfg.plot;
  return root.dump(2) + "\n";
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (std::filesystem::path(base_dir) / path).string();
}

Graph build_graph(const NetworkSpec& spec, const std::string& base_dir) {
  const auto& g = spec.graph;
  if (g == "complete") return Graph::complete(spec.n);
  if (g == "path") return Graph::path(spec.n);
  if (g == "ring") return Graph::ring(spec.n);
  if (g == "star") return Graph::star(spec.n);
  if (g == "erdos_renyi") return Graph::erdos_renyi(spec.n, spec.p, spec.graph_seed);
  if (g == "edge_list") {
    if (spec.edges_file.empty()) parse_error("network.edges_file", "graph 'edge_list' needs an edges_file");
    return read_edge_list_file(resolve(base_dir, spec.edges_file));
  }
  parse_error("network.graph",
              fmt::format("unknown graph '{}' (expected complete, path, ring, star, erdos_renyi or edge_list)", g));
}

}  // namespace

ConsensusNetwork build_network(const NetworkSpec& spec, const std::string& base_dir) {
  switch (spec.builder) {
    case NetworkSpec::Builder::Laplacian: return laplacian_weights(build_graph(spec, base_dir), spec.kappa);
    case NetworkSpec::Builder::Metropolis: return metropolis_weights(build_graph(spec, base_dir));
    case NetworkSpec::Builder::File: {
      if (spec.w_file.empty()) parse_error("network.w_file", "builder 'file' needs a w_file");
      const Mat<double> W = read_matrix_csv_file(resolve(base_dir, spec.w_file));
      // Without an explicit edge list the graph is read off W's sparsity.
      const Graph graph = spec.edges_file.empty() ? graph_from_weights(W)
                                                  : read_edge_list_file(resolve(base_dir, spec.edges_file));
      return ConsensusNetwork::validate(W, graph);
    }
  }
  parse_error("network.builder", "unknown builder");
}

RunConfig paper_fig1_config() {
  RunConfig cfg;
  cfg.mode = Mode::Compare;
  cfg.network.builder = NetworkSpec::Builder::Laplacian;
  cfg.network.graph = "complete";
  cfg.network.n = 5;
  cfg.network.kappa = 0.125;
  cfg.alpha = 1.0;
  for (int i = 1; i <= 5; ++i) cfg.agents.push_back(LocalSpec::quadratic(1.0, i));
  cfg.epsilon = 0.8;
  cfg.policy = StepsizePolicy::Theorem2;
  cfg.iters = 300;
  cfg.trials = 1;
  cfg.seed = 1;
  cfg.gossip_gamma = 0.05;
  cfg.gossip_iters = 5000;
  cfg.out_dir = "out";
  return cfg;
}

}  // namespace annewton
