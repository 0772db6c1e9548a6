#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "annewton/config.hpp"

using namespace annewton;

namespace {

const std::string kFixtures = std::string(ANNEWTON_SOURCE_DIR) + "/tests/fixtures";

ErrorCode parse_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Config, BundledFig1MatchesBuiltIn) {
  const RunConfig file = load_config(std::string(ANNEWTON_SOURCE_DIR) + "/configs/paper_fig1.json");
  const RunConfig built = paper_fig1_config();
  EXPECT_EQ(file.mode, built.mode);
  EXPECT_EQ(file.agents, built.agents);
  EXPECT_EQ(file.alpha, built.alpha);
  EXPECT_EQ(file.epsilon, 0.8);
  EXPECT_EQ(file.policy, StepsizePolicy::Theorem2);
  EXPECT_EQ(file.iters, built.iters);
  EXPECT_EQ(file.gossip_gamma, 0.05);
  EXPECT_EQ(file.network.kappa, 0.125);
  const auto net = build_network(file.network, file.base_dir);
  EXPECT_EQ(net.W(), build_network(built.network).W());
}

TEST(Config, MinimalDocumentUsesDefaults) {
  const RunConfig c = parse_config(R"({"schema_version": 1})");
  EXPECT_EQ(c.mode, Mode::Run);
  EXPECT_EQ(c.epsilon, 0.8);
  EXPECT_TRUE(c.agents.empty());
}

TEST(Config, FailsClosed) {
  EXPECT_EQ(parse_code(R"({})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 2})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "extra": 1})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "run": {"epsilon": 0.5, "eps": 1}})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "run": {"epsilon": "big"}})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "run": {"trials": 0}})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "run": {"policy": "fast"}})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "mode": "plot"})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "network": {"builder": "random"}})"), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "objective": {"agents": [{"builder": "cubic"}]}})"),
            ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1, "objective": {"agents": [{"builder": "quadratic", "r": 1}]}})"),
            ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code(R"({"schema_version": 1,)"), ErrorCode::ConfigParse);
  try {
    parse_config(R"({"schema_version": 1, "gossip": {"gama": 0.1}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gama"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
}

TEST(Config, DumpParseRoundTrip) {
  RunConfig c = paper_fig1_config();
  c.agents.push_back(LocalSpec::logcosh_ridge(1.5, -2.0, 0.25));
  c.network.graph = "erdos_renyi";
  c.network.p = 0.4;
  c.seed = 123456789012345ULL;
  c.policy = StepsizePolicy::Unchecked;
  c.timestamps = false;
  const RunConfig back = parse_config(dump_config(c));
  EXPECT_EQ(dump_config(back), dump_config(c));
  EXPECT_EQ(back.agents, c.agents);
  EXPECT_EQ(back.seed, c.seed);
}

TEST(Config, NetworkBuilders) {
  NetworkSpec s;
  s.graph = "ring";
  s.n = 6;
  s.kappa = 0.3;
  EXPECT_EQ(build_network(s).graph().edges().size(), 6u);
  s.builder = NetworkSpec::Builder::Metropolis;
  s.graph = "star";
  EXPECT_EQ(build_network(s).graph().degree(0), 5u);
  s.graph = "edge_list";
  s.edges_file = "ring6.edges";
  EXPECT_EQ(build_network(s, kFixtures).graph().edges().size(), 6u);
  s.graph = "hypercube";
  EXPECT_THROW(build_network(s), Error);
  s.graph = "edge_list";
  s.edges_file.clear();
  EXPECT_THROW(build_network(s), Error);
}

TEST(Config, WeightFileBuilder) {
  const auto dir = std::filesystem::temp_directory_path() / "annewton-config-test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "w.csv") << "0.75,0.25,0\n0.25,0.5,0.25\n0,0.25,0.75\n";
  }
  NetworkSpec s;
  s.builder = NetworkSpec::Builder::File;
  s.w_file = "w.csv";
  const auto net = build_network(s, dir.string());
  EXPECT_EQ(net.graph().edges().size(), 2u);
  EXPECT_EQ(net.delta(), 0.5);
  EXPECT_EQ(net.Delta(), 0.75);

  s.w_file = "broken_w.csv";
  try {
    build_network(s, kFixtures);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRowStochastic);
  }
  std::filesystem::remove_all(dir);
}

TEST(Config, ModeNames) {
  for (auto m : {Mode::Validate, Mode::Bounds, Mode::Run, Mode::Compare, Mode::Accept})
    EXPECT_EQ(parse_mode(to_string(m)), m);
}
