// Copyright 2026 The qcoord Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "qcoord/experiment.h"
#include "qcoord/game.h"
#include "qcoord/mechanism.h"

namespace qcoord::cli {
namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qcoord_cli_" + name);
}

double Field(const std::string& text, const std::string& line_prefix,
             const std::string& key) {
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    if (line.find(line_prefix) == std::string::npos) continue;
    const auto at = line.find(key + "=");
    if (at == std::string::npos) continue;
    return std::stod(line.substr(at + key.size() + 1));
  }
  ADD_FAILURE() << "no " << key << " on a line containing " << line_prefix;
  return 0.0;
}

TEST(Cli, NashDriving) {
  const auto r = Invoke({"nash", "--game", "driving"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("pure Nash equilibria: (L,L), (R,R)"), std::string::npos)
      << r.out;
}

TEST(Cli, NashRpsPair) {
  const auto r = Invoke({"nash", "--game", "rps-pair"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("pure Nash equilibria: none"), std::string::npos);
  EXPECT_NE(r.out.find("uniform mixed profile: verified equilibrium"),
            std::string::npos);
  EXPECT_NE(r.out.find("expected payoff under uniform: (1/3, 1/3)"),
            std::string::npos)
      << r.out;
}

TEST(Cli, NashAlliedRpsMatchesLibrary) {
  const auto r = Invoke({"nash", "--game", "allied-rps"});
  EXPECT_EQ(r.code, kExitOk);
  const PayoffTable game = AlliedRpsGame();
  std::string listed;
  for (const auto& joint : PureNashEquilibria(game)) {
    if (!listed.empty()) listed += ", ";
    listed += game.FormatJoint(joint);
  }
  EXPECT_NE(r.out.find("pure Nash equilibria: " + (listed.empty() ? "none" : listed)),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("(1/9, 1/9, 7/9)"), std::string::npos) << r.out;
}

TEST(Cli, NashUnknownGame) {
  const auto r = Invoke({"nash", "--game", "chess"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("chess"), std::string::npos);
}

TEST(Cli, StateBell) {
  const auto r = Invoke({"state", "--state", "bell", "--parties", "2", "--outcomes", "2"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("|00>  amplitude=0.707107+0.000000i  probability=0.500000"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("|01>  amplitude=0.000000+0.000000i  probability=0.000000"),
            std::string::npos);
  EXPECT_NE(r.out.find("|11>  amplitude=0.707107+0.000000i  probability=0.500000"),
            std::string::npos);
}

TEST(Cli, StateGhz) {
  const auto r = Invoke({"state", "--state", "ghz", "--parties", "3", "--outcomes", "2"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("|000>  amplitude=0.707107+0.000000i  probability=0.500000"),
            std::string::npos);
  EXPECT_NE(r.out.find("|111>  amplitude=0.707107+0.000000i  probability=0.500000"),
            std::string::npos);
  EXPECT_NE(r.out.find("|010>  amplitude=0.000000+0.000000i  probability=0.000000"),
            std::string::npos);
}

TEST(Cli, StateBiased) {
  const auto r = Invoke({"state", "--state", "biased", "--coeff-a", "0.5477226",
                      "--coeff-b", "0.4472136"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("|00>  amplitude=0.547723+0.000000i  probability=0.300000"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("|01>  amplitude=0.447214+0.000000i  probability=0.200000"),
            std::string::npos);
  EXPECT_NE(r.out.find("|10>  amplitude=0.447214+0.000000i  probability=0.200000"),
            std::string::npos);
  EXPECT_NE(r.out.find("|11>  amplitude=0.547723+0.000000i  probability=0.300000"),
            std::string::npos);
}

TEST(Cli, StateBiasedReportsResidual) {
  const auto r = Invoke({"state", "--state", "biased", "--coeff-a", "0.5", "--coeff-b", "0.4"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("residual 1.800e-01"), std::string::npos) << r.err;
}

TEST(Cli, StateInvalidParameters) {
  EXPECT_EQ(Invoke({"state", "--state", "bell", "--parties", "1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"state", "--state", "ghz", "--outcomes", "0"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"state", "--state", "w"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"state", "--state", "biased"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"state", "--state", "bell", "--parties", "two"}).code, kExitUsage);
}

TEST(Cli, RunEntangledAlliedRps) {
  const auto r = Invoke({"run", "--game", "allied-rps", "--mechanism", "entangled",
                      "--adversary", "uniform", "--rounds", "1000000", "--seed", "42"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(Field(r.out, "player 0", "mean_payoff"), 1.0 / 3, 0.003);
  EXPECT_NEAR(Field(r.out, "player 1", "mean_payoff"), 1.0 / 3, 0.003);
  EXPECT_EQ(Field(r.out, "player 0", "coordination_rate"), 1.0);
}

TEST(Cli, RunEntangledDriving) {
  const auto r = Invoke({"run", "--game", "driving", "--mechanism", "entangled",
                      "--rounds", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Field(r.out, "player 0", "coordination_rate"), 1.0);
  EXPECT_EQ(Field(r.out, "player 1", "mean_payoff"), 2.0);
}

TEST(Cli, RunBiasedPairDegeneratesToBell) {
  const auto r = Invoke({"run", "--game", "biased-pair", "--mechanism", "entangled",
                      "--coeff-a", "0.7071068", "--coeff-b", "0", "--rounds", "5000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Field(r.out, "player 0", "coordination_rate"), 1.0);
  EXPECT_EQ(Field(r.out, "player 0", "mean_payoff"), 1.0);
}

TEST(Cli, RunBiasedPairNeedsCoefficients) {
  const auto r = Invoke({"run", "--game", "biased-pair", "--mechanism", "entangled",
                      "--rounds", "10"});
  EXPECT_EQ(r.code, kExitUsage);
  const auto bad = Invoke({"run", "--game", "biased-pair", "--mechanism", "entangled",
                        "--coeff-a", "0.6", "--coeff-b", "0.6", "--rounds", "10"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("residual"), std::string::npos) << bad.err;
}

// The CLI must be a thin adapter over the library.
TEST(Cli, RunWritesWhatTheLibraryComputes) {
  const auto path = TempPath("run.csv");
  const auto r = Invoke({"run", "--game", "allied-rps", "--mechanism", "private-coin",
                      "--jam-probability", "0.25", "--adversary", "jammer",
                      "--rounds", "20000", "--seed", "3", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;

  ExperimentConfig config;
  config.game = "allied-rps";
  config.mechanism.kind = MechanismKind::kPrivateCoinBroadcast;
  config.mechanism.jam_probability = 0.25;
  config.adversary = AdversaryModel::Jammer();
  config.rounds = 20000;
  config.master_seed = 3;
  EXPECT_EQ(ReadFile(path), FormatCsv({RunExperiment(config)}));
  std::filesystem::remove(path);
}

TEST(Cli, RunJsonByExtension) {
  const auto path = TempPath("run.json");
  const auto r = Invoke({"run", "--game", "driving", "--mechanism", "prng",
                      "--rounds", "100", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto json = nlohmann::json::parse(ReadFile(path));
  EXPECT_EQ(json.at("results").at(0).at("mechanism"), "prng");
  std::filesystem::remove(path);
}

TEST(Cli, ConfigFileWithOverrides) {
  const auto config_path = TempPath("config.json");
  {
    std::ofstream f(config_path);
    f << R"({"game": "driving", "mechanism": "independent", "rounds": 100000,
            "seed": 9})";
  }
  const auto from_file = Invoke({"run", "--config", config_path.string()});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_NEAR(Field(from_file.out, "player 0", "mean_payoff"), -0.5, 0.03);

  const auto overridden = Invoke({"run", "--config", config_path.string(),
                               "--mechanism", "entangled"});
  ASSERT_EQ(overridden.code, kExitOk) << overridden.err;
  EXPECT_EQ(Field(overridden.out, "player 0", "mean_payoff"), 2.0);
  EXPECT_NE(overridden.out.find("seed=9"), std::string::npos);
  std::filesystem::remove(config_path);
}

TEST(Cli, BrokenConfigFile) {
  const auto config_path = TempPath("broken.json");
  {
    std::ofstream f(config_path);
    f << "{not json";
  }
  EXPECT_EQ(Invoke({"run", "--config", config_path.string()}).code, kExitUsage);
  EXPECT_EQ(Invoke({"run", "--config", "/nonexistent/config.json"}).code, kExitUsage);
  std::filesystem::remove(config_path);
}

TEST(Cli, CompareSharesTheSeed) {
  const auto path = TempPath("compare.csv");
  const auto r = Invoke({"compare", "--game", "allied-rps", "--mechanisms",
                      "independent,entangled,preshared@observer", "--rounds", "200000",
                      "--seed", "4", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadFile(path);
  EXPECT_NE(csv.find("allied-rps,independent,uniform,200000,4,0,"), std::string::npos);
  EXPECT_NE(csv.find("allied-rps,entangled,uniform,200000,4,0,"), std::string::npos);
  EXPECT_NE(csv.find("allied-rps,preshared,observer,200000,4,0,0.000000,"),
            std::string::npos)
      << csv;
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"fly"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--rounds", "10"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--mechanism", "telepathy",
                 "--rounds", "10"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--mechanism", "entangled",
                 "--rounds", "0"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--mechanism", "entangled",
                 "--adversary", "observer", "--rounds", "10"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "allied-rps", "--mechanism", "entangled",
                 "--adversary", "psychic", "--rounds", "10"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--mechanism", "entangled",
                 "--rounds", "10", "--out", "x.csv", "--format", "xml"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"run", "--game", "driving", "--mechanism", "private-coin",
                 "--jam-probability", "1.5", "--rounds", "10"}).code,
            kExitUsage);
}

TEST(Cli, UnwritableOutputIsRuntimeError) {
  const auto r = Invoke({"run", "--game", "driving", "--mechanism", "entangled",
                      "--rounds", "10", "--out", "/nonexistent-dir/out.csv"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, HelpListsEveryName) {
  const auto r = Invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const auto& name : GameNames()) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
  for (const auto& name : MechanismNames()) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
  for (const auto& name : AdversaryNames()) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
  EXPECT_NE(r.out.find("entangled-biased"), std::string::npos);
  for (const char* sub : {"run", "compare", "nash", "state"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, SubcommandHelp) {
  const auto r = Invoke({"run", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("--mechanism"), std::string::npos);
  EXPECT_NE(r.out.find("seed-cracker"), std::string::npos);
}

}  // namespace
}  // namespace qcoord::cli
