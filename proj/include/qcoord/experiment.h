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

// Reproducible Monte Carlo over game x mechanism x adversary.
//
// Round r draws every uniform it needs from substreams keyed by
// (master_seed, r), so a round's outcome never depends on which thread plays
// it or in what order. Rounds are summed in fixed-size blocks and the blocks
// are reduced in round order, making results bit-identical for any thread
// count.

#ifndef QCOORD_EXPERIMENT_H_
#define QCOORD_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcoord/game.h"
#include "qcoord/mechanism.h"
#include "qcoord/quantum_state.h"

namespace qcoord {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kIndependent;
  double jam_probability = 0.0;
  // Entangled only: use a|AA> + b|AB> + b|BA> + a|BB> instead of GHZ.
  std::optional<std::pair<Amplitude, Amplitude>> biased_coefficients;
  double coefficient_tolerance = kNormTolerance;

  // Stable name; "entangled-biased" when coefficients are set.
  std::string Name() const;
};

enum class OutputFormat { kCsv, kJson };
OutputFormat ParseOutputFormat(const std::string& name);

struct ExperimentConfig {
  std::string game = "allied-rps";
  MechanismSpec mechanism;
  // Must be set for games with an opponent seat and unset otherwise.
  std::optional<AdversaryModel> adversary;
  std::uint64_t rounds = 1;
  std::uint64_t master_seed = 0;
  // Subtracted from each ally's payoff in rounds whose broadcast was detected.
  double detection_penalty = 0.0;
  // Worker threads; 0 picks the hardware concurrency. Never affects results.
  unsigned threads = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::kCsv;
};

// Which seats the allies fill and where the opponent, if any, sits.
struct GameRoles {
  int num_allies = 0;
  std::optional<int> opponent;
};

// Games whose last player is named "opponent" have one adversary seat; every
// other seat is an ally.
GameRoles RolesFor(const PayoffTable& game);

Mechanism BuildMechanism(const MechanismSpec& spec, int num_allies,
                         int num_choices, std::uint64_t master_seed);

struct RoundOutcome {
  JointChoice joint;
  std::vector<double> payoffs;
  bool coordinated = false;
  Leakage leakage;
};

// A validated configuration, ready to play rounds.
class ExperimentPlan {
 public:
  // Throws ConfigError on an invalid or shape-incompatible configuration.
  explicit ExperimentPlan(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const PayoffTable& game() const { return game_; }
  const Mechanism& mechanism() const { return mechanism_; }
  const GameRoles& roles() const { return roles_; }

  // Pure in (config, round).
  RoundOutcome PlayRound(std::uint64_t round) const;

 private:
  ExperimentConfig config_;
  PayoffTable game_;
  GameRoles roles_;
  Mechanism mechanism_;
  std::vector<std::vector<double>> payoffs_;
};

struct PlayerStats {
  double mean_payoff = 0.0;
  double std_err = 0.0;
};

struct SegmentStats {
  std::uint64_t first_round = 0;
  std::uint64_t end_round = 0;  // exclusive
  std::vector<PlayerStats> players;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string game;
  std::string mechanism;
  std::string adversary;  // "none" without an opponent seat
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  std::vector<PlayerStats> players;
  double coordination_rate = 0.0;
  // Rounds per leakage kind, plus "jammed" and "detected" channel events.
  std::map<std::string, std::uint64_t> leakage_counts;
  // Before and after the crack round when the adversary is a seed cracker.
  std::vector<SegmentStats> segments;
};

ExperimentResult RunExperiment(const ExperimentConfig& config);

// Exact expectation by enumerating every (ally choices, adversary choice)
// pair. Supports independent, entangled and preshared mechanisms against no
// adversary, a uniform one or an observer; throws UnsupportedError otherwise.
std::vector<double> AnalyticExpectedResult(const ExperimentConfig& config);

struct ComparisonEntry {
  MechanismSpec mechanism;
  // Replaces the base configuration's adversary when set.
  std::optional<AdversaryModel> adversary;
};

// One run per entry, all sharing the base configuration's master seed.
std::vector<ExperimentResult> CompareMechanisms(
    const ExperimentConfig& base, const std::vector<ComparisonEntry>& entries);

// CSV columns: game, mechanism, adversary, rounds, seed, player_index,
// mean_payoff, std_err, coordination_rate. One row per player.
std::string FormatCsv(const std::vector<ExperimentResult>& results);
std::string FormatJson(const std::vector<ExperimentResult>& results);

nlohmann::json ConfigToJson(const ExperimentConfig& config);
nlohmann::json GameToJson(const PayoffTable& game);

// Throws IoError when the file cannot be written.
void WriteResults(const std::vector<ExperimentResult>& results,
                  OutputFormat format, const std::string& path);

}  // namespace qcoord

#endif  // QCOORD_EXPERIMENT_H_
