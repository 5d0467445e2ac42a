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

#include "qcoord/experiment.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "qcoord/random_streams.h"

namespace qcoord {

std::string MechanismSpec::Name() const {
  if (kind == MechanismKind::kEntangled && biased_coefficients) {
    return "entangled-biased";
  }
  return std::string(MechanismName(kind));
}

OutputFormat ParseOutputFormat(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ConfigError(fmt::format("unknown output format '{}'", name));
}

GameRoles RolesFor(const PayoffTable& game) {
  const int last = game.num_players() - 1;
  if (last > 0 && game.player_name(last) == "opponent") {
    return {last, last};
  }
  return {game.num_players(), std::nullopt};
}

Mechanism BuildMechanism(const MechanismSpec& spec, int num_allies,
                         int num_choices, std::uint64_t master_seed) {
  if (spec.biased_coefficients && spec.kind != MechanismKind::kEntangled) {
    throw ConfigError("biased coefficients only apply to the entangled mechanism");
  }
  switch (spec.kind) {
    case MechanismKind::kIndependent:
      return Mechanism::Independent(num_allies, num_choices);
    case MechanismKind::kPresharedSequence:
      return Mechanism::PresharedSequence(num_allies, num_choices);
    case MechanismKind::kSharedSeedPrng:
      return Mechanism::SharedSeedPrng(
          num_allies, num_choices,
          DeriveKey(master_seed, stream_domain::kCommonSeed));
    case MechanismKind::kPrivateCoinBroadcast:
      return Mechanism::PrivateCoinBroadcast(num_allies, num_choices,
                                             spec.jam_probability);
    case MechanismKind::kEntangled:
      if (spec.biased_coefficients) {
        if (num_allies != 2 || num_choices != 2) {
          throw ConfigError(
              "the biased pair state needs exactly 2 allies with 2 choices");
        }
        return Mechanism::Entangled(
            BiasedPairState(spec.biased_coefficients->first,
                            spec.biased_coefficients->second,
                            spec.coefficient_tolerance));
      }
      return Mechanism::Entangled(BellState(num_allies, num_choices));
  }
  throw ConfigError("unknown mechanism kind");
}

namespace {

PayoffTable LoadGame(const std::string& name) {
  try {
    return GameByName(name);
  } catch (const GameError& e) {
    throw ConfigError(e.what());
  }
}

GameRoles CheckedRoles(const PayoffTable& game, const ExperimentConfig& config) {
  if (config.rounds < 1) throw ConfigError("rounds must be at least 1");
  const GameRoles roles = RolesFor(game);
  if (roles.opponent && !config.adversary) {
    throw ConfigError(fmt::format("{} has an opponent seat; an adversary is "
                                  "required",
                                  game.name()));
  }
  if (!roles.opponent && config.adversary) {
    throw ConfigError(
        fmt::format("{} has no opponent seat; drop the adversary", game.name()));
  }
  const int k = game.num_choices(0);
  for (int p = 0; p < roles.num_allies; ++p) {
    if (game.num_choices(p) != k) {
      throw ConfigError("allies must share the same choice set");
    }
  }
  return roles;
}

Mechanism CheckedMechanism(const ExperimentConfig& config,
                           const PayoffTable& game, const GameRoles& roles) {
  try {
    return BuildMechanism(config.mechanism, roles.num_allies,
                          game.num_choices(0), config.master_seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{} cannot drive {}: {}",
                                  config.mechanism.Name(), game.name(),
                                  e.what()));
  }
}

}  // namespace

ExperimentPlan::ExperimentPlan(ExperimentConfig config)
    : config_(std::move(config)),
      game_(LoadGame(config_.game)),
      roles_(CheckedRoles(game_, config_)),
      mechanism_(CheckedMechanism(config_, game_, roles_)) {
  payoffs_.reserve(game_.num_joint_choices());
  for (std::size_t i = 0; i < game_.num_joint_choices(); ++i) {
    std::vector<double> row;
    for (const Rational& x : game_.PayoffAt(i)) row.push_back(ToDouble(x));
    payoffs_.push_back(std::move(row));
  }
}

RoundOutcome ExperimentPlan::PlayRound(std::uint64_t round) const {
  CounterStream stream(
      DeriveKey(config_.master_seed, stream_domain::kRound, round));

  std::array<double, 16> buffer{};
  std::vector<double> spill;
  const std::size_t needed = mechanism_.UniformsPerRound();
  if (needed > buffer.size()) spill.resize(needed);
  const std::span<double> uniforms =
      spill.empty() ? std::span<double>(buffer.data(), needed)
                    : std::span<double>(spill);
  if (mechanism_.kind() == MechanismKind::kPresharedSequence) {
    // The sealed boxes depend only on (seed, round): fixed before play starts.
    uniforms[0] =
        CounterStream(DeriveKey(config_.master_seed, stream_domain::kCommitment,
                                round))
            .NextUniform();
  } else {
    for (double& u : uniforms) u = stream.NextUniform();
  }

  UniformStream source(uniforms);
  RoundDraw draw = DrawChoices(mechanism_, round, source);

  RoundOutcome outcome;
  outcome.coordinated =
      std::adjacent_find(draw.choices.begin(), draw.choices.end(),
                         std::not_equal_to<>()) == draw.choices.end();
  outcome.joint = std::move(draw.choices);
  if (roles_.opponent) {
    const int move = AdversaryChoice(*config_.adversary, round, draw.leakage,
                                     game_, *roles_.opponent,
                                     stream.NextUniform());
    outcome.joint.insert(outcome.joint.begin() + *roles_.opponent, move);
  }
  outcome.payoffs = payoffs_[game_.Flatten(outcome.joint)];
  if (config_.detection_penalty != 0.0) {
    if (const auto* event = std::get_if<ChannelEvent>(&draw.leakage);
        event && event->detected) {
      for (int p = 0; p < game_.num_players(); ++p) {
        if (p != roles_.opponent) {
          outcome.payoffs[static_cast<std::size_t>(p)] -=
              config_.detection_penalty;
        }
      }
    }
  }
  outcome.leakage = std::move(draw.leakage);
  return outcome;
}

namespace {

constexpr std::uint64_t kBlockRounds = 8192;

struct Moments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::uint64_t count = 0;

  explicit Moments(std::size_t players) : sum(players), sum_sq(players) {}

  void Add(const std::vector<double>& payoffs) {
    for (std::size_t p = 0; p < payoffs.size(); ++p) {
      sum[p] += payoffs[p];
      sum_sq[p] += payoffs[p] * payoffs[p];
    }
    ++count;
  }

  void Merge(const Moments& other) {
    for (std::size_t p = 0; p < sum.size(); ++p) {
      sum[p] += other.sum[p];
      sum_sq[p] += other.sum_sq[p];
    }
    count += other.count;
  }

  std::vector<PlayerStats> Stats() const {
    std::vector<PlayerStats> stats(sum.size());
    if (count == 0) return stats;
    const auto n = static_cast<double>(count);
    for (std::size_t p = 0; p < sum.size(); ++p) {
      const double mean = sum[p] / n;
      double variance = 0.0;
      if (count > 1) {
        variance = std::max(0.0, (sum_sq[p] - n * mean * mean) / (n - 1.0));
      }
      stats[p] = {mean, std::sqrt(variance / n)};
    }
    return stats;
  }
};

struct BlockTally {
  Moments overall;
  std::vector<Moments> segments;
  std::uint64_t coordinated = 0;
  std::map<std::string, std::uint64_t> leakage;

  BlockTally(std::size_t players, std::size_t num_segments)
      : overall(players), segments(num_segments, Moments(players)) {}
};

// Segment boundaries: [0, crack) and [crack, rounds) for a seed cracker.
std::vector<std::uint64_t> SegmentStarts(const ExperimentConfig& config) {
  if (config.adversary &&
      config.adversary->kind == AdversaryKind::kSeedCracker) {
    return {0, std::min(config.adversary->crack_after_round, config.rounds)};
  }
  return {};
}

BlockTally TallyBlock(const ExperimentPlan& plan, std::uint64_t first,
                      std::uint64_t end,
                      const std::vector<std::uint64_t>& starts) {
  BlockTally tally(static_cast<std::size_t>(plan.game().num_players()),
                   starts.size());
  for (std::uint64_t r = first; r < end; ++r) {
    const RoundOutcome outcome = plan.PlayRound(r);
    tally.overall.Add(outcome.payoffs);
    if (!starts.empty()) {
      const auto seg = static_cast<std::size_t>(
          std::upper_bound(starts.begin(), starts.end(), r) - starts.begin() -
          1);
      tally.segments[seg].Add(outcome.payoffs);
    }
    if (outcome.coordinated) ++tally.coordinated;
    ++tally.leakage[std::string(LeakageName(outcome.leakage))];
    if (const auto* event = std::get_if<ChannelEvent>(&outcome.leakage)) {
      if (event->jammed) ++tally.leakage["jammed"];
      if (event->detected) ++tally.leakage["detected"];
    }
  }
  return tally;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  const ExperimentPlan plan(config);
  const std::vector<std::uint64_t> starts = SegmentStarts(config);
  const std::uint64_t num_blocks =
      (config.rounds + kBlockRounds - 1) / kBlockRounds;

  std::vector<std::optional<BlockTally>> blocks(num_blocks);
  auto work = [&](std::uint64_t worker, std::uint64_t stride) {
    for (std::uint64_t b = worker; b < num_blocks; b += stride) {
      const std::uint64_t first = b * kBlockRounds;
      const std::uint64_t end = std::min(config.rounds, first + kBlockRounds);
      blocks[b] = TallyBlock(plan, first, end, starts);
    }
  };

  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, num_blocks));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  const auto players = static_cast<std::size_t>(plan.game().num_players());
  BlockTally total(players, starts.size());
  for (const auto& block : blocks) {
    total.overall.Merge(block->overall);
    for (std::size_t s = 0; s < starts.size(); ++s) {
      total.segments[s].Merge(block->segments[s]);
    }
    total.coordinated += block->coordinated;
    for (const auto& [kind, count] : block->leakage) total.leakage[kind] += count;
  }

  ExperimentResult result;
  result.config = config;
  result.game = plan.game().name();
  result.mechanism = config.mechanism.Name();
  result.adversary = config.adversary
                         ? std::string(AdversaryName(config.adversary->kind))
                         : "none";
  result.rounds = config.rounds;
  result.seed = config.master_seed;
  result.players = total.overall.Stats();
  result.coordination_rate = static_cast<double>(total.coordinated) /
                             static_cast<double>(config.rounds);
  result.leakage_counts = std::move(total.leakage);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::uint64_t end = s + 1 < starts.size() ? starts[s + 1] : config.rounds;
    result.segments.push_back({starts[s], end, total.segments[s].Stats()});
  }
  return result;
}

std::vector<double> AnalyticExpectedResult(const ExperimentConfig& config) {
  const PayoffTable game = LoadGame(config.game);
  const GameRoles roles = CheckedRoles(game, config);
  const int k = game.num_choices(0);

  std::vector<std::pair<double, std::vector<int>>> ally_outcomes;
  switch (config.mechanism.kind) {
    case MechanismKind::kIndependent: {
      std::size_t combos = 1;
      for (int a = 0; a < roles.num_allies; ++a) combos *= static_cast<std::size_t>(k);
      for (std::size_t i = 0; i < combos; ++i) {
        ally_outcomes.emplace_back(
            1.0 / static_cast<double>(combos),
            DecodeJointIndex(i, roles.num_allies, k).outcomes);
      }
      break;
    }
    case MechanismKind::kPresharedSequence:
      for (int c = 0; c < k; ++c) {
        ally_outcomes.emplace_back(
            1.0 / k, std::vector<int>(static_cast<std::size_t>(roles.num_allies), c));
      }
      break;
    case MechanismKind::kEntangled: {
      const Mechanism mech = CheckedMechanism(config, game, roles);
      const ProbabilityTable& born = *mech.distribution();
      for (std::size_t i = 0; i < born.size(); ++i) {
        if (born[i] > 0.0) {
          ally_outcomes.emplace_back(
              born[i], DecodeJointIndex(i, roles.num_allies, k).outcomes);
        }
      }
      break;
    }
    default:
      throw UnsupportedError(fmt::format("no closed form for the {} mechanism",
                                         config.mechanism.Name()));
  }

  if (config.adversary &&
      config.adversary->kind != AdversaryKind::kUniformRandom &&
      config.adversary->kind != AdversaryKind::kObserver) {
    throw UnsupportedError(fmt::format(
        "no closed form against the {} adversary",
        AdversaryName(config.adversary->kind)));
  }

  std::vector<double> expected(static_cast<std::size_t>(game.num_players()));
  auto accumulate = [&](double weight, const JointChoice& joint) {
    const PayoffVector& payoff = game.Payoff(joint);
    for (std::size_t p = 0; p < expected.size(); ++p) {
      expected[p] += weight * ToDouble(payoff[p]);
    }
  };

  for (const auto& [prob, allies] : ally_outcomes) {
    if (!roles.opponent) {
      accumulate(prob, allies);
      continue;
    }
    const int seat = *roles.opponent;
    const int opp_choices = game.num_choices(seat);
    JointChoice joint = allies;
    joint.insert(joint.begin() + seat, 0);
    const bool sees_choices =
        config.adversary->kind == AdversaryKind::kObserver &&
        config.mechanism.kind == MechanismKind::kPresharedSequence;
    if (sees_choices) {
      joint[static_cast<std::size_t>(seat)] = BestResponse(game, seat, joint);
      accumulate(prob, joint);
      continue;
    }
    for (int c = 0; c < opp_choices; ++c) {
      joint[static_cast<std::size_t>(seat)] = c;
      accumulate(prob / opp_choices, joint);
    }
  }
  return expected;
}

std::vector<ExperimentResult> CompareMechanisms(
    const ExperimentConfig& base, const std::vector<ComparisonEntry>& entries) {
  std::vector<ExperimentResult> results;
  results.reserve(entries.size());
  for (const ComparisonEntry& entry : entries) {
    ExperimentConfig config = base;
    config.mechanism = entry.mechanism;
    if (entry.adversary) config.adversary = entry.adversary;
    results.push_back(RunExperiment(config));
  }
  return results;
}

std::string FormatCsv(const std::vector<ExperimentResult>& results) {
  std::string out =
      "game,mechanism,adversary,rounds,seed,player_index,mean_payoff,std_err,"
      "coordination_rate\n";
  for (const ExperimentResult& r : results) {
    for (std::size_t p = 0; p < r.players.size(); ++p) {
      out += fmt::format("{},{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", r.game,
                         r.mechanism, r.adversary, r.rounds, r.seed, p,
                         r.players[p].mean_payoff, r.players[p].std_err,
                         r.coordination_rate);
    }
  }
  return out;
}

nlohmann::json ConfigToJson(const ExperimentConfig& config) {
  nlohmann::json j;
  j["game"] = config.game;
  j["mechanism"] = config.mechanism.Name();
  if (config.mechanism.kind == MechanismKind::kPrivateCoinBroadcast) {
    j["jam-probability"] = config.mechanism.jam_probability;
  }
  if (const auto& coeffs = config.mechanism.biased_coefficients) {
    j["coeff-a"] = {coeffs->first.real(), coeffs->first.imag()};
    j["coeff-b"] = {coeffs->second.real(), coeffs->second.imag()};
  }
  if (config.adversary) {
    j["adversary"] = AdversaryName(config.adversary->kind);
    if (config.adversary->kind == AdversaryKind::kSeedCracker) {
      j["crack-after"] = config.adversary->crack_after_round;
    }
  } else {
    j["adversary"] = "none";
  }
  j["rounds"] = config.rounds;
  j["seed"] = config.master_seed;
  j["detection-penalty"] = config.detection_penalty;
  return j;
}

nlohmann::json GameToJson(const PayoffTable& game) {
  nlohmann::json j;
  j["name"] = game.name();
  j["players"] = nlohmann::json::array();
  for (int p = 0; p < game.num_players(); ++p) {
    nlohmann::json labels = nlohmann::json::array();
    for (int c = 0; c < game.num_choices(p); ++c) {
      labels.push_back(game.choice_label(p, c));
    }
    j["players"].push_back({{"name", game.player_name(p)}, {"choices", labels}});
  }
  j["payoffs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < game.num_joint_choices(); ++i) {
    nlohmann::json payoff = nlohmann::json::array();
    for (const Rational& x : game.PayoffAt(i)) payoff.push_back(ToString(x));
    j["payoffs"].push_back({{"joint", game.Unflatten(i)}, {"payoff", payoff}});
  }
  return j;
}

std::string FormatJson(const std::vector<ExperimentResult>& results) {
  nlohmann::json doc;
  doc["results"] = nlohmann::json::array();
  for (const ExperimentResult& r : results) {
    nlohmann::json entry;
    entry["game"] = r.game;
    entry["mechanism"] = r.mechanism;
    entry["adversary"] = r.adversary;
    entry["rounds"] = r.rounds;
    entry["seed"] = r.seed;
    entry["coordination_rate"] = r.coordination_rate;
    entry["players"] = nlohmann::json::array();
    for (std::size_t p = 0; p < r.players.size(); ++p) {
      entry["players"].push_back({{"player_index", p},
                                  {"mean_payoff", r.players[p].mean_payoff},
                                  {"std_err", r.players[p].std_err}});
    }
    entry["leakage"] = r.leakage_counts;
    if (!r.segments.empty()) {
      entry["segments"] = nlohmann::json::array();
      for (const SegmentStats& s : r.segments) {
        nlohmann::json seg{{"first_round", s.first_round},
                           {"end_round", s.end_round}};
        seg["players"] = nlohmann::json::array();
        for (std::size_t p = 0; p < s.players.size(); ++p) {
          seg["players"].push_back({{"player_index", p},
                                    {"mean_payoff", s.players[p].mean_payoff},
                                    {"std_err", s.players[p].std_err}});
        }
        entry["segments"].push_back(std::move(seg));
      }
    }
    entry["config"] = ConfigToJson(r.config);
    entry["game_table"] = GameToJson(GameByName(r.config.game));
    doc["results"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

void WriteResults(const std::vector<ExperimentResult>& results,
                  OutputFormat format, const std::string& path) {
  const std::string body =
      format == OutputFormat::kCsv ? FormatCsv(results) : FormatJson(results);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << body;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace qcoord
