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

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qcoord/experiment.h"
#include "qcoord/game.h"
#include "qcoord/mechanism.h"
#include "qcoord/quantum_state.h"

namespace qcoord::cli {
namespace {

// Thrown for anything the user has to fix on the command line.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

std::vector<std::string> MechanismChoices() {
  auto names = MechanismNames();
  names.emplace_back("entangled-biased");
  return names;
}

std::vector<std::string> AdversaryChoices() {
  auto names = AdversaryNames();
  names.emplace_back("none");
  return names;
}

// Flags shared by `run` and `compare`. Unset values may be filled from a
// --config file; explicit flags win.
struct ExperimentFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> game;
  std::optional<std::string> mechanism;
  std::optional<std::string> mechanisms;
  std::optional<std::string> adversary;
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> coeff_a;
  std::optional<double> coeff_b;
  std::optional<double> jam_probability;
  std::optional<std::uint64_t> crack_after;
  std::optional<double> detection_penalty;
  std::optional<unsigned> threads;
};

void AddExperimentOptions(CLI::App* cmd, ExperimentFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON file whose keys mirror these flag names");
  cmd->add_option("--game", flags.game, "Game: " + Join(GameNames()));
  cmd->add_option("--adversary", flags.adversary,
                  "Adversary: " + Join(AdversaryChoices()) +
                      " (default: uniform when the game has an opponent)");
  cmd->add_option("--rounds", flags.rounds, "Number of rounds (>= 1)");
  cmd->add_option("--seed", flags.seed, "Master seed (default 0)");
  cmd->add_option("--out", flags.out, "Results file");
  cmd->add_option("--format", flags.format,
                  "Results format: csv, json (default from --out extension)");
  cmd->add_option("--coeff-a", flags.coeff_a,
                  "Biased pair coefficient a (2a^2 + 2b^2 = 1)");
  cmd->add_option("--coeff-b", flags.coeff_b, "Biased pair coefficient b");
  cmd->add_option("--jam-probability", flags.jam_probability,
                  "private-coin: probability the broadcast is jammed");
  cmd->add_option("--crack-after", flags.crack_after,
                  "seed-cracker: round from which the seed is known");
  cmd->add_option("--detection-penalty", flags.detection_penalty,
                  "Payoff each ally loses when a broadcast is detected");
  cmd->add_option("--threads", flags.threads,
                  "Worker threads, 0 = all cores (results do not depend on it)");
}

template <typename T>
void FillFrom(const nlohmann::json& j, const char* key, std::optional<T>& slot) {
  if (slot || !j.contains(key)) return;
  try {
    slot = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

void MergeConfigFile(ExperimentFlags& flags) {
  if (!flags.config_path) return;
  std::ifstream in(*flags.config_path);
  if (!in) throw UsageError("cannot read config file " + *flags.config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("config file is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  FillFrom(j, "game", flags.game);
  FillFrom(j, "mechanism", flags.mechanism);
  FillFrom(j, "mechanisms", flags.mechanisms);
  FillFrom(j, "adversary", flags.adversary);
  FillFrom(j, "rounds", flags.rounds);
  FillFrom(j, "seed", flags.seed);
  FillFrom(j, "out", flags.out);
  FillFrom(j, "format", flags.format);
  FillFrom(j, "coeff-a", flags.coeff_a);
  FillFrom(j, "coeff-b", flags.coeff_b);
  FillFrom(j, "jam-probability", flags.jam_probability);
  FillFrom(j, "crack-after", flags.crack_after);
  FillFrom(j, "detection-penalty", flags.detection_penalty);
  FillFrom(j, "threads", flags.threads);
}

MechanismSpec ParseMechanismSpec(const std::string& name,
                                 const ExperimentFlags& flags,
                                 const std::string& game) {
  MechanismSpec spec;
  const bool biased_name = name == "entangled-biased";
  try {
    spec.kind = biased_name ? MechanismKind::kEntangled : ParseMechanismKind(name);
  } catch (const MechanismError& e) {
    throw UsageError(e.what());
  }
  spec.jam_probability = flags.jam_probability.value_or(0.0);
  const bool wants_coeffs =
      biased_name ||
      (spec.kind == MechanismKind::kEntangled && game == "biased-pair");
  if (wants_coeffs) {
    if (!flags.coeff_a || !flags.coeff_b) {
      throw UsageError("--coeff-a and --coeff-b are required for the biased "
                       "pair state");
    }
    spec.biased_coefficients = {Amplitude(*flags.coeff_a),
                                Amplitude(*flags.coeff_b)};
    // Decimal flags carry ~7 significant digits, far short of 1e-9.
    spec.coefficient_tolerance = kConstructionTolerance;
  }
  return spec;
}

std::optional<AdversaryModel> ParseAdversary(const ExperimentFlags& flags,
                                             const PayoffTable& game) {
  const bool has_opponent = RolesFor(game).opponent.has_value();
  const std::string name =
      flags.adversary.value_or(has_opponent ? "uniform" : "none");
  if (name == "none") {
    if (has_opponent) {
      throw UsageError(game.name() + " has an opponent; pick an adversary");
    }
    return std::nullopt;
  }
  if (!has_opponent) {
    throw UsageError(game.name() + " has no opponent; use --adversary none");
  }
  AdversaryModel model;
  try {
    model.kind = ParseAdversaryKind(name);
  } catch (const MechanismError& e) {
    throw UsageError(e.what());
  }
  model.crack_after_round = flags.crack_after.value_or(0);
  return model;
}

ExperimentConfig BuildConfig(const ExperimentFlags& flags,
                             const std::string& mechanism) {
  if (!flags.game) throw UsageError("--game is required");
  if (!flags.rounds) throw UsageError("--rounds is required");
  if (*flags.rounds < 1) throw UsageError("--rounds must be at least 1");
  PayoffTable game = [&] {
    try {
      return GameByName(*flags.game);
    } catch (const GameError& e) {
      throw UsageError(e.what());
    }
  }();

  ExperimentConfig config;
  config.game = *flags.game;
  config.mechanism = ParseMechanismSpec(mechanism, flags, config.game);
  config.adversary = ParseAdversary(flags, game);
  config.rounds = *flags.rounds;
  config.master_seed = flags.seed.value_or(0);
  config.detection_penalty = flags.detection_penalty.value_or(0.0);
  config.threads = flags.threads.value_or(0);
  if (flags.jam_probability &&
      !(*flags.jam_probability >= 0.0 && *flags.jam_probability <= 1.0)) {
    throw UsageError("--jam-probability must lie in [0, 1]");
  }
  if (flags.out) {
    config.output_path = *flags.out;
    std::string format = flags.format.value_or(
        config.output_path.ends_with(".json") ? "json" : "csv");
    try {
      config.format = ParseOutputFormat(format);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  } else if (flags.format) {
    throw UsageError("--format needs --out");
  }
  return config;
}

void PrintSummary(const ExperimentResult& result, std::ostream& out) {
  const PayoffTable game = GameByName(result.game);
  out << fmt::format("{} | mechanism={} adversary={} rounds={} seed={}\n",
                     result.game, result.mechanism, result.adversary,
                     result.rounds, result.seed);
  for (std::size_t p = 0; p < result.players.size(); ++p) {
    out << fmt::format(
        "  player {} ({}): mean_payoff={:.6f} std_err={:.6f} "
        "coordination_rate={:.6f}\n",
        p, game.player_name(static_cast<int>(p)), result.players[p].mean_payoff,
        result.players[p].std_err, result.coordination_rate);
  }
  for (const SegmentStats& seg : result.segments) {
    std::string means;
    for (const PlayerStats& s : seg.players) {
      means += fmt::format(" {:.6f}", s.mean_payoff);
    }
    out << fmt::format("  rounds [{}, {}): mean_payoff{}\n", seg.first_round,
                       seg.end_round, means);
  }
}

// Maps library failures onto exit codes: configuration problems are usage
// errors, everything else is a runtime error.
template <typename Fn>
int Guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NormalizationError& e) {
    err << fmt::format("error: {} (residual {:.3e})\n", e.what(), e.residual());
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int CmdRun(ExperimentFlags flags, std::ostream& out) {
  MergeConfigFile(flags);
  if (!flags.mechanism) throw UsageError("--mechanism is required");
  const ExperimentConfig config = BuildConfig(flags, *flags.mechanism);
  const ExperimentResult result = RunExperiment(config);
  if (!config.output_path.empty()) {
    WriteResults({result}, config.format, config.output_path);
  }
  PrintSummary(result, out);
  return kExitOk;
}

// "preshared@observer,entangled" -> entries with optional adversary overrides.
std::vector<ComparisonEntry> ParseComparisonList(const ExperimentFlags& flags,
                                                 const PayoffTable& game) {
  std::vector<ComparisonEntry> entries;
  std::stringstream list(*flags.mechanisms);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item.empty()) continue;
    ComparisonEntry entry;
    const auto at = item.find('@');
    entry.mechanism =
        ParseMechanismSpec(item.substr(0, at), flags, game.name());
    if (at != std::string::npos) {
      ExperimentFlags override = flags;
      override.adversary = item.substr(at + 1);
      entry.adversary = ParseAdversary(override, game);
    }
    entries.push_back(std::move(entry));
  }
  if (entries.empty()) throw UsageError("--mechanisms lists no mechanisms");
  return entries;
}

int CmdCompare(ExperimentFlags flags, std::ostream& out) {
  MergeConfigFile(flags);
  if (!flags.mechanisms) throw UsageError("--mechanisms is required");
  const std::string first =
      flags.mechanisms->substr(0, flags.mechanisms->find_first_of(",@"));
  const ExperimentConfig base = BuildConfig(flags, first);
  const auto entries = ParseComparisonList(flags, GameByName(base.game));
  const auto results = CompareMechanisms(base, entries);
  if (!base.output_path.empty()) {
    WriteResults(results, base.format, base.output_path);
  }
  for (const auto& result : results) PrintSummary(result, out);
  return kExitOk;
}

std::string FormatVector(const PayoffVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += ToString(v[i]);
  }
  return out + ")";
}

int CmdNash(const std::string& game_name, std::ostream& out) {
  PayoffTable game = [&] {
    try {
      return GameByName(game_name);
    } catch (const GameError& e) {
      throw UsageError(e.what());
    }
  }();
  const auto equilibria = PureNashEquilibria(game);
  std::string listed;
  for (const auto& joint : equilibria) {
    if (!listed.empty()) listed += ", ";
    listed += game.FormatJoint(joint);
  }
  out << "game: " << game.name() << "\n";
  out << "pure Nash equilibria: " << (listed.empty() ? "none" : listed) << "\n";

  const MixedProfile uniform = MixedProfile::Uniform(game);
  const EquilibriumCheck check = VerifyMixedEquilibrium(game, uniform, 1e-12);
  out << fmt::format("uniform mixed profile: {} (max deviation gain {})\n",
                     check.is_equilibrium ? "verified equilibrium"
                                          : "not an equilibrium",
                     ToString(check.max_gain));
  out << "expected payoff under uniform: "
      << FormatVector(ExpectedPayoff(game, uniform)) << "\n";
  return kExitOk;
}

struct StateFlags {
  std::string state;
  std::optional<int> parties;
  std::optional<int> outcomes;
  std::optional<double> coeff_a;
  std::optional<double> coeff_b;
};

int CmdState(const StateFlags& flags, std::ostream& out) {
  std::optional<StateVector> state;
  if (flags.state == "bell" || flags.state == "ghz") {
    const int default_parties = flags.state == "bell" ? 2 : 3;
    state = BellState(flags.parties.value_or(default_parties),
                      flags.outcomes.value_or(2));
  } else if (flags.state == "biased") {
    if (!flags.coeff_a || !flags.coeff_b) {
      throw UsageError("--coeff-a and --coeff-b are required for --state biased");
    }
    if (flags.parties.value_or(2) != 2 || flags.outcomes.value_or(2) != 2) {
      throw UsageError("the biased state has exactly 2 parties and 2 outcomes");
    }
    state = BiasedPairState(*flags.coeff_a, *flags.coeff_b,
                            kConstructionTolerance);
  } else {
    throw UsageError("unknown state '" + flags.state + "'");
  }
  const ProbabilityTable born = BornDistribution(*state);
  out << fmt::format("state: {} parties={} outcomes={}\n", flags.state,
                     state->num_parties(), state->num_outcomes());
  for (std::size_t i = 0; i < state->dimension(); ++i) {
    const Amplitude& a = (*state)[i];
    out << fmt::format("{}  amplitude={:.6f}{:+.6f}i  probability={:.6f}\n",
                       KetLabel(i, state->num_parties(), state->num_outcomes()),
                       a.real(), a.imag(), born[i]);
  }
  return kExitOk;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Coordination games under independent, pre-shared, broadcast "
               "and entangled randomness"};
  app.name("qcoord");
  app.require_subcommand(1);
  app.footer("games: " + Join(GameNames()) +
             "\nmechanisms: " + Join(MechanismChoices()) +
             "\nadversaries: " + Join(AdversaryChoices()) +
             "\nstates: bell, ghz, biased");

  ExperimentFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run one Monte Carlo experiment");
  AddExperimentOptions(run, run_flags);
  run->add_option("--mechanism", run_flags.mechanism,
                  "Mechanism: " + Join(MechanismChoices()));

  ExperimentFlags compare_flags;
  CLI::App* compare = app.add_subcommand(
      "compare", "Run one experiment per mechanism with a shared seed");
  AddExperimentOptions(compare, compare_flags);
  compare->add_option("--mechanisms", compare_flags.mechanisms,
                      "Comma-separated mechanism[@adversary] entries; "
                      "mechanisms: " + Join(MechanismChoices()));

  std::string nash_game;
  CLI::App* nash = app.add_subcommand(
      "nash", "Pure equilibria and the uniform mixed profile of a game");
  nash->add_option("--game", nash_game, "Game: " + Join(GameNames()))
      ->required();

  StateFlags state_flags;
  CLI::App* state = app.add_subcommand(
      "state", "Print amplitudes and Born probabilities of a state");
  state->add_option("--state", state_flags.state, "State: bell, ghz, biased")
      ->required();
  state->add_option("--parties", state_flags.parties, "Number of parties");
  state->add_option("--outcomes", state_flags.outcomes, "Outcomes per party");
  state->add_option("--coeff-a", state_flags.coeff_a, "Biased coefficient a");
  state->add_option("--coeff-b", state_flags.coeff_b, "Biased coefficient b");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (run->parsed()) {
    return Guarded([&] { return CmdRun(run_flags, out); }, err);
  }
  if (compare->parsed()) {
    return Guarded([&] { return CmdCompare(compare_flags, out); }, err);
  }
  if (nash->parsed()) {
    return Guarded([&] { return CmdNash(nash_game, out); }, err);
  }
  return Guarded([&] { return CmdState(state_flags, out); }, err);
}

}  // namespace qcoord::cli
