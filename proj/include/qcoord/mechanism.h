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

// How allied players obtain their per-round choices, and what each way of
// doing so lets an adversary see before play.
//
// All randomness arrives as caller-supplied uniforms. The simulator is
// pseudorandom throughout, including for "quantum" draws; the security
// difference between mechanisms is carried entirely by the leakage record.

#ifndef QCOORD_MECHANISM_H_
#define QCOORD_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcoord/game.h"
#include "qcoord/quantum_state.h"

namespace qcoord {

class MechanismError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StreamExhaustedError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A finite run of uniforms in [0, 1) handed to one round.
class UniformStream {
 public:
  explicit UniformStream(std::span<const double> values) : values_(values) {}

  double Next();
  std::size_t consumed() const { return cursor_; }
  std::size_t remaining() const { return values_.size() - cursor_; }

 private:
  std::span<const double> values_;
  std::size_t cursor_ = 0;
};

enum class MechanismKind {
  kIndependent,
  kPresharedSequence,
  kSharedSeedPrng,
  kPrivateCoinBroadcast,
  kEntangled,
};

// Stable names: independent, preshared, prng, private-coin, entangled.
std::string_view MechanismName(MechanismKind kind);
MechanismKind ParseMechanismKind(std::string_view name);
std::vector<std::string> MechanismNames();

class Mechanism {
 public:
  static Mechanism Independent(int num_allies, int num_choices);
  // Choices sealed before play. Each round's uniform must come from a
  // commitment stream that is fixed before round 0.
  static Mechanism PresharedSequence(int num_allies, int num_choices);
  // Choices generated lazily from a stream seeded by `common_seed`.
  static Mechanism SharedSeedPrng(int num_allies, int num_choices,
                                  std::uint64_t common_seed);
  static Mechanism PrivateCoinBroadcast(int num_allies, int num_choices,
                                        double jam_probability);
  // One party per ally, one outcome per choice.
  static Mechanism Entangled(StateVector state);

  MechanismKind kind() const { return kind_; }
  int num_allies() const { return num_allies_; }
  int num_choices() const { return num_choices_; }
  double jam_probability() const { return jam_probability_; }
  std::uint64_t common_seed() const { return common_seed_; }
  const std::optional<StateVector>& state() const { return state_; }
  const std::optional<ProbabilityTable>& distribution() const { return born_; }

  // Uniforms DrawChoices takes from the stream each round:
  //   independent   num_allies
  //   preshared     1
  //   prng          0 (the stream lives inside the mechanism)
  //   private-coin  1 coin + 1 jam + (num_allies - 1) fallbacks
  //   entangled     1
  std::size_t UniformsPerRound() const;

 private:
  Mechanism(MechanismKind kind, int num_allies, int num_choices);

  MechanismKind kind_;
  int num_allies_;
  int num_choices_;
  double jam_probability_ = 0.0;
  std::uint64_t common_seed_ = 0;
  std::optional<StateVector> state_;
  std::optional<ProbabilityTable> born_;
};

// What an adversary sees of a round before it has to commit.
struct NoLeak {
  friend bool operator==(const NoLeak&, const NoLeak&) = default;
};
// Pre-committed choices, observable ahead of play.
struct FullChoices {
  std::vector<int> choices;
  friend bool operator==(const FullChoices&, const FullChoices&) = default;
};
// Identity of the deterministic stream that produced this round's choices.
struct SeedStream {
  std::uint64_t common_seed = 0;
  std::uint64_t round = 0;
  int num_allies = 0;
  int num_choices = 0;
  friend bool operator==(const SeedStream&, const SeedStream&) = default;
};
struct ChannelEvent {
  bool jammed = false;
  bool detected = false;
  friend bool operator==(const ChannelEvent&, const ChannelEvent&) = default;
};
using Leakage = std::variant<NoLeak, FullChoices, SeedStream, ChannelEvent>;

// "none", "full-choices", "seed-stream" or "channel-event".
std::string_view LeakageName(const Leakage& leakage);

struct RoundDraw {
  std::vector<int> choices;
  Leakage leakage;
};

// Maps a uniform in [0, 1) onto {0, ..., num_choices - 1}.
int UniformChoice(double u, int num_choices);

// The shared uniform the seeded PRNG mechanism produces in `round`.
double SharedSeedUniform(std::uint64_t common_seed, std::uint64_t round);

// Throws StreamExhaustedError when `uniforms` runs dry.
RoundDraw DrawChoices(const Mechanism& mech, std::uint64_t round,
                      UniformStream& uniforms);

// Choices of the allies whose stream `leak` identifies.
std::vector<int> ReconstructSeedStream(const SeedStream& leak);

enum class AdversaryKind { kUniformRandom, kObserver, kSeedCracker, kJammer };

// Stable names: uniform, observer, seed-cracker, jammer.
std::string_view AdversaryName(AdversaryKind kind);
AdversaryKind ParseAdversaryKind(std::string_view name);
std::vector<std::string> AdversaryNames();

struct AdversaryModel {
  AdversaryKind kind = AdversaryKind::kUniformRandom;
  // SeedCracker knows the allies' stream from this round on.
  std::uint64_t crack_after_round = 0;

  static AdversaryModel Uniform() { return {AdversaryKind::kUniformRandom, 0}; }
  static AdversaryModel Observer() { return {AdversaryKind::kObserver, 0}; }
  static AdversaryModel SeedCracker(std::uint64_t crack_after_round) {
    return {AdversaryKind::kSeedCracker, crack_after_round};
  }
  static AdversaryModel Jammer() { return {AdversaryKind::kJammer, 0}; }
};

// The choice maximizing the opponent's own payoff given everyone else's
// choices; ties go to the lowest index. The entry at `opponent_index` in
// `known_choices` is ignored.
int BestResponse(const PayoffTable& game, int opponent_index,
                 std::span<const int> known_choices);

// The opponent's move in `round`, decided from the round's leakage alone.
// Allies occupy every seat except `opponent_index`, in order.
int AdversaryChoice(const AdversaryModel& adversary, std::uint64_t round,
                    const Leakage& leakage, const PayoffTable& game,
                    int opponent_index, double u);

}  // namespace qcoord

#endif  // QCOORD_MECHANISM_H_
