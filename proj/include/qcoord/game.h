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

#ifndef QCOORD_GAME_H_
#define QCOORD_GAME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace qcoord {

using Rational = boost::rational<std::int64_t>;

double ToDouble(const Rational& r);
// "1/3", "-3", "0".
std::string ToString(const Rational& r);

// One choice index per player.
using JointChoice = std::vector<int>;
using PayoffVector = std::vector<Rational>;

class GameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Normal-form game with exact payoffs for every joint choice. Joint choices
// are flattened in mixed radix with player 0 most significant.
class PayoffTable {
 public:
  // `choice_labels[p]` names player p's choices; its size is that player's
  // number of choices. `payoffs` is indexed by flattened joint choice.
  PayoffTable(std::string name, std::vector<std::string> player_names,
              std::vector<std::vector<std::string>> choice_labels,
              std::vector<PayoffVector> payoffs);

  const std::string& name() const { return name_; }
  int num_players() const { return static_cast<int>(choices_.size()); }
  int num_choices(int player) const;
  std::span<const int> choices_per_player() const { return choices_; }
  const std::string& player_name(int player) const;
  const std::string& choice_label(int player, int choice) const;
  std::size_t num_joint_choices() const { return payoffs_.size(); }

  std::size_t Flatten(std::span<const int> joint) const;
  JointChoice Unflatten(std::size_t index) const;

  // Throws GameError on a malformed joint choice.
  const PayoffVector& Payoff(std::span<const int> joint) const;
  const PayoffVector& PayoffAt(std::size_t flat_index) const {
    return payoffs_[flat_index];
  }

  // Smallest and largest payoff any player can receive.
  Rational MinPayoff() const;
  Rational MaxPayoff() const;

  // "(L,R)" style rendering.
  std::string FormatJoint(std::span<const int> joint) const;

 private:
  std::string name_;
  std::vector<std::string> player_names_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<int> choices_;
  std::vector<PayoffVector> payoffs_;
};

// Two drivers choosing Left (0) or Right (1).
PayoffTable DrivingGame();

// Rock (0), paper (1), scissors (2) between the allied pair, acting as one
// player, and their opponent. Row is the pair's common choice.
PayoffTable RpsPairGame();

// Three players: two allies and an opponent. Allies that disagree score 0 and
// hand the opponent 1; allies that agree each receive the pair payoff.
PayoffTable AlliedRpsGame();

// Two players choosing A (0) or B (1): 1 each when they match, 0 otherwise.
PayoffTable BiasedPairGame();

// Accepts "driving", "rps-pair", "allied-rps" and "biased-pair".
PayoffTable GameByName(const std::string& name);
std::vector<std::string> GameNames();

// Weak pure Nash equilibria by exhaustive deviation check, in flattened order.
std::vector<JointChoice> PureNashEquilibria(const PayoffTable& game);

// Per-player probability vectors, exact.
class MixedProfile {
 public:
  // Throws GameError unless every entry is non-negative and each vector sums
  // to exactly one.
  explicit MixedProfile(std::vector<std::vector<Rational>> distributions);

  static MixedProfile Uniform(const PayoffTable& game);
  static MixedProfile PointMass(const PayoffTable& game,
                                std::span<const int> joint);

  int num_players() const { return static_cast<int>(dists_.size()); }
  const std::vector<Rational>& operator[](int player) const {
    return dists_[static_cast<std::size_t>(player)];
  }
  const std::vector<std::vector<Rational>>& distributions() const {
    return dists_;
  }

 private:
  std::vector<std::vector<Rational>> dists_;
};

// Exact expected payoff vector. Throws GameError on a shape mismatch.
PayoffVector ExpectedPayoff(const PayoffTable& game,
                            const MixedProfile& profile);

// Floating-point counterpart for arbitrary real distributions.
std::vector<double> ExpectedPayoffReal(
    const PayoffTable& game, const std::vector<std::vector<double>>& profile);

struct EquilibriumCheck {
  bool is_equilibrium = false;
  // Largest gain any player gets from switching to a pure choice. Never
  // negative, since the current mix is itself a blend of pure choices.
  Rational max_gain;
  int best_deviator = -1;
  int best_deviation = -1;
};

EquilibriumCheck VerifyMixedEquilibrium(const PayoffTable& game,
                                        const MixedProfile& profile,
                                        double tolerance);

}  // namespace qcoord

#endif  // QCOORD_GAME_H_
