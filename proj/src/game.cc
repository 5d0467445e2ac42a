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

#include "qcoord/game.h"

#include <algorithm>
#include <type_traits>

#include <fmt/format.h>

namespace qcoord {

double ToDouble(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

std::string ToString(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return fmt::format("{}/{}", r.numerator(), r.denominator());
}

PayoffTable::PayoffTable(std::string name,
                         std::vector<std::string> player_names,
                         std::vector<std::vector<std::string>> choice_labels,
                         std::vector<PayoffVector> payoffs)
    : name_(std::move(name)),
      player_names_(std::move(player_names)),
      labels_(std::move(choice_labels)),
      payoffs_(std::move(payoffs)) {
  if (labels_.empty()) throw GameError("a game needs at least one player");
  if (player_names_.size() != labels_.size()) {
    throw GameError("one name per player required");
  }
  std::size_t total = 1;
  for (const auto& labels : labels_) {
    if (labels.empty()) throw GameError("every player needs a choice");
    choices_.push_back(static_cast<int>(labels.size()));
    total *= labels.size();
  }
  if (payoffs_.size() != total) {
    throw GameError(fmt::format("{} needs {} payoff entries, got {}", name_,
                                total, payoffs_.size()));
  }
  for (const PayoffVector& v : payoffs_) {
    if (v.size() != labels_.size()) {
      throw GameError("payoff vector length must equal the player count");
    }
  }
}

int PayoffTable::num_choices(int player) const {
  if (player < 0 || player >= num_players()) {
    throw GameError(fmt::format("player {} out of range", player));
  }
  return choices_[static_cast<std::size_t>(player)];
}

const std::string& PayoffTable::player_name(int player) const {
  num_choices(player);
  return player_names_[static_cast<std::size_t>(player)];
}

const std::string& PayoffTable::choice_label(int player, int choice) const {
  if (choice < 0 || choice >= num_choices(player)) {
    throw GameError(fmt::format("choice {} out of range for player {}", choice,
                                player));
  }
  return labels_[static_cast<std::size_t>(player)]
                [static_cast<std::size_t>(choice)];
}

std::size_t PayoffTable::Flatten(std::span<const int> joint) const {
  if (joint.size() != choices_.size()) {
    throw GameError(fmt::format("joint choice has {} entries, game has {} "
                                "players",
                                joint.size(), choices_.size()));
  }
  std::size_t index = 0;
  for (std::size_t p = 0; p < joint.size(); ++p) {
    if (joint[p] < 0 || joint[p] >= choices_[p]) {
      throw GameError(fmt::format("choice {} out of range for player {}",
                                  joint[p], p));
    }
    index = index * static_cast<std::size_t>(choices_[p]) +
            static_cast<std::size_t>(joint[p]);
  }
  return index;
}

JointChoice PayoffTable::Unflatten(std::size_t index) const {
  JointChoice joint(choices_.size());
  for (std::size_t p = choices_.size(); p-- > 0;) {
    const auto n = static_cast<std::size_t>(choices_[p]);
    joint[p] = static_cast<int>(index % n);
    index /= n;
  }
  return joint;
}

const PayoffVector& PayoffTable::Payoff(std::span<const int> joint) const {
  return payoffs_[Flatten(joint)];
}

Rational PayoffTable::MinPayoff() const {
  Rational lo = payoffs_.front().front();
  for (const auto& v : payoffs_)
    for (const auto& x : v) lo = std::min(lo, x);
  return lo;
}

Rational PayoffTable::MaxPayoff() const {
  Rational hi = payoffs_.front().front();
  for (const auto& v : payoffs_)
    for (const auto& x : v) hi = std::max(hi, x);
  return hi;
}

std::string PayoffTable::FormatJoint(std::span<const int> joint) const {
  std::string out = "(";
  for (std::size_t p = 0; p < joint.size(); ++p) {
    if (p > 0) out += ',';
    out += choice_label(static_cast<int>(p), joint[p]);
  }
  return out + ")";
}

namespace {

PayoffVector Pair(std::int64_t x, std::int64_t y) {
  return {Rational(x), Rational(y)};
}

const std::vector<std::string> kRpsLabels = {"rock", "paper", "scissors"};

// Pair payoff (allies, opponent) when the allies play `allies` against
// `opponent`. Paper beats rock, scissors beat paper, rock beats scissors.
PayoffVector RpsEntry(int allies, int opponent) {
  if (allies == opponent) return Pair(0, 0);
  const bool allies_win = (allies - opponent + 3) % 3 == 1;
  return allies_win ? Pair(1, 0) : Pair(0, 1);
}

}  // namespace

PayoffTable DrivingGame() {
  return PayoffTable("driving", {"driver 1", "driver 2"}, {{"L", "R"}, {"L", "R"}},
                     {Pair(2, 2), Pair(-3, -3), Pair(-3, -3), Pair(2, 2)});
}

PayoffTable RpsPairGame() {
  std::vector<PayoffVector> payoffs;
  for (int allies = 0; allies < 3; ++allies)
    for (int opponent = 0; opponent < 3; ++opponent)
      payoffs.push_back(RpsEntry(allies, opponent));
  return PayoffTable("rps-pair", {"allied pair", "opponent"},
                     {kRpsLabels, kRpsLabels}, std::move(payoffs));
}

PayoffTable AlliedRpsGame() {
  std::vector<PayoffVector> payoffs;
  for (int a1 = 0; a1 < 3; ++a1) {
    for (int a2 = 0; a2 < 3; ++a2) {
      for (int opponent = 0; opponent < 3; ++opponent) {
        if (a1 != a2) {
          payoffs.push_back({Rational(0), Rational(0), Rational(1)});
          continue;
        }
        const PayoffVector pair = RpsEntry(a1, opponent);
        payoffs.push_back({pair[0], pair[0], pair[1]});
      }
    }
  }
  return PayoffTable("allied-rps", {"ally 1", "ally 2", "opponent"},
                     {kRpsLabels, kRpsLabels, kRpsLabels}, std::move(payoffs));
}

PayoffTable BiasedPairGame() {
  return PayoffTable("biased-pair", {"member 1", "member 2"},
                     {{"A", "B"}, {"A", "B"}},
                     {Pair(1, 1), Pair(0, 0), Pair(0, 0), Pair(1, 1)});
}

std::vector<std::string> GameNames() {
  return {"driving", "allied-rps", "rps-pair", "biased-pair"};
}

PayoffTable GameByName(const std::string& name) {
  if (name == "driving") return DrivingGame();
  if (name == "allied-rps") return AlliedRpsGame();
  if (name == "rps-pair") return RpsPairGame();
  if (name == "biased-pair") return BiasedPairGame();
  throw GameError(fmt::format("unknown game '{}'", name));
}

std::vector<JointChoice> PureNashEquilibria(const PayoffTable& game) {
  std::vector<JointChoice> equilibria;
  for (std::size_t i = 0; i < game.num_joint_choices(); ++i) {
    JointChoice joint = game.Unflatten(i);
    const PayoffVector& base = game.PayoffAt(i);
    bool stable = true;
    for (int p = 0; p < game.num_players() && stable; ++p) {
      JointChoice deviated = joint;
      for (int c = 0; c < game.num_choices(p); ++c) {
        deviated[static_cast<std::size_t>(p)] = c;
        if (game.Payoff(deviated)[static_cast<std::size_t>(p)] >
            base[static_cast<std::size_t>(p)]) {
          stable = false;
          break;
        }
      }
    }
    if (stable) equilibria.push_back(std::move(joint));
  }
  return equilibria;
}

MixedProfile::MixedProfile(std::vector<std::vector<Rational>> distributions)
    : dists_(std::move(distributions)) {
  for (std::size_t p = 0; p < dists_.size(); ++p) {
    Rational total(0);
    for (const Rational& x : dists_[p]) {
      if (x < Rational(0)) throw GameError(fmt::format("player {} has a negative weight", p));
      total += x;
    }
    if (total != Rational(1)) {
      throw GameError(fmt::format("player {} weights sum to {}", p,
                                  ToString(total)));
    }
  }
}

MixedProfile MixedProfile::Uniform(const PayoffTable& game) {
  std::vector<std::vector<Rational>> dists;
  for (int n : game.choices_per_player()) {
    dists.emplace_back(static_cast<std::size_t>(n), Rational(1, n));
  }
  return MixedProfile(std::move(dists));
}

MixedProfile MixedProfile::PointMass(const PayoffTable& game,
                                     std::span<const int> joint) {
  game.Flatten(joint);
  std::vector<std::vector<Rational>> dists;
  for (int p = 0; p < game.num_players(); ++p) {
    std::vector<Rational> d(static_cast<std::size_t>(game.num_choices(p)));
    d[static_cast<std::size_t>(joint[static_cast<std::size_t>(p)])] = 1;
    dists.push_back(std::move(d));
  }
  return MixedProfile(std::move(dists));
}

namespace {

template <typename T>
void CheckProfileShape(const PayoffTable& game,
                       const std::vector<std::vector<T>>& profile) {
  if (static_cast<int>(profile.size()) != game.num_players()) {
    throw GameError(fmt::format("profile covers {} players, game has {}",
                                profile.size(), game.num_players()));
  }
  for (int p = 0; p < game.num_players(); ++p) {
    if (static_cast<int>(profile[static_cast<std::size_t>(p)].size()) !=
        game.num_choices(p)) {
      throw GameError(fmt::format("player {} distribution has the wrong length",
                                  p));
    }
  }
}

template <typename T>
T ToScalar(const Rational& r) {
  if constexpr (std::is_same_v<T, Rational>) {
    return r;
  } else {
    return ToDouble(r);
  }
}

template <typename T>
std::vector<T> Expectation(const PayoffTable& game,
                           const std::vector<std::vector<T>>& profile) {
  CheckProfileShape(game, profile);
  std::vector<T> result(static_cast<std::size_t>(game.num_players()), T(0));
  for (std::size_t i = 0; i < game.num_joint_choices(); ++i) {
    const JointChoice joint = game.Unflatten(i);
    T weight(1);
    for (std::size_t p = 0; p < joint.size() && weight != T(0); ++p) {
      weight *= profile[p][static_cast<std::size_t>(joint[p])];
    }
    if (weight == T(0)) continue;
    const PayoffVector& payoff = game.PayoffAt(i);
    for (std::size_t p = 0; p < result.size(); ++p) {
      result[p] += weight * ToScalar<T>(payoff[p]);
    }
  }
  return result;
}

}  // namespace

PayoffVector ExpectedPayoff(const PayoffTable& game,
                            const MixedProfile& profile) {
  return Expectation(game, profile.distributions());
}

std::vector<double> ExpectedPayoffReal(
    const PayoffTable& game, const std::vector<std::vector<double>>& profile) {
  return Expectation(game, profile);
}

EquilibriumCheck VerifyMixedEquilibrium(const PayoffTable& game,
                                        const MixedProfile& profile,
                                        double tolerance) {
  const PayoffVector current = ExpectedPayoff(game, profile);
  EquilibriumCheck check;
  bool first = true;
  for (int p = 0; p < game.num_players(); ++p) {
    for (int c = 0; c < game.num_choices(p); ++c) {
      auto dists = profile.distributions();
      auto& mine = dists[static_cast<std::size_t>(p)];
      std::fill(mine.begin(), mine.end(), Rational(0));
      mine[static_cast<std::size_t>(c)] = 1;
      const Rational gain =
          ExpectedPayoff(game, MixedProfile(std::move(dists)))
              [static_cast<std::size_t>(p)] -
          current[static_cast<std::size_t>(p)];
      if (first || gain > check.max_gain) {
        check.max_gain = gain;
        check.best_deviator = p;
        check.best_deviation = c;
        first = false;
      }
    }
  }
  check.is_equilibrium = ToDouble(check.max_gain) <= tolerance;
  return check;
}

}  // namespace qcoord
