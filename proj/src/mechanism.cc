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

#include "qcoord/mechanism.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qcoord/random_streams.h"

namespace qcoord {

double UniformStream::Next() {
  if (cursor_ >= values_.size()) {
    throw StreamExhaustedError(fmt::format(
        "uniform stream exhausted after {} values", values_.size()));
  }
  return values_[cursor_++];
}

namespace {

struct NamedMechanism {
  MechanismKind kind;
  std::string_view name;
};

constexpr NamedMechanism kMechanismNames[] = {
    {MechanismKind::kIndependent, "independent"},
    {MechanismKind::kPresharedSequence, "preshared"},
    {MechanismKind::kSharedSeedPrng, "prng"},
    {MechanismKind::kPrivateCoinBroadcast, "private-coin"},
    {MechanismKind::kEntangled, "entangled"},
};

struct NamedAdversary {
  AdversaryKind kind;
  std::string_view name;
};

constexpr NamedAdversary kAdversaryNames[] = {
    {AdversaryKind::kUniformRandom, "uniform"},
    {AdversaryKind::kObserver, "observer"},
    {AdversaryKind::kSeedCracker, "seed-cracker"},
    {AdversaryKind::kJammer, "jammer"},
};

}  // namespace

std::string_view MechanismName(MechanismKind kind) {
  for (const auto& entry : kMechanismNames)
    if (entry.kind == kind) return entry.name;
  return "unknown";
}

MechanismKind ParseMechanismKind(std::string_view name) {
  for (const auto& entry : kMechanismNames)
    if (entry.name == name) return entry.kind;
  throw MechanismError(fmt::format("unknown mechanism '{}'", name));
}

std::vector<std::string> MechanismNames() {
  std::vector<std::string> names;
  for (const auto& entry : kMechanismNames) names.emplace_back(entry.name);
  return names;
}

std::string_view AdversaryName(AdversaryKind kind) {
  for (const auto& entry : kAdversaryNames)
    if (entry.kind == kind) return entry.name;
  return "unknown";
}

AdversaryKind ParseAdversaryKind(std::string_view name) {
  for (const auto& entry : kAdversaryNames)
    if (entry.name == name) return entry.kind;
  throw MechanismError(fmt::format("unknown adversary '{}'", name));
}

std::vector<std::string> AdversaryNames() {
  std::vector<std::string> names;
  for (const auto& entry : kAdversaryNames) names.emplace_back(entry.name);
  return names;
}

Mechanism::Mechanism(MechanismKind kind, int num_allies, int num_choices)
    : kind_(kind), num_allies_(num_allies), num_choices_(num_choices) {
  if (num_allies < 1 || num_choices < 1) {
    throw MechanismError(fmt::format(
        "{} needs at least one ally and one choice, got {} and {}",
        MechanismName(kind), num_allies, num_choices));
  }
}

Mechanism Mechanism::Independent(int num_allies, int num_choices) {
  return Mechanism(MechanismKind::kIndependent, num_allies, num_choices);
}

Mechanism Mechanism::PresharedSequence(int num_allies, int num_choices) {
  return Mechanism(MechanismKind::kPresharedSequence, num_allies, num_choices);
}

Mechanism Mechanism::SharedSeedPrng(int num_allies, int num_choices,
                                    std::uint64_t common_seed) {
  Mechanism mech(MechanismKind::kSharedSeedPrng, num_allies, num_choices);
  mech.common_seed_ = common_seed;
  return mech;
}

Mechanism Mechanism::PrivateCoinBroadcast(int num_allies, int num_choices,
                                          double jam_probability) {
  if (!(jam_probability >= 0.0 && jam_probability <= 1.0)) {
    throw MechanismError(
        fmt::format("jam probability {} outside [0, 1]", jam_probability));
  }
  Mechanism mech(MechanismKind::kPrivateCoinBroadcast, num_allies, num_choices);
  mech.jam_probability_ = jam_probability;
  return mech;
}

Mechanism Mechanism::Entangled(StateVector state) {
  Mechanism mech(MechanismKind::kEntangled, state.num_parties(),
                 state.num_outcomes());
  mech.born_ = BornDistribution(state);
  mech.state_ = std::move(state);
  return mech;
}

std::size_t Mechanism::UniformsPerRound() const {
  switch (kind_) {
    case MechanismKind::kIndependent:
      return static_cast<std::size_t>(num_allies_);
    case MechanismKind::kPresharedSequence:
    case MechanismKind::kEntangled:
      return 1;
    case MechanismKind::kSharedSeedPrng:
      return 0;
    case MechanismKind::kPrivateCoinBroadcast:
      return static_cast<std::size_t>(num_allies_) + 1;
  }
  return 0;
}

std::string_view LeakageName(const Leakage& leakage) {
  struct Namer {
    std::string_view operator()(const NoLeak&) const { return "none"; }
    std::string_view operator()(const FullChoices&) const {
      return "full-choices";
    }
    std::string_view operator()(const SeedStream&) const {
      return "seed-stream";
    }
    std::string_view operator()(const ChannelEvent&) const {
      return "channel-event";
    }
  };
  return std::visit(Namer{}, leakage);
}

int UniformChoice(double u, int num_choices) {
  const int c = static_cast<int>(std::floor(u * num_choices));
  return std::clamp(c, 0, num_choices - 1);
}

double SharedSeedUniform(std::uint64_t common_seed, std::uint64_t round) {
  return CounterStream(DeriveKey(common_seed, stream_domain::kCommonSeed, round))
      .NextUniform();
}

std::vector<int> ReconstructSeedStream(const SeedStream& leak) {
  const int c = UniformChoice(SharedSeedUniform(leak.common_seed, leak.round),
                              leak.num_choices);
  return std::vector<int>(static_cast<std::size_t>(leak.num_allies), c);
}

RoundDraw DrawChoices(const Mechanism& mech, std::uint64_t round,
                      UniformStream& uniforms) {
  const int k = mech.num_choices();
  const auto allies = static_cast<std::size_t>(mech.num_allies());
  RoundDraw draw;
  draw.choices.resize(allies);

  switch (mech.kind()) {
    case MechanismKind::kIndependent:
      for (int& c : draw.choices) c = UniformChoice(uniforms.Next(), k);
      draw.leakage = NoLeak{};
      break;

    case MechanismKind::kPresharedSequence:
      std::fill(draw.choices.begin(), draw.choices.end(),
                UniformChoice(uniforms.Next(), k));
      draw.leakage = FullChoices{draw.choices};
      break;

    case MechanismKind::kSharedSeedPrng: {
      SeedStream leak{mech.common_seed(), round, mech.num_allies(), k};
      draw.choices = ReconstructSeedStream(leak);
      draw.leakage = leak;
      break;
    }

    case MechanismKind::kPrivateCoinBroadcast: {
      const int coin = UniformChoice(uniforms.Next(), k);
      const bool jammed = uniforms.Next() < mech.jam_probability();
      draw.choices[0] = coin;
      // The fallback uniforms are always consumed so the stream layout does
      // not depend on the jam outcome.
      for (std::size_t i = 1; i < allies; ++i) {
        const int fallback = UniformChoice(uniforms.Next(), k);
        draw.choices[i] = jammed ? fallback : coin;
      }
      draw.leakage = ChannelEvent{jammed, jammed};
      break;
    }

    case MechanismKind::kEntangled:
      draw.choices = Sample(*mech.distribution(), uniforms.Next()).outcomes;
      draw.leakage = NoLeak{};
      break;
  }
  return draw;
}

int BestResponse(const PayoffTable& game, int opponent_index,
                 std::span<const int> known_choices) {
  JointChoice joint(known_choices.begin(), known_choices.end());
  const auto seat = static_cast<std::size_t>(opponent_index);
  int best = 0;
  Rational best_payoff;
  for (int c = 0; c < game.num_choices(opponent_index); ++c) {
    joint[seat] = c;
    const Rational payoff = game.Payoff(joint)[seat];
    if (c == 0 || payoff > best_payoff) {
      best = c;
      best_payoff = payoff;
    }
  }
  return best;
}

namespace {

int RespondTo(const PayoffTable& game, int opponent_index,
              const std::vector<int>& ally_choices) {
  JointChoice joint(ally_choices.begin(), ally_choices.end());
  joint.insert(joint.begin() + opponent_index, 0);
  return BestResponse(game, opponent_index, joint);
}

}  // namespace

int AdversaryChoice(const AdversaryModel& adversary, std::uint64_t round,
                    const Leakage& leakage, const PayoffTable& game,
                    int opponent_index, double u) {
  const int k = game.num_choices(opponent_index);
  switch (adversary.kind) {
    case AdversaryKind::kObserver:
      if (const auto* seen = std::get_if<FullChoices>(&leakage)) {
        return RespondTo(game, opponent_index, seen->choices);
      }
      break;
    case AdversaryKind::kSeedCracker:
      if (round >= adversary.crack_after_round) {
        if (const auto* stream = std::get_if<SeedStream>(&leakage)) {
          return RespondTo(game, opponent_index, ReconstructSeedStream(*stream));
        }
      }
      break;
    case AdversaryKind::kUniformRandom:
    case AdversaryKind::kJammer:
      break;
  }
  return UniformChoice(u, k);
}

}  // namespace qcoord
