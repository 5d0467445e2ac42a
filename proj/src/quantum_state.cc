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

#include "qcoord/quantum_state.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace qcoord {

namespace {

void CheckShape(int num_parties, int num_outcomes) {
  if (num_parties < 1 || num_outcomes < 1) {
    throw DomainError(fmt::format(
        "state needs at least one party and one outcome, got n={} k={}",
        num_parties, num_outcomes));
  }
}

double SquaredNormOf(std::span<const Amplitude> amplitudes) {
  double total = 0.0;
  for (const Amplitude& a : amplitudes) total += std::norm(a);
  return total;
}

}  // namespace

std::size_t JointDimension(int num_parties, int num_outcomes) {
  CheckShape(num_parties, num_outcomes);
  std::uint64_t dim = 1;
  for (int i = 0; i < num_parties; ++i) {
    dim *= static_cast<std::uint64_t>(num_outcomes);
    if (dim > kMaxDimension) {
      throw DimensionOverflowError(fmt::format(
          "joint dimension {}^{} exceeds the cap of 2^31", num_outcomes,
          num_parties));
    }
  }
  return static_cast<std::size_t>(dim);
}

bool OutcomeProfile::AllEqual() const {
  return std::adjacent_find(outcomes.begin(), outcomes.end(),
                            std::not_equal_to<>()) == outcomes.end();
}

std::size_t EncodeJointIndex(std::span<const int> outcomes, int num_outcomes) {
  std::size_t index = 0;
  for (int o : outcomes) {
    if (o < 0 || o >= num_outcomes) {
      throw DomainError(
          fmt::format("outcome {} outside [0, {})", o, num_outcomes));
    }
    index = index * static_cast<std::size_t>(num_outcomes) +
            static_cast<std::size_t>(o);
  }
  return index;
}

OutcomeProfile DecodeJointIndex(std::size_t index, int num_parties,
                                int num_outcomes) {
  OutcomeProfile profile;
  profile.outcomes.resize(static_cast<std::size_t>(num_parties));
  const auto k = static_cast<std::size_t>(num_outcomes);
  for (int p = num_parties - 1; p >= 0; --p) {
    profile.outcomes[static_cast<std::size_t>(p)] = static_cast<int>(index % k);
    index /= k;
  }
  return profile;
}

StateVector StateVector::FromAmplitudes(int num_parties, int num_outcomes,
                                        std::vector<Amplitude> amplitudes,
                                        double tolerance) {
  const std::size_t dim = JointDimension(num_parties, num_outcomes);
  if (amplitudes.size() != dim) {
    throw DomainError(fmt::format("expected {} amplitudes for n={} k={}, got {}",
                                  dim, num_parties, num_outcomes,
                                  amplitudes.size()));
  }
  const double norm = SquaredNormOf(amplitudes);
  const double residual = std::abs(norm - 1.0);
  if (!(residual <= tolerance)) {
    throw NormalizationError(
        fmt::format("amplitudes have squared norm {:.12g} (residual {:.3e}, "
                    "tolerance {:.1e})",
                    norm, residual, tolerance),
        residual);
  }
  if (residual > 0.0) {
    const double scale = 1.0 / std::sqrt(norm);
    for (Amplitude& a : amplitudes) a *= scale;
  }
  return StateVector(num_parties, num_outcomes, std::move(amplitudes));
}

StateVector StateVector::Basis(int num_parties, int num_outcomes,
                               std::size_t index) {
  const std::size_t dim = JointDimension(num_parties, num_outcomes);
  if (index >= dim) {
    throw DomainError(fmt::format("basis index {} outside [0, {})", index, dim));
  }
  std::vector<Amplitude> amplitudes(dim);
  amplitudes[index] = 1.0;
  return StateVector(num_parties, num_outcomes, std::move(amplitudes));
}

double StateVector::SquaredNorm() const { return SquaredNormOf(amplitudes_); }

ProbabilityTable::ProbabilityTable(int num_parties, int num_outcomes,
                                   std::vector<double> probabilities)
    : num_parties_(num_parties),
      num_outcomes_(num_outcomes),
      probabilities_(std::move(probabilities)) {
  if (probabilities_.size() != JointDimension(num_parties, num_outcomes)) {
    throw DomainError("probability table size does not match k^n");
  }
  double total = 0.0;
  for (double p : probabilities_) {
    if (!(p >= 0.0)) throw DomainError("negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw NormalizationError(
        fmt::format("probabilities sum to {:.12g}", total),
        std::abs(total - 1.0));
  }
}

double ProbabilityTable::Marginal(int party, int outcome) const {
  if (party < 0 || party >= num_parties_) {
    throw DomainError(fmt::format("party {} out of range", party));
  }
  const auto k = static_cast<std::size_t>(num_outcomes_);
  // Stride of this party's digit in the joint index.
  std::size_t stride = 1;
  for (int p = num_parties_ - 1; p > party; --p) stride *= k;
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    if (static_cast<int>((i / stride) % k) == outcome) total += probabilities_[i];
  }
  return total;
}

StateVector BellState(int num_parties, int num_outcomes) {
  if (num_parties < 2 || num_outcomes < 2) {
    throw DomainError(fmt::format(
        "entangled state needs n >= 2 and k >= 2, got n={} k={}", num_parties,
        num_outcomes));
  }
  const std::size_t dim = JointDimension(num_parties, num_outcomes);
  std::vector<Amplitude> amplitudes(dim);
  const double weight = 1.0 / std::sqrt(static_cast<double>(num_outcomes));
  std::vector<int> digits(static_cast<std::size_t>(num_parties));
  for (int i = 0; i < num_outcomes; ++i) {
    std::fill(digits.begin(), digits.end(), i);
    amplitudes[EncodeJointIndex(digits, num_outcomes)] = weight;
  }
  return StateVector::FromAmplitudes(num_parties, num_outcomes,
                                     std::move(amplitudes));
}

StateVector BiasedPairState(Amplitude a, Amplitude b, double tolerance) {
  const double residual = std::abs(2.0 * std::norm(a) + 2.0 * std::norm(b) - 1.0);
  if (!(residual <= tolerance)) {
    throw NormalizationError(
        fmt::format("coefficients violate 2|a|^2 + 2|b|^2 = 1: residual {:.3e} "
                    "exceeds {:.1e}",
                    residual, tolerance),
        residual);
  }
  // Order AA, AB, BA, BB.
  return StateVector::FromAmplitudes(2, 2, {a, b, b, a}, tolerance);
}

ProbabilityTable BornDistribution(const StateVector& state) {
  std::vector<double> probabilities(state.dimension());
  std::transform(state.amplitudes().begin(), state.amplitudes().end(),
                 probabilities.begin(),
                 [](const Amplitude& a) { return std::norm(a); });
  return ProbabilityTable(state.num_parties(), state.num_outcomes(),
                          std::move(probabilities));
}

OutcomeProfile Sample(const ProbabilityTable& table, double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw DomainError(fmt::format("uniform {} outside [0, 1)", u));
  }
  const auto probs = table.probabilities();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (cumulative > u) {
      return DecodeJointIndex(i, table.num_parties(), table.num_outcomes());
    }
  }
  // Rounding left the total a hair below u.
  return DecodeJointIndex(last_positive, table.num_parties(),
                          table.num_outcomes());
}

OutcomeProfile Measure(const StateVector& state, double u) {
  return Sample(BornDistribution(state), u);
}

std::string KetLabel(std::size_t index, int num_parties, int num_outcomes) {
  const OutcomeProfile profile =
      DecodeJointIndex(index, num_parties, num_outcomes);
  std::string label = "|";
  for (std::size_t p = 0; p < profile.outcomes.size(); ++p) {
    // Multi-digit outcomes need a separator to stay unambiguous.
    if (p > 0 && num_outcomes > 10) label += ',';
    label += std::to_string(profile.outcomes[p]);
  }
  label += '>';
  return label;
}

}  // namespace qcoord
