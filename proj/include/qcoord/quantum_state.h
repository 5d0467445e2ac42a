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

#ifndef QCOORD_QUANTUM_STATE_H_
#define QCOORD_QUANTUM_STATE_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcoord {

using Amplitude = std::complex<double>;

// Largest joint basis size (k^n) a state may have.
inline constexpr std::uint64_t kMaxDimension = std::uint64_t{1} << 31;

// Norm residual accepted (and silently renormalized) by generic construction.
inline constexpr double kConstructionTolerance = 1e-6;

// Residual accepted by the two-outcome biased pair constructor by default, and
// the tolerance all probability checks use after construction.
inline constexpr double kNormTolerance = 1e-9;

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionOverflowError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Raised when a set of amplitudes is too far from unit norm to be a state.
class NormalizationError : public std::domain_error {
 public:
  NormalizationError(const std::string& what, double residual)
      : std::domain_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// k^n, or DimensionOverflowError when it exceeds kMaxDimension.
std::size_t JointDimension(int num_parties, int num_outcomes);

// One outcome per party.
struct OutcomeProfile {
  std::vector<int> outcomes;

  bool AllEqual() const;
  friend bool operator==(const OutcomeProfile&, const OutcomeProfile&) = default;
};

// Joint index <-> per-party outcomes. Base k, party 0 is the most significant
// digit.
std::size_t EncodeJointIndex(std::span<const int> outcomes, int num_outcomes);
OutcomeProfile DecodeJointIndex(std::size_t index, int num_parties,
                                int num_outcomes);

// Dense amplitudes over the k^n joint basis of n parties. Immutable; every
// instance is normalized to within kNormTolerance.
class StateVector {
 public:
  // Renormalizes when the squared-norm residual is at most `tolerance`,
  // otherwise throws NormalizationError.
  static StateVector FromAmplitudes(int num_parties, int num_outcomes,
                                    std::vector<Amplitude> amplitudes,
                                    double tolerance = kConstructionTolerance);

  // The deterministic state concentrated on a single joint outcome.
  static StateVector Basis(int num_parties, int num_outcomes,
                           std::size_t index);

  int num_parties() const { return num_parties_; }
  int num_outcomes() const { return num_outcomes_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  const Amplitude& operator[](std::size_t i) const { return amplitudes_[i]; }

  // Sum of |amplitude|^2.
  double SquaredNorm() const;

 private:
  StateVector(int num_parties, int num_outcomes,
              std::vector<Amplitude> amplitudes)
      : num_parties_(num_parties),
        num_outcomes_(num_outcomes),
        amplitudes_(std::move(amplitudes)) {}

  int num_parties_;
  int num_outcomes_;
  std::vector<Amplitude> amplitudes_;
};

// Born-rule distribution over joint outcomes, indexed like StateVector.
class ProbabilityTable {
 public:
  ProbabilityTable(int num_parties, int num_outcomes,
                   std::vector<double> probabilities);

  int num_parties() const { return num_parties_; }
  int num_outcomes() const { return num_outcomes_; }
  std::span<const double> probabilities() const { return probabilities_; }
  double operator[](std::size_t i) const { return probabilities_[i]; }
  std::size_t size() const { return probabilities_.size(); }

  // Probability that `party` observes `outcome`.
  double Marginal(int party, int outcome) const;

 private:
  int num_parties_;
  int num_outcomes_;
  std::vector<double> probabilities_;
};

// Generalized GHZ state: 1/sqrt(k) on each all-equal outcome (i, i, ..., i).
// With n = k = 2 this is the Bell pair (|00> + |11>)/sqrt(2).
StateVector BellState(int num_parties, int num_outcomes);

// a|AA> + b|AB> + b|BA> + a|BB>, requiring 2|a|^2 + 2|b|^2 = 1 within
// `tolerance`. Throws NormalizationError carrying the residual otherwise.
StateVector BiasedPairState(Amplitude a, Amplitude b,
                            double tolerance = kNormTolerance);

ProbabilityTable BornDistribution(const StateVector& state);

// Inverse-CDF joint measurement: the first joint index whose cumulative Born
// probability exceeds u, decoded into per-party outcomes. Every party's
// outcome comes from this one draw. Requires u in [0, 1).
OutcomeProfile Measure(const StateVector& state, double u);

// Same as Measure over a precomputed distribution.
OutcomeProfile Sample(const ProbabilityTable& table, double u);

// "|012>" style label for a joint index.
std::string KetLabel(std::size_t index, int num_parties, int num_outcomes);

}  // namespace qcoord

#endif  // QCOORD_QUANTUM_STATE_H_
