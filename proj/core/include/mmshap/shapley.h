/*
 * Copyright 2026 The mmshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Exact and permutation-sampled Shapley values for a vector-valued game.
//
// A game assigns every coalition of n features one real per output token.
// Both estimators return an n x token_count matrix. The permutation estimator
// is reproducible bit-for-bit from (seed, m, n, game): coalitions are
// generated up front, evaluated in any order or in parallel, and reduced in
// a fixed order.

#ifndef MMSHAP_SHAPLEY_H_
#define MMSHAP_SHAPLEY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mmshap/types.h"

namespace mmshap {

class ValueFunction {
 public:
  virtual ~ValueFunction() = default;

  virtual std::size_t token_count() const = 0;

  // Largest number of coalitions passed to one Evaluate call.
  virtual std::size_t max_batch() const { return 64; }

  // Returns one vector of token_count() values per coalition. Must be
  // deterministic and safe to call from several threads at once.
  virtual std::vector<std::vector<double>> Evaluate(
      std::span<const Coalition> coalitions) const = 0;
};

// Wraps a per-coalition callable.
class FunctionGame : public ValueFunction {
 public:
  using Fn = std::function<std::vector<double>(const Coalition&)>;

  FunctionGame(std::size_t token_count, Fn fn)
      : token_count_(token_count), fn_(std::move(fn)) {}

  std::size_t token_count() const override { return token_count_; }
  std::vector<std::vector<double>> Evaluate(
      std::span<const Coalition> coalitions) const override;

 private:
  std::size_t token_count_;
  Fn fn_;
};

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::kPermutation;
  int permutations = 10;
  std::uint64_t seed = 0;
  // Walk every sampled permutation forward and reversed.
  bool antithetic = true;
  std::size_t exact_cap = 20;
  // Concurrent Evaluate calls issued by one estimator run.
  std::size_t max_in_flight = 1;
};

// phi[j][t] = sum over S not containing j of
//   |S|! (n-|S|-1)! / n! * (v_t(S u {j}) - v_t(S)).
// Evaluates each of the 2^n coalitions once. Throws kExactTooLarge when
// n > cfg.exact_cap.
ShapleyValues ExactShapley(const ValueFunction& game, std::size_t n,
                           const EstimatorConfig& cfg = {});

// Mean marginal contribution over cfg.permutations sampled orderings (and
// their reversals when antithetic).
ShapleyValues PermutationShapley(const ValueFunction& game, std::size_t n,
                                 const EstimatorConfig& cfg);

// Dispatches on cfg.method.
ShapleyValues EstimateShapley(const ValueFunction& game, std::size_t n,
                              const EstimatorConfig& cfg);

// Number of coalition evaluations the estimator will request:
// 2^n for exact, m * (antithetic ? 2 : 1) * n + 2 for permutation.
std::int64_t EvaluationBudget(std::size_t n, const EstimatorConfig& cfg);

// The orderings PermutationShapley walks for (n, m, seed), before reversal.
std::vector<std::vector<std::size_t>> SamplePermutations(std::size_t n, int m,
                                                         std::uint64_t seed);

// Evaluates `coalitions` in batches of game.max_batch(), up to max_in_flight
// batches concurrently. Result i belongs to coalition i. Throws
// kProtocolViolation when the game returns the wrong arity or non-finite
// values.
std::vector<std::vector<double>> EvaluateCoalitions(
    const ValueFunction& game, std::span<const Coalition> coalitions,
    std::size_t max_in_flight);

}  // namespace mmshap

#endif  // MMSHAP_SHAPLEY_H_
