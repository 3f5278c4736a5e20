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

#include "mmshap/shapley.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "mmshap/error.h"

namespace mmshap {
namespace {

// Uniform draw in [0, bound) by rejection, so the sequence depends only on
// the mt19937_64 stream and not on the standard library's distributions.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

void CheckFeatureCount(std::size_t n) {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "game has no features");
  }
}

Coalition CoalitionFromMask(std::size_t n, std::uint64_t mask) {
  Coalition c(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (mask & (std::uint64_t{1} << j)) c.insert(j);
  }
  return c;
}

}  // namespace

std::vector<std::vector<double>> FunctionGame::Evaluate(
    std::span<const Coalition> coalitions) const {
  std::vector<std::vector<double>> out;
  out.reserve(coalitions.size());
  for (const Coalition& c : coalitions) out.push_back(fn_(c));
  return out;
}

std::vector<std::vector<double>> EvaluateCoalitions(
    const ValueFunction& game, std::span<const Coalition> coalitions,
    std::size_t max_in_flight) {
  const std::size_t batch = std::max<std::size_t>(1, game.max_batch());
  const std::size_t batches = (coalitions.size() + batch - 1) / batch;
  std::vector<std::vector<double>> results(coalitions.size());
  std::vector<std::exception_ptr> errors(batches);

  auto run_batch = [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(coalitions.size(), begin + batch);
    try {
      auto values = game.Evaluate(coalitions.subspan(begin, end - begin));
      if (values.size() != end - begin) {
        throw Error(ErrorCode::kProtocolViolation,
                    "game returned " + std::to_string(values.size()) +
                        " results for " + std::to_string(end - begin) +
                        " coalitions");
      }
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != game.token_count()) {
          throw Error(ErrorCode::kProtocolViolation,
                      "game returned " + std::to_string(values[i].size()) +
                          " values, expected " +
                          std::to_string(game.token_count()));
        }
        for (double v : values[i]) {
          if (!std::isfinite(v)) {
            throw Error(ErrorCode::kProtocolViolation,
                        "game returned a non-finite value");
          }
        }
        results[begin + i] = std::move(values[i]);
      }
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };

  const std::size_t workers = std::min(max_in_flight, batches);
  if (workers <= 1) {
    for (std::size_t b = 0; b < batches; ++b) {
      run_batch(b);
      if (errors[b]) std::rethrow_exception(errors[b]);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < batches && !failed; b = next++) {
          run_batch(b);
          if (errors[b]) failed = true;
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::int64_t EvaluationBudget(std::size_t n, const EstimatorConfig& cfg) {
  if (cfg.method == EstimatorMethod::kExact) {
    return std::int64_t{1} << n;
  }
  const std::int64_t walks =
      static_cast<std::int64_t>(cfg.permutations) * (cfg.antithetic ? 2 : 1);
  return walks * static_cast<std::int64_t>(n) + 2;
}

std::vector<std::vector<std::size_t>> SamplePermutations(std::size_t n, int m,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> perms;
  perms.reserve(static_cast<std::size_t>(std::max(m, 0)));
  for (int k = 0; k < m; ++k) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[UniformBelow(rng, i)]);
    }
    perms.push_back(std::move(order));
  }
  return perms;
}

ShapleyValues ExactShapley(const ValueFunction& game, std::size_t n,
                           const EstimatorConfig& cfg) {
  CheckFeatureCount(n);
  if (n > cfg.exact_cap || n >= 63) {
    throw Error(ErrorCode::kExactTooLarge,
                std::to_string(n) + " features exceeds the exact cap of " +
                    std::to_string(cfg.exact_cap));
  }
  const std::size_t tokens = game.token_count();
  const std::uint64_t subsets = std::uint64_t{1} << n;

  // value[mask * tokens + t], filled chunk by chunk to bound the number of
  // live Coalition objects.
  std::vector<double> value(subsets * tokens);
  constexpr std::uint64_t kChunk = 4096;
  for (std::uint64_t start = 0; start < subsets; start += kChunk) {
    const std::uint64_t stop = std::min(subsets, start + kChunk);
    std::vector<Coalition> chunk;
    chunk.reserve(stop - start);
    for (std::uint64_t mask = start; mask < stop; ++mask) {
      chunk.push_back(CoalitionFromMask(n, mask));
    }
    auto results = EvaluateCoalitions(game, chunk, cfg.max_in_flight);
    for (std::uint64_t mask = start; mask < stop; ++mask) {
      std::copy(results[mask - start].begin(), results[mask - start].end(),
                value.begin() + static_cast<std::ptrdiff_t>(mask * tokens));
    }
  }

  // weight[s] = s! (n-s-1)! / n!
  std::vector<double> weight(n);
  weight[0] = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    weight[s + 1] = weight[s] * static_cast<double>(s + 1) /
                    static_cast<double>(n - s - 1);
  }

  ShapleyValues out;
  out.feature_count = n;
  out.token_count = tokens;
  out.values.assign(n * tokens, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
      const double* without = &value[mask * tokens];
      const double* with = &value[(mask | bit) * tokens];
      for (std::size_t t = 0; t < tokens; ++t) {
        out.at(j, t) += w * (with[t] - without[t]);
      }
    }
  }
  const double* full = &value[(subsets - 1) * tokens];
  out.full_value.assign(full, full + tokens);
  out.empty_value.assign(value.begin(),
                         value.begin() + static_cast<std::ptrdiff_t>(tokens));
  out.meta = {EstimatorMethod::kExact, 0, cfg.seed, false,
              static_cast<std::int64_t>(subsets)};
  return out;
}

ShapleyValues PermutationShapley(const ValueFunction& game, std::size_t n,
                                 const EstimatorConfig& cfg) {
  CheckFeatureCount(n);
  if (cfg.permutations < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "permutation count must be at least 1");
  }
  const std::size_t tokens = game.token_count();

  std::vector<std::vector<std::size_t>> walks;
  for (auto& perm : SamplePermutations(n, cfg.permutations, cfg.seed)) {
    std::vector<std::size_t> reversed(perm.rbegin(), perm.rend());
    walks.push_back(std::move(perm));
    if (cfg.antithetic) walks.push_back(std::move(reversed));
  }

  // [0] empty, [1] full, then the n growing prefixes of every walk.
  std::vector<Coalition> coalitions;
  coalitions.reserve(2 + walks.size() * n);
  coalitions.push_back(Coalition::Empty(n));
  coalitions.push_back(Coalition::Full(n));
  for (const auto& walk : walks) {
    Coalition current(n);
    for (std::size_t j : walk) {
      current.insert(j);
      coalitions.push_back(current);
    }
  }
  const auto results = EvaluateCoalitions(game, coalitions, cfg.max_in_flight);

  ShapleyValues out;
  out.feature_count = n;
  out.token_count = tokens;
  out.values.assign(n * tokens, 0.0);
  std::size_t next = 2;
  for (const auto& walk : walks) {
    const std::vector<double>* before = &results[0];
    for (std::size_t j : walk) {
      const std::vector<double>& after = results[next++];
      for (std::size_t t = 0; t < tokens; ++t) {
        out.at(j, t) += after[t] - (*before)[t];
      }
      before = &after;
    }
  }
  const double count = static_cast<double>(walks.size());
  for (double& v : out.values) v /= count;

  out.empty_value = results[0];
  out.full_value = results[1];
  out.meta = {EstimatorMethod::kPermutation, cfg.permutations, cfg.seed,
              cfg.antithetic, static_cast<std::int64_t>(coalitions.size())};
  return out;
}

ShapleyValues EstimateShapley(const ValueFunction& game, std::size_t n,
                              const EstimatorConfig& cfg) {
  return cfg.method == EstimatorMethod::kExact ? ExactShapley(game, n, cfg)
                                               : PermutationShapley(game, n, cfg);
}

}  // namespace mmshap
