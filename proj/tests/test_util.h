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

// Shared fixtures for the unit tests.

#ifndef MMSHAP_TESTS_TEST_UTIL_H_
#define MMSHAP_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mmshap/types.h"

namespace mmshap::testing_util {

// Nowhere-zero tone, so no window of it is mistaken for a masked one.
inline AudioClip ToneClip(std::size_t samples, int rate = 16000) {
  AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    clip.samples[i] =
        0.25f + 0.5f * static_cast<float>(std::sin(2.0 * M_PI * 440.0 * i / rate));
  }
  return clip;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mmshap_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Shapley values by averaging marginals over all n! orderings.
template <typename Fn>
std::vector<double> BruteForceShapley(std::size_t n, Fn v) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    std::vector<bool> present(n, false);
    double prev = v(present);
    for (std::size_t j : order) {
      present[j] = true;
      const double cur = v(present);
      phi[j] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

inline std::vector<bool> ToMask(const Coalition& s) {
  std::vector<bool> m(s.universe());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = s.contains(j);
  return m;
}

}  // namespace mmshap::testing_util

#endif  // MMSHAP_TESTS_TEST_UTIL_H_
