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

#ifndef MMSHAP_CONFORMANCE_H_
#define MMSHAP_CONFORMANCE_H_

#include <string>
#include <vector>

#include "mmshap/wire.h"

namespace mmshap {

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;

  bool passed() const;
  std::string Summary() const;  // one "PASS|FAIL name: detail" line per check
};

// Exercises a /v1 server end to end: describe stability, tokenize spans,
// generate arity and determinism, full-input score against generate logits,
// batched against unbatched scores, and rejection of malformed requests.
ConformanceReport RunConformanceSuite(const std::string& base_url,
                                      const WireOptions& options = {});

}  // namespace mmshap

#endif  // MMSHAP_CONFORMANCE_H_
