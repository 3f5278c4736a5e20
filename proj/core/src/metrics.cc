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

#include "mmshap/metrics.h"

#include <cmath>

namespace mmshap {

ModalityScore ModalityContribution(const AttributionMatrix& attribution) {
  ValidateAttribution(attribution);
  const std::size_t n_audio = attribution.partition.n_audio;
  ModalityScore score;
  for (std::size_t t = 0; t < attribution.token_count(); ++t) {
    for (std::size_t j = 0; j < attribution.feature_count(); ++j) {
      const double magnitude = std::abs(attribution.at(j, t));
      (j < n_audio ? score.phi_audio : score.phi_text) += magnitude;
    }
  }
  const double total = score.phi_audio + score.phi_text;
  if (total > 0.0) {
    score.a_shap = score.phi_audio / total;
    score.t_shap = 1.0 - *score.a_shap;
  }
  return score;
}

}  // namespace mmshap
