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

#ifndef MMSHAP_METRICS_H_
#define MMSHAP_METRICS_H_

#include "mmshap/types.h"

namespace mmshap {

// Phi_A and Phi_T are sums of |phi| over answer tokens and over the audio
// and text rows respectively. A-SHAP = Phi_A / (Phi_A + Phi_T) and
// T-SHAP = 1 - A-SHAP; both are left empty when the total is zero.
ModalityScore ModalityContribution(const AttributionMatrix& attribution);

}  // namespace mmshap

#endif  // MMSHAP_METRICS_H_
