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

// Accuracy and A-SHAP aggregation per (model, prompt mode) cell.

#ifndef MMSHAP_REPORT_H_
#define MMSHAP_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmshap/runner.h"

namespace mmshap {

inline constexpr std::string_view kIntervalLabel =
    "+/- is 1.96 * standard error of the per-question A-SHAP (normal approximation)";

struct ReportCell {
  std::string model_id;
  PromptMode mode = PromptMode::kMcNpi;
  std::size_t n_questions = 0;
  std::size_t n_correct = 0;
  std::size_t n_unparsed = 0;
  double accuracy = 0.0;  // unparsed answers count as incorrect
  double unparsed_rate = 0.0;
  std::size_t n_defined = 0;  // questions with a defined A-SHAP
  std::size_t n_flagged = 0;  // undefined A-SHAP (all attributions zero)
  std::optional<double> a_shap_mean;
  double a_shap_half_width = 0.0;
};

struct RunReport {
  std::vector<ReportCell> cells;  // sorted by model id, then MC-PI before MC-NPI
};

// Groups results by (model_id, mode). Within a cell results are reduced in
// question-id order so the output does not depend on input order.
RunReport AggregateReport(std::span<const QuestionResult> results);

enum class ReportFormat { kMarkdown, kCsv, kJson };

std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// Markdown renders the accuracy / A-SHAP table (model rows, MC-PI and MC-NPI
// columns) followed by per-cell counts. CSV and JSON carry every field.
std::string FormatReport(const RunReport& report, ReportFormat format);

}  // namespace mmshap

#endif  // MMSHAP_REPORT_H_
