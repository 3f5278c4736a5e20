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

// On-disk run directories:
//   <run>/run.json              model id, mode and configuration snapshot
//   <run>/questions/<id>.json   one QuestionResult per file
//   <run>/failures.json         per-question failures
//   <run>/summary.json          the report computed when the run finished

#ifndef MMSHAP_RESULTS_IO_H_
#define MMSHAP_RESULTS_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "mmshap/runner.h"

namespace mmshap {

std::string QuestionResultToJson(const QuestionResult& result);
// Throws kSchemaError.
QuestionResult QuestionResultFromJson(const std::string& text);

std::filesystem::path QuestionResultPath(const std::filesystem::path& run_dir,
                                         const std::string& question_id);
void SaveQuestionResult(const std::filesystem::path& run_dir,
                        const QuestionResult& result);

void SaveFailures(const std::filesystem::path& run_dir,
                  const std::vector<QuestionFailure>& failures);

std::string RunConfigToJson(const RunConfig& config, const std::string& model_id);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

struct RunDirectory {
  std::filesystem::path path;
  std::vector<QuestionResult> results;  // sorted by question id
  std::vector<QuestionFailure> failures;
};

// Loads every question file. Recomputes each stored modality score from the
// persisted matrix and throws kSchemaError if they disagree.
RunDirectory LoadRunDirectory(const std::filesystem::path& run_dir);

// `root` itself if it holds run.json, else its immediate subdirectories that
// do, sorted by name.
std::vector<std::filesystem::path> FindRunDirectories(const std::filesystem::path& root);

}  // namespace mmshap

#endif  // MMSHAP_RESULTS_IO_H_
