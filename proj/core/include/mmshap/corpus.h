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

// Multiple-choice corpus loading, prompt construction and answer matching.

#ifndef MMSHAP_CORPUS_H_
#define MMSHAP_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmshap {

struct McOption {
  std::string letter;
  std::string text;
};

struct McQuestion {
  std::string question_id;
  std::filesystem::path audio_path;  // resolved against the audio root
  std::string question_text;
  std::vector<McOption> options;
  std::string correct_letter;
  std::optional<std::string> category;
  std::optional<std::string> source;
};

struct CorpusFilter {
  // Keep only questions whose source equals this (case-insensitive).
  std::optional<std::string> source;
  // Keep only questions whose text contains this (case-insensitive).
  std::optional<std::string> grep;
};

struct LoadedCorpus {
  std::vector<McQuestion> questions;
  std::vector<std::string> warnings;  // one per excluded question
  std::size_t total_records = 0;
};

// Parses the corpus JSON. Throws kSchemaError naming the first offending
// record (e.g. "questions[3].answer"). Questions whose audio file is missing
// are dropped with a warning.
LoadedCorpus LoadCorpus(const std::filesystem::path& dataset_path,
                        const std::filesystem::path& audio_root,
                        const CorpusFilter& filter = {});
LoadedCorpus ParseCorpus(std::string_view json_text,
                         const std::filesystem::path& audio_root,
                         const CorpusFilter& filter = {});

enum class PromptMode { kMcPi, kMcNpi };

std::string_view PromptModeName(PromptMode mode);  // "mc-pi" / "mc-npi"
std::string_view PromptModeLabel(PromptMode mode);  // "MC-PI" / "MC-NPI"
std::optional<PromptMode> ParsePromptMode(std::string_view name);

// Placeholders: {system}, {question}, {options}, {letter}, {text}.
struct PromptTemplate {
  std::string system_instruction =
      "You're a reliable assistant, follow these instructions.";
  std::optional<std::string> in_context_example;
  std::string header_format = "<|system|> {system}\n<|user|> <audio> #Audio\n";
  std::string question_block_format =
      "<|question|> {question}\n{options}\n<|answer|>";
  std::string option_format = "({letter}) {text}";
};

// The default layout with a worked multiple-choice example for MC-PI.
PromptTemplate DefaultPromptTemplate();

// Reads a template JSON file whose keys mirror PromptTemplate; missing keys
// keep their defaults. Throws kSchemaError.
PromptTemplate LoadPromptTemplate(const std::filesystem::path& path);

// Throws kMissingExample for MC-PI without an in-context example.
std::string BuildPrompt(const McQuestion& question, const PromptTemplate& tmpl,
                        PromptMode mode);

// Matching cascade: (1) a standalone option letter, where "(B)", "B)" and
// "B." forms take precedence over bare letters; (2) the unique option whose
// text occurs in the answer, case-insensitively. The first stage that finds
// anything decides; more than one distinct candidate means unparsed.
std::optional<std::string> MatchAnswer(std::string_view answer_text,
                                       const std::vector<McOption>& options);

}  // namespace mmshap

#endif  // MMSHAP_CORPUS_H_
