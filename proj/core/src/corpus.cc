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

#include "mmshap/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmshap/error.h"

namespace mmshap {
namespace {

using nlohmann::json;

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void Schema(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, where + ": " + what);
}

std::string RequireString(const json& record, const char* key,
                          const std::string& where) {
  auto it = record.find(key);
  if (it == record.end()) Schema(where + "." + key, "missing");
  if (!it->is_string()) Schema(where + "." + key, "must be a string");
  return it->get<std::string>();
}

std::optional<std::string> OptionalString(const json& record, const char* key,
                                          const std::string& where) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) Schema(where + "." + key, "must be a string or null");
  return it->get<std::string>();
}

void ReplaceAll(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

LoadedCorpus ParseCorpus(std::string_view json_text,
                         const std::filesystem::path& audio_root,
                         const CorpusFilter& filter) {
  const json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) Schema("$", "not valid JSON");
  if (!doc.is_object() || !doc.contains("questions") || !doc["questions"].is_array()) {
    Schema("$", "expected an object with a \"questions\" array");
  }
  const json& records = doc["questions"];
  if (records.empty()) Schema("questions", "no questions");

  LoadedCorpus out;
  out.total_records = records.size();
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string where = "questions[" + std::to_string(i) + "]";
    const json& r = records[i];
    if (!r.is_object()) Schema(where, "must be an object");

    McQuestion q;
    q.question_id = RequireString(r, "id", where);
    if (q.question_id.empty()) Schema(where + ".id", "must be nonempty");
    if (!seen_ids.insert(q.question_id).second) {
      Schema(where + ".id", "duplicate id '" + q.question_id + "'");
    }
    q.audio_path = audio_root / RequireString(r, "audio", where);
    q.question_text = RequireString(r, "question", where);

    auto opts = r.find("options");
    if (opts == r.end() || !opts->is_array() || opts->empty()) {
      Schema(where + ".options", "must be a nonempty array");
    }
    std::set<std::string> letters;
    for (std::size_t k = 0; k < opts->size(); ++k) {
      const std::string owhere = where + ".options[" + std::to_string(k) + "]";
      const json& o = (*opts)[k];
      if (!o.is_object()) Schema(owhere, "must be an object");
      McOption option{RequireString(o, "letter", owhere),
                      RequireString(o, "text", owhere)};
      if (option.letter.empty()) Schema(owhere + ".letter", "must be nonempty");
      if (!letters.insert(option.letter).second) {
        Schema(owhere + ".letter", "duplicate letter '" + option.letter + "'");
      }
      q.options.push_back(std::move(option));
    }
    q.correct_letter = RequireString(r, "answer", where);
    if (!letters.contains(q.correct_letter)) {
      Schema(where + ".answer", "'" + q.correct_letter + "' is not an option letter");
    }
    q.category = OptionalString(r, "category", where);
    q.source = OptionalString(r, "source", where);

    if (filter.source &&
        (!q.source || Lower(*q.source) != Lower(*filter.source))) {
      continue;
    }
    if (filter.grep &&
        Lower(q.question_text).find(Lower(*filter.grep)) == std::string::npos) {
      continue;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(q.audio_path, ec)) {
      out.warnings.push_back(q.question_id + ": audio file not found: " +
                             q.audio_path.string());
      continue;
    }
    out.questions.push_back(std::move(q));
  }
  return out;
}

LoadedCorpus LoadCorpus(const std::filesystem::path& dataset_path,
                        const std::filesystem::path& audio_root,
                        const CorpusFilter& filter) {
  std::ifstream in(dataset_path);
  if (!in) {
    throw Error(ErrorCode::kSchemaError, "cannot read " + dataset_path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseCorpus(buf.str(), audio_root, filter);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError) throw;
    throw Error(ErrorCode::kSchemaError, dataset_path.string() + ": " + e.what());
  }
}

std::string_view PromptModeName(PromptMode mode) {
  return mode == PromptMode::kMcPi ? "mc-pi" : "mc-npi";
}

std::string_view PromptModeLabel(PromptMode mode) {
  return mode == PromptMode::kMcPi ? "MC-PI" : "MC-NPI";
}

std::optional<PromptMode> ParsePromptMode(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "mc-pi" || n == "mc_pi") return PromptMode::kMcPi;
  if (n == "mc-npi" || n == "mc_npi") return PromptMode::kMcNpi;
  return std::nullopt;
}

PromptTemplate DefaultPromptTemplate() {
  PromptTemplate t;
  t.in_context_example =
      "<|question|> Which instrument plays the main melody in this piece?\n"
      "(A) Violin\n(B) Trumpet\n(C) Piano\n(D) Flute\n<|answer|> (C) Piano";
  return t;
}

PromptTemplate LoadPromptTemplate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSchemaError, "cannot read " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    Schema(path.string(), "template must be a JSON object");
  }
  PromptTemplate t;
  const std::string where = path.string();
  if (auto v = OptionalString(j, "system_instruction", where)) t.system_instruction = *v;
  t.in_context_example = OptionalString(j, "in_context_example", where);
  if (auto v = OptionalString(j, "header_format", where)) t.header_format = *v;
  if (auto v = OptionalString(j, "question_block_format", where)) {
    t.question_block_format = *v;
  }
  if (auto v = OptionalString(j, "option_format", where)) t.option_format = *v;
  return t;
}

std::string BuildPrompt(const McQuestion& question, const PromptTemplate& tmpl,
                        PromptMode mode) {
  if (mode == PromptMode::kMcPi && !tmpl.in_context_example) {
    throw Error(ErrorCode::kMissingExample,
                "MC-PI prompt requested but the template has no in-context example");
  }
  std::string header = tmpl.header_format;
  ReplaceAll(header, "{system}", tmpl.system_instruction);

  std::string options;
  for (std::size_t k = 0; k < question.options.size(); ++k) {
    std::string line = tmpl.option_format;
    ReplaceAll(line, "{letter}", question.options[k].letter);
    ReplaceAll(line, "{text}", question.options[k].text);
    if (k > 0) options += "\n";
    options += line;
  }
  std::string block = tmpl.question_block_format;
  ReplaceAll(block, "{options}", options);
  ReplaceAll(block, "{question}", question.question_text);

  std::string prompt = header;
  if (mode == PromptMode::kMcPi) prompt += *tmpl.in_context_example + "\n";
  prompt += block;
  return prompt;
}

std::optional<std::string> MatchAnswer(std::string_view answer_text,
                                       const std::vector<McOption>& options) {
  std::set<std::string> formatted;
  std::set<std::string> bare;
  for (const McOption& o : options) {
    const std::string& letter = o.letter;
    for (std::size_t pos = answer_text.find(letter); pos != std::string_view::npos;
         pos = answer_text.find(letter, pos + 1)) {
      const std::size_t end = pos + letter.size();
      const char before = pos > 0 ? answer_text[pos - 1] : ' ';
      const char after = end < answer_text.size() ? answer_text[end] : ' ';
      if (IsAlnum(before) || IsAlnum(after)) continue;
      if (after == ')' || after == '.') {
        formatted.insert(letter);
      } else {
        bare.insert(letter);
      }
    }
  }
  for (const auto* stage : {&formatted, &bare}) {
    if (stage->size() == 1) return *stage->begin();
    if (stage->size() > 1) return std::nullopt;
  }

  const std::string haystack = Lower(answer_text);
  std::optional<std::string> hit;
  for (const McOption& o : options) {
    if (o.text.empty()) continue;
    if (haystack.find(Lower(o.text)) != std::string::npos) {
      if (hit) return std::nullopt;
      hit = o.letter;
    }
  }
  return hit;
}

}  // namespace mmshap
