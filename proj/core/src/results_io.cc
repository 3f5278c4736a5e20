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

#include "mmshap/results_io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mmshap/error.h"
#include "mmshap/metrics.h"

namespace mmshap {
namespace {

using nlohmann::json;

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> ReadOptionalNumber(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string MethodName(EstimatorMethod m) {
  return m == EstimatorMethod::kExact ? "exact" : "permutation";
}

std::string SafeFileStem(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

json ScoreJson(const ModalityScore& s) {
  return {{"phi_audio", s.phi_audio},
          {"phi_text", s.phi_text},
          {"a_shap", OptionalNumber(s.a_shap)},
          {"t_shap", OptionalNumber(s.t_shap)}};
}

bool SameScore(const ModalityScore& a, const ModalityScore& b) {
  return a.phi_audio == b.phi_audio && a.phi_text == b.phi_text &&
         a.a_shap == b.a_shap && a.t_shap == b.t_shap;
}

}  // namespace

std::string QuestionResultToJson(const QuestionResult& r) {
  json j = {
      {"question_id", r.question_id},
      {"model_id", r.model_id},
      {"mode", PromptModeName(r.mode)},
      {"answer_text", r.answer_text},
      {"answer_tokens", r.answer_tokens},
      {"matched_letter", r.matched_letter ? json(*r.matched_letter) : json(nullptr)},
      {"correct_letter", r.correct_letter},
      {"is_correct", r.is_correct},
      {"modality_score", ScoreJson(r.modality_score)},
      {"text_feature_surfaces", r.text_feature_surfaces},
      {"audio_samples", r.audio_samples},
      {"sample_rate_hz", r.sample_rate_hz},
      {"evaluation_count", r.evaluation_count},
      {"wall_time_s", r.wall_time_s},
      {"estimator",
       {{"method", MethodName(r.estimator.method)},
        {"m", r.estimator.permutations},
        {"seed", r.estimator.seed},
        {"antithetic", r.estimator.antithetic},
        {"evaluations", r.estimator.evaluations}}},
      {"attribution", nullptr}};
  if (r.attribution) {
    const AttributionMatrix& a = *r.attribution;
    json windows = json::array();
    for (const Span& w : a.partition.audio_windows) windows.push_back({w.begin, w.end});
    json rows = json::array();
    for (std::size_t f = 0; f < a.feature_count(); ++f) {
      json row = json::array();
      for (std::size_t t = 0; t < a.token_count(); ++t) row.push_back(a.at(f, t));
      rows.push_back(std::move(row));
    }
    j["attribution"] = {{"n_audio", a.partition.n_audio},
                        {"n_text", a.partition.n_text},
                        {"audio_windows", windows},
                        {"text_positions", a.partition.text_positions},
                        {"token_count", a.token_count()},
                        {"values", rows},
                        {"full_value", a.shapley.full_value},
                        {"empty_value", a.shapley.empty_value}};
  }
  return j.dump(1) + "\n";
}

QuestionResult QuestionResultFromJson(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kSchemaError, "question file is not a JSON object");
  }
  try {
    QuestionResult r;
    r.question_id = j.at("question_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    const auto mode = ParsePromptMode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::kSchemaError, "unknown mode");
    r.mode = *mode;
    r.answer_text = j.at("answer_text").get<std::string>();
    r.answer_tokens = j.at("answer_tokens").get<std::vector<std::string>>();
    if (!j.at("matched_letter").is_null()) {
      r.matched_letter = j.at("matched_letter").get<std::string>();
    }
    r.correct_letter = j.at("correct_letter").get<std::string>();
    r.is_correct = j.at("is_correct").get<bool>();
    const json& s = j.at("modality_score");
    r.modality_score.phi_audio = s.at("phi_audio").get<double>();
    r.modality_score.phi_text = s.at("phi_text").get<double>();
    r.modality_score.a_shap = ReadOptionalNumber(s.at("a_shap"));
    r.modality_score.t_shap = ReadOptionalNumber(s.at("t_shap"));
    r.text_feature_surfaces =
        j.at("text_feature_surfaces").get<std::vector<std::string>>();
    r.audio_samples = j.at("audio_samples").get<std::size_t>();
    r.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    r.evaluation_count = j.at("evaluation_count").get<std::int64_t>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    const json& e = j.at("estimator");
    r.estimator.method = e.at("method").get<std::string>() == "exact"
                             ? EstimatorMethod::kExact
                             : EstimatorMethod::kPermutation;
    r.estimator.permutations = e.at("m").get<int>();
    r.estimator.seed = e.at("seed").get<std::uint64_t>();
    r.estimator.antithetic = e.at("antithetic").get<bool>();
    r.estimator.evaluations = e.at("evaluations").get<std::int64_t>();

    const json& a = j.at("attribution");
    if (!a.is_null()) {
      AttributionMatrix m;
      m.partition.n_audio = a.at("n_audio").get<std::size_t>();
      m.partition.n_text = a.at("n_text").get<std::size_t>();
      for (const json& w : a.at("audio_windows")) {
        m.partition.audio_windows.push_back(
            {w.at(0).get<std::size_t>(), w.at(1).get<std::size_t>()});
      }
      m.partition.text_positions =
          a.at("text_positions").get<std::vector<std::size_t>>();
      m.shapley.token_count = a.at("token_count").get<std::size_t>();
      const json& rows = a.at("values");
      m.shapley.feature_count = rows.size();
      for (const json& row : rows) {
        if (row.size() != m.shapley.token_count) {
          throw Error(ErrorCode::kSchemaError, "ragged attribution row");
        }
        for (const json& v : row) m.shapley.values.push_back(v.get<double>());
      }
      m.shapley.full_value = a.at("full_value").get<std::vector<double>>();
      m.shapley.empty_value = a.at("empty_value").get<std::vector<double>>();
      m.shapley.meta = r.estimator;
      if (m.partition.audio_windows.size() != m.partition.n_audio ||
          m.partition.text_positions.size() != m.partition.n_text) {
        throw Error(ErrorCode::kSchemaError, "partition counts disagree");
      }
      ValidateAttribution(m);
      r.attribution = std::move(m);
    }
    return r;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kSchemaError, std::string("question file: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::kSchemaError) throw;
    throw Error(ErrorCode::kSchemaError, ex.what());
  }
}

std::filesystem::path QuestionResultPath(const std::filesystem::path& run_dir,
                                         const std::string& question_id) {
  return run_dir / "questions" / (SafeFileStem(question_id) + ".json");
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void SaveQuestionResult(const std::filesystem::path& run_dir,
                        const QuestionResult& result) {
  std::filesystem::create_directories(run_dir / "questions");
  WriteTextFile(QuestionResultPath(run_dir, result.question_id),
                QuestionResultToJson(result));
}

void SaveFailures(const std::filesystem::path& run_dir,
                  const std::vector<QuestionFailure>& failures) {
  json list = json::array();
  for (const QuestionFailure& f : failures) {
    list.push_back({{"question_id", f.question_id},
                    {"code", ErrorCodeName(f.code)},
                    {"message", f.message}});
  }
  WriteTextFile(run_dir / "failures.json", list.dump(1) + "\n");
}

std::string RunConfigToJson(const RunConfig& config, const std::string& model_id) {
  const EstimatorConfig& e = config.estimator;
  json j = {{"model_id", model_id},
            {"mode", PromptModeName(config.mode)},
            {"estimator",
             {{"method", config.estimator_explicit ? MethodName(e.method) : "auto"},
              {"m", e.permutations},
              {"seed", e.seed},
              {"antithetic", e.antithetic},
              {"auto_exact_max", config.auto_exact_max}}},
            {"max_audio_seconds", OptionalNumber(config.max_audio_seconds)},
            {"collapse_tokens", config.scoring.collapse_tokens},
            {"concurrency", config.concurrency},
            {"system_instruction", config.prompt_template.system_instruction}};
  return j.dump(1) + "\n";
}

RunDirectory LoadRunDirectory(const std::filesystem::path& run_dir) {
  RunDirectory out;
  out.path = run_dir;
  const auto qdir = run_dir / "questions";
  std::error_code ec;
  if (!std::filesystem::is_directory(qdir, ec)) {
    throw Error(ErrorCode::kSchemaError, run_dir.string() + " is not a run directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(qdir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    QuestionResult r;
    try {
      r = QuestionResultFromJson(ReadTextFile(f));
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaError, f.string() + ": " + e.what());
    }
    if (r.attribution && !SameScore(ModalityContribution(*r.attribution),
                                    r.modality_score)) {
      throw Error(ErrorCode::kSchemaError,
                  f.string() + ": stored modality score does not match its matrix");
    }
    out.results.push_back(std::move(r));
  }
  std::sort(out.results.begin(), out.results.end(),
            [](const QuestionResult& a, const QuestionResult& b) {
              return a.question_id < b.question_id;
            });

  const auto failures_path = run_dir / "failures.json";
  if (std::filesystem::exists(failures_path, ec)) {
    const json list = json::parse(ReadTextFile(failures_path), nullptr, false);
    if (list.is_array()) {
      for (const json& f : list) {
        QuestionFailure qf;
        qf.question_id = f.value("question_id", "");
        qf.message = f.value("message", "");
        ParseErrorCode(f.value("code", ""), &qf.code);
        out.failures.push_back(std::move(qf));
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> FindRunDirectories(const std::filesystem::path& root) {
  std::error_code ec;
  if (std::filesystem::exists(root / "run.json", ec)) return {root};
  std::vector<std::filesystem::path> runs;
  if (std::filesystem::is_directory(root, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "run.json", ec)) {
        runs.push_back(entry.path());
      }
    }
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

}  // namespace mmshap
