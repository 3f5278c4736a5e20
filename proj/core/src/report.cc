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

#include "mmshap/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mmshap {
namespace {

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Precise(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunReport AggregateReport(std::span<const QuestionResult> results) {
  std::map<std::pair<std::string, int>, std::vector<const QuestionResult*>> groups;
  for (const QuestionResult& r : results) {
    const int mode_order = r.mode == PromptMode::kMcPi ? 0 : 1;
    groups[{r.model_id, mode_order}].push_back(&r);
  }

  RunReport report;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const QuestionResult* a, const QuestionResult* b) {
                return a->question_id < b->question_id;
              });
    ReportCell cell;
    cell.model_id = key.first;
    cell.mode = key.second == 0 ? PromptMode::kMcPi : PromptMode::kMcNpi;
    cell.n_questions = members.size();

    std::vector<double> shares;
    for (const QuestionResult* r : members) {
      if (r->is_correct) ++cell.n_correct;
      if (!r->matched_letter) ++cell.n_unparsed;
      if (r->modality_score.a_shap) {
        shares.push_back(*r->modality_score.a_shap);
      } else {
        ++cell.n_flagged;
      }
    }
    const double n = static_cast<double>(cell.n_questions);
    cell.accuracy = static_cast<double>(cell.n_correct) / n;
    cell.unparsed_rate = static_cast<double>(cell.n_unparsed) / n;
    cell.n_defined = shares.size();
    if (!shares.empty()) {
      double sum = 0.0;
      for (double s : shares) sum += s;
      const double k = static_cast<double>(shares.size());
      const double mean = sum / k;
      cell.a_shap_mean = mean;
      if (shares.size() > 1) {
        double ss = 0.0;
        for (double s : shares) ss += (s - mean) * (s - mean);
        const double sd = std::sqrt(ss / (k - 1.0));
        cell.a_shap_half_width = 1.96 * sd / std::sqrt(k);
      }
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  return std::nullopt;
}

std::string FormatReport(const RunReport& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson: {
      nlohmann::json cells = nlohmann::json::array();
      for (const ReportCell& c : report.cells) {
        cells.push_back({{"model_id", c.model_id},
                         {"mode", PromptModeLabel(c.mode)},
                         {"n_questions", c.n_questions},
                         {"n_correct", c.n_correct},
                         {"n_unparsed", c.n_unparsed},
                         {"accuracy", c.accuracy},
                         {"unparsed_rate", c.unparsed_rate},
                         {"n_defined", c.n_defined},
                         {"n_flagged_undefined", c.n_flagged},
                         {"a_shap_mean", c.a_shap_mean ? nlohmann::json(*c.a_shap_mean)
                                                       : nlohmann::json(nullptr)},
                         {"a_shap_half_width", c.a_shap_half_width}});
      }
      nlohmann::json doc = {{"interval", kIntervalLabel}, {"cells", cells}};
      out << doc.dump(2) << "\n";
      break;
    }
    case ReportFormat::kCsv: {
      out << "model_id,mode,n_questions,n_correct,n_unparsed,accuracy,"
             "unparsed_rate,n_defined,n_flagged_undefined,a_shap_mean,"
             "a_shap_half_width\n";
      for (const ReportCell& c : report.cells) {
        out << c.model_id << "," << PromptModeLabel(c.mode) << "," << c.n_questions
            << "," << c.n_correct << "," << c.n_unparsed << ","
            << Precise(c.accuracy) << "," << Precise(c.unparsed_rate) << ","
            << c.n_defined << "," << c.n_flagged << ","
            << (c.a_shap_mean ? Precise(*c.a_shap_mean) : "") << ","
            << Precise(c.a_shap_half_width) << "\n";
      }
      break;
    }
    case ReportFormat::kMarkdown: {
      std::vector<std::string> models;
      for (const ReportCell& c : report.cells) {
        if (std::find(models.begin(), models.end(), c.model_id) == models.end()) {
          models.push_back(c.model_id);
        }
      }
      auto find = [&](const std::string& model, PromptMode mode) -> const ReportCell* {
        for (const ReportCell& c : report.cells) {
          if (c.model_id == model && c.mode == mode) return &c;
        }
        return nullptr;
      };
      auto accuracy = [](const ReportCell* c) {
        return c ? Fixed2(c->accuracy) : std::string("n/a");
      };
      auto share = [](const ReportCell* c) {
        if (!c || !c->a_shap_mean) return std::string("n/a");
        return Fixed2(*c->a_shap_mean) + " ± " + Fixed2(c->a_shap_half_width);
      };
      out << "| Model | Accuracy MC-PI | Accuracy MC-NPI | A-SHAP MC-PI | "
             "A-SHAP MC-NPI |\n";
      out << "|---|---|---|---|---|\n";
      for (const std::string& m : models) {
        const ReportCell* pi = find(m, PromptMode::kMcPi);
        const ReportCell* npi = find(m, PromptMode::kMcNpi);
        out << "| " << m << " | " << accuracy(pi) << " | " << accuracy(npi)
            << " | " << share(pi) << " | " << share(npi) << " |\n";
      }
      out << "\n" << kIntervalLabel << ".\n\n";
      out << "| Model | Mode | Questions | Correct | Unparsed | Undefined A-SHAP |\n";
      out << "|---|---|---|---|---|---|\n";
      for (const ReportCell& c : report.cells) {
        out << "| " << c.model_id << " | " << PromptModeLabel(c.mode) << " | "
            << c.n_questions << " | " << c.n_correct << " | " << c.n_unparsed
            << " | " << c.n_flagged << " |\n";
      }
      break;
    }
  }
  return out.str();
}

}  // namespace mmshap
