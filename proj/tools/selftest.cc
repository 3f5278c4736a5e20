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

#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cli.h"
#include "mmshap/conformance.h"
#include "mmshap/runner.h"
#include "mmshap/shapley.h"
#include "mmshap/stub_server.h"
#include "mmshap/synthetic.h"

namespace mmshap::cli {
namespace {

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string = pass
};

// Additive weights plus pairwise bonuses; includes one dummy feature.
FunctionGame RandomGame(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(n);
  for (double& x : w) x = u(rng);
  w[n - 1] = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k + 2 < n; k += 2) pairs.emplace_back(k, k + 1);
  const double bonus = u(rng);
  return FunctionGame(2, [w, pairs, bonus](const Coalition& s) {
    double v = 0.0;
    for (std::size_t j : s.members()) v += w[j];
    for (auto [a, b] : pairs) v += (s.contains(a) && s.contains(b)) ? bonus : 0.0;
    return std::vector<double>{v, 2.0 * v + 1.0};
  });
}

std::string CheckExactAxioms() {
  std::mt19937_64 rng(7);
  for (std::size_t n = 3; n <= 10; ++n) {
    FunctionGame game = RandomGame(n, rng);
    const ShapleyValues phi = ExactShapley(game, n);
    for (std::size_t t = 0; t < 2; ++t) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += phi.at(j, t);
      const double total = phi.full_value[t] - phi.empty_value[t];
      if (std::abs(sum - total) > 1e-9) return "efficiency off at n=" + std::to_string(n);
      if (std::abs(phi.at(n - 1, t)) > 1e-9) return "dummy nonzero at n=" + std::to_string(n);
    }
  }
  return "";
}

std::string CheckPermutationAgreement() {
  std::mt19937_64 rng(11);
  const std::size_t n = 8;
  FunctionGame game = RandomGame(n, rng);
  const ShapleyValues exact = ExactShapley(game, n);
  EstimatorConfig cfg;
  cfg.permutations = 1000;
  cfg.seed = 3;
  const ShapleyValues approx = PermutationShapley(game, n, cfg);
  double mae = 0.0;
  for (std::size_t i = 0; i < exact.values.size(); ++i) {
    mae += std::abs(exact.values[i] - approx.values[i]);
  }
  mae /= static_cast<double>(exact.values.size());
  return mae <= 0.02 ? "" : "mean absolute error " + std::to_string(mae);
}

std::string CheckModality(const std::string& preset, double expected, double tol) {
  SyntheticEndpoint model(SyntheticPreset(preset));
  McQuestion q;
  q.question_id = "selftest";
  q.question_text = "Which sound is heard at the door?";
  q.options = {{"A", "Siren"}, {"B", "Doorbell"}, {"C", "Dog"}, {"D", "Rain"}};
  q.correct_letter = "B";
  AudioClip clip;
  clip.sample_rate_hz = 16000;
  clip.samples.resize(8000);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = 0.25f + 0.5f * static_cast<float>(std::sin(0.17 * static_cast<double>(i)));
  }
  RunConfig config;
  config.estimator.permutations = 4;
  const QuestionResult r = RunQuestion(q, clip, model, config);
  if (!r.modality_score.a_shap) return "A-SHAP undefined";
  const double got = *r.modality_score.a_shap;
  if (std::abs(got - expected) > tol) return "A-SHAP " + std::to_string(got);
  return "";
}

std::string CheckStubConformance() {
  auto model = std::make_shared<SyntheticEndpoint>(SyntheticPreset("balanced"));
  StubServer server(model);
  server.Start();
  const ConformanceReport report = RunConformanceSuite(server.url());
  server.Stop();
  if (report.passed()) return "";
  return "\n" + report.Summary();
}

}  // namespace

int RunSelftest(std::ostream& out) {
  const std::vector<Check> checks = {
      {"exact_axioms", CheckExactAxioms},
      {"permutation_matches_exact", CheckPermutationAgreement},
      {"dummy_audio_a_shap_0", [] { return CheckModality("dummy_audio", 0.0, 0.0); }},
      {"dummy_text_a_shap_1", [] { return CheckModality("dummy_text", 1.0, 0.0); }},
      {"balanced_a_shap_half", [] { return CheckModality("balanced", 0.5, 1e-9); }},
      {"stub_conformance", CheckStubConformance},
  };
  int failed = 0;
  for (const Check& c : checks) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    const bool ok = detail.empty();
    failed += ok ? 0 : 1;
    out << (ok ? "PASS " : "FAIL ") << c.name << (ok ? "" : ": " + detail) << "\n";
  }
  out << (failed == 0 ? "selftest passed" : "selftest failed") << "\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace mmshap::cli
