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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below. Criteria that go through the command line drive the real binary.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmshap/audio.h"
#include "mmshap/conformance.h"
#include "mmshap/masking.h"
#include "mmshap/metrics.h"
#include "mmshap/plot.h"
#include "mmshap/report.h"
#include "mmshap/results_io.h"
#include "mmshap/shapley.h"
#include "test_util.h"

namespace mmshap {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing_util::BruteForceShapley;
using testing_util::TempDir;
using testing_util::ToneClip;

constexpr double kAxiomTol = 1e-9;
constexpr double kPermutationMae = 0.02;
constexpr int kPermutationM = 1000;
constexpr double kRuntimeBudgetS = 60.0;
constexpr int kConvergenceSeeds = 30;
constexpr double kBalancedTol = 1e-9;
constexpr double kShareSumTol = 1e-15;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void Require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

// ---------------------------------------------------------------------------
// Random games over subset masks.

struct Term {
  std::vector<std::size_t> members;  // bonus applies when all are present
  double bonus;
};

struct TableGame {
  std::size_t n = 0;
  std::vector<double> weights;
  std::vector<Term> terms;
  std::vector<std::size_t> dummies;
  std::pair<std::size_t, std::size_t> symmetric{0, 1};

  double Value(std::uint64_t mask) const {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1) v += weights[j];
    }
    for (const Term& t : terms) {
      bool all = true;
      for (std::size_t j : t.members) all = all && (mask >> j & 1);
      if (all) v += t.bonus;
    }
    return v;
  }
  double Value(const std::vector<bool>& present) const {
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < present.size(); ++j) m |= std::uint64_t{present[j]} << j;
    return Value(m);
  }
  FunctionGame AsGame() const {
    return FunctionGame(1, [this](const Coalition& s) {
      return std::vector<double>{Value(testing_util::ToMask(s))};
    });
  }
};

// Features 0 and 1 are interchangeable; the last feature is a dummy when
// n >= 4. kind 0 is additive, 1 adds pair terms, 2 adds triples as well.
TableGame RandomGame(std::mt19937_64& rng, std::size_t n, int kind) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TableGame g;
  g.n = n;
  g.weights.resize(n);
  for (double& w : g.weights) w = u(rng);
  g.weights[1] = g.weights[0];
  const std::size_t live = n >= 4 ? n - 1 : n;
  if (n >= 4) {
    g.weights[n - 1] = 0.0;
    g.dummies.push_back(n - 1);
  }
  if (kind >= 1 && live >= 2) {
    g.terms.push_back({{0, 1}, u(rng)});
    if (live >= 3) {
      const double c = u(rng);
      g.terms.push_back({{0, 2}, c});
      g.terms.push_back({{1, 2}, c});
    }
    for (int k = 0; k < 3 && live > 3; ++k) {
      const std::size_t a = 2 + rng() % (live - 2), b = 2 + rng() % (live - 2);
      if (a != b) g.terms.push_back({{a, b}, u(rng)});
    }
  }
  if (kind >= 2 && live >= 5) {
    for (int k = 0; k < 2; ++k) {
      std::vector<std::size_t> pool;
      for (std::size_t j = 2; j < live; ++j) pool.push_back(j);
      std::shuffle(pool.begin(), pool.end(), rng);
      g.terms.push_back({{pool[0], pool[1], pool[2]}, u(rng)});
    }
  }
  return g;
}

double Mae(const ShapleyValues& a, const ShapleyValues& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s / static_cast<double>(a.values.size());
}

Verdict ShapleyOracleEquivalence() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst_axiom = 0.0, worst_mae = 0.0, sum_mae = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 11;  // 2..12
    const TableGame g = RandomGame(rng, n, trial % 3);
    const FunctionGame game = g.AsGame();
    const ShapleyValues exact = ExactShapley(game, n);

    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += exact.at(j, 0);
    worst_axiom = std::max(worst_axiom,
                           std::abs(sum - (g.Value(std::uint64_t{(1u << n) - 1}) - g.Value(0))));
    worst_axiom = std::max(worst_axiom,
                           std::abs(exact.at(g.symmetric.first, 0) - exact.at(g.symmetric.second, 0)));
    for (std::size_t d : g.dummies) worst_axiom = std::max(worst_axiom, std::abs(exact.at(d, 0)));

    // Additivity: phi(v + w) against phi(v) + phi(w) for a second game.
    const TableGame h = RandomGame(rng, n, 2);
    FunctionGame sum_game(1, [&](const Coalition& s) {
      const auto p = testing_util::ToMask(s);
      return std::vector<double>{g.Value(p) + h.Value(p)};
    });
    const ShapleyValues phi_sum = ExactShapley(sum_game, n);
    const ShapleyValues phi_h = ExactShapley(h.AsGame(), n);
    for (std::size_t j = 0; j < n; ++j) {
      worst_axiom = std::max(worst_axiom,
                             std::abs(phi_sum.at(j, 0) - (exact.at(j, 0) + phi_h.at(j, 0))));
    }

    // Independent oracle on small games: average over all n! orderings.
    if (n <= 7) {
      const auto oracle =
          BruteForceShapley(n, [&](const std::vector<bool>& p) { return g.Value(p); });
      for (std::size_t j = 0; j < n; ++j) {
        worst_axiom = std::max(worst_axiom, std::abs(oracle[j] - exact.at(j, 0)));
      }
    }

    EstimatorConfig cfg;
    cfg.permutations = kPermutationM;
    cfg.seed = 1000 + trial;
    const double mae = Mae(PermutationShapley(game, n, cfg), exact);
    worst_mae = std::max(worst_mae, mae);
    sum_mae += mae;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.Require(worst_axiom <= kAxiomTol, "axiom residual above tolerance");
  v.Require(worst_mae <= kPermutationMae, "permutation MAE above tolerance");
  v.Require(elapsed < kRuntimeBudgetS, "runtime over budget");
  v.detail << (v.pass ? "" : "; ") << "worst axiom residual " << worst_axiom
           << " (tol " << kAxiomTol << "), permutation m=" << kPermutationM
           << " worst per-game MAE " << worst_mae << ", mean " << sum_mae / 50 << " (tol "
           << kPermutationMae << "), " << elapsed << " s";
  return v;
}

// n = 10 game with pair and triple interactions.
TableGame ConvergenceGame() {
  TableGame g;
  g.n = 10;
  g.weights = {0.3, -0.2, 0.5, 0.1, 0.0, -0.4, 0.2, 0.6, -0.1, 0.25};
  g.terms = {{{0, 5}, 1.0},     {{1, 6}, -0.8},   {{2, 7}, 0.6},     {{3, 8}, 0.9},
             {{4, 9}, -0.5},    {{0, 1, 2}, 1.2}, {{3, 4, 5}, -0.9}, {{6, 7, 8}, 0.7},
             {{1, 4, 9}, 0.8}, {{0, 3, 7, 9}, 1.1}};
  return g;
}

Verdict ConvergenceTrend() {
  Verdict v;
  const TableGame g = ConvergenceGame();
  const FunctionGame game = g.AsGame();
  const ShapleyValues exact = ExactShapley(game, g.n);
  std::vector<double> err;
  for (bool antithetic : {true, false}) {
    std::vector<double> mean_err;
    for (int m : {1, 10, 100, 1000}) {
      double total = 0.0;
      for (int seed = 0; seed < kConvergenceSeeds; ++seed) {
        EstimatorConfig cfg;
        cfg.permutations = m;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.antithetic = antithetic;
        total += Mae(PermutationShapley(game, g.n, cfg), exact);
      }
      mean_err.push_back(total / kConvergenceSeeds);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < mean_err.size(); ++i) monotone = monotone && mean_err[i] <= mean_err[i - 1];
    v.Require(monotone, std::string(antithetic ? "antithetic" : "plain") + " error increased");
    v.detail << (antithetic ? "antithetic" : "plain") << " mean MAE over " << kConvergenceSeeds
             << " seeds at m=1,10,100,1000:";
    for (double e : mean_err) v.detail << " " << e;
    v.detail << (antithetic ? "; " : "");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Command-line helpers.

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult Cli(const std::string& args) {
  const std::string cmd = std::string(MMSHAP_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Three questions with different rates, encodings and channel counts.
fs::path WriteCorpus(const fs::path& dir) {
  WriteWav(dir / "a.wav", ToneClip(2 * 22050, 22050), WavEncoding::kPcm16);
  WriteWav(dir / "b.wav", ToneClip(48000, 48000), WavEncoding::kFloat32);
  WriteWav(dir / "c.wav", ToneClip(16000 * 3 / 2, 16000), WavEncoding::kPcm16);
  json qs = json::array();
  const std::vector<std::pair<std::string, std::string>> items = {
      {"a.wav", "Which sound can be heard at the door?"},
      {"b.wav", "What instrument plays the melody?"},
      {"c.wav", "Is the recording indoors or outdoors?"}};
  for (std::size_t i = 0; i < items.size(); ++i) {
    qs.push_back({{"id", "q" + std::to_string(i)},
                  {"audio", items[i].first},
                  {"question", items[i].second},
                  {"options",
                   {{{"letter", "A"}, {"text", "Siren"}},
                    {{"letter", "B"}, {"text", "Doorbell"}},
                    {{"letter", "C"}, {"text", "Piano"}},
                    {{"letter", "D"}, {"text", "Thunder"}}}},
                  {"answer", i == 1 ? "C" : "B"},
                  {"category", nullptr},
                  {"source", "MusicCaps"}});
  }
  WriteTextFile(dir / "corpus.json", json{{"questions", qs}}.dump(1));
  return dir / "corpus.json";
}

Verdict EndToEndModalityOracle() {
  Verdict v;
  TempDir dir("acc_e2e");
  const fs::path corpus = WriteCorpus(dir.path());
  struct Case {
    std::string preset, mode;
    double expected, tol;
  };
  const std::vector<Case> cases = {{"dummy_audio", "mc-npi", 0.0, 0.0},
                                   {"dummy_text", "mc-npi", 1.0, 0.0},
                                   {"balanced", "mc-npi", 0.5, kBalancedTol},
                                   {"dummy_audio", "mc-pi", 0.0, 0.0},
                                   {"dummy_text", "mc-pi", 1.0, 0.0},
                                   {"balanced", "mc-pi", 0.5, kBalancedTol}};
  for (const Case& c : cases) {
    const fs::path out = dir.path() / (c.preset + "_" + c.mode);
    const CliResult r = Cli("run --dataset " + Quote(corpus) + " --endpoint synthetic:" +
                            c.preset + " --mode " + c.mode + " --out " + Quote(out));
    v.Require(r.code == 0, c.preset + "/" + c.mode + " exit " + std::to_string(r.code));
    if (r.code != 0) continue;
    const RunDirectory run = LoadRunDirectory(out);
    v.Require(run.results.size() == 3, c.preset + " result count");
    double worst = 0.0;
    for (const QuestionResult& q : run.results) {
      if (!q.modality_score.a_shap) {
        v.Require(false, c.preset + " undefined A-SHAP");
        continue;
      }
      worst = std::max(worst, std::abs(*q.modality_score.a_shap - c.expected));
      const FeaturePartition& p = q.attribution->partition;
      if (c.preset == "balanced") v.Require(p.n_audio == p.n_text, "n_A != n_T");
    }
    v.Require(worst <= c.tol, c.preset + "/" + c.mode + " deviates by " + std::to_string(worst));
    v.detail << (v.pass ? "" : " ") << c.preset << "/" << c.mode << " max |A-SHAP - "
             << c.expected << "| = " << worst << "; ";
  }
  return v;
}

Verdict WindowingCheck() {
  Verdict v;
  struct Row {
    std::size_t len, n_text, count, body, last;
  };
  // Expected lengths from floor(len / count) with the remainder in the last.
  const std::vector<Row> table = {
      {240000, 100, 100, 2400, 2400}, {48000, 20, 20, 2400, 2400}, {1003, 10, 10, 100, 103},
      {1000, 1, 1, 1000, 1000},       {3, 5, 3, 1, 1},             {240007, 100, 100, 2400, 2407}};
  for (const Row& r : table) {
    const auto w = PlanAudioWindows(r.len, r.n_text);
    bool ok = w.size() == r.count && w.back().size() == r.last && w.back().end == r.len;
    for (std::size_t i = 0; ok && i + 1 < w.size(); ++i) {
      ok = w[i].size() == r.body && w[i].begin == i * r.body && w[i + 1].begin == w[i].end;
    }
    v.Require(ok, "plan(" + std::to_string(r.len) + ", " + std::to_string(r.n_text) + ")");
  }
  // Through the partition builder: 10 s at 24 kHz, 100 maskable tokens.
  std::vector<Token> tokens = {{1, "<|user|>"}, {2, "<audio>"}, {3, "#Audio"}};
  for (int i = 0; i < 100; ++i) tokens.push_back({100 + i, "w" + std::to_string(i)});
  const TokenizedPrompt prompt =
      MakeTokenizedPrompt(tokens, {1, tokens.size()}, {0, 0}, DefaultProtectedSurfaces());
  const AudioClip clip = ToneClip(240000, 24000);
  const FeaturePartition p = BuildPartition(clip, prompt, MaskPolicy{});
  v.Require(p.n_audio == 100 && p.n_text == 100, "partition sizes");
  double min_ms = 1e9, max_ms = 0.0;
  for (const Span& s : p.audio_windows) {
    const double ms = 1000.0 * static_cast<double>(s.size()) / clip.sample_rate_hz;
    min_ms = std::min(min_ms, ms);
    max_ms = std::max(max_ms, ms);
  }
  v.Require(min_ms == 100.0 && max_ms == 100.0, "window duration");
  v.detail << (v.pass ? "" : "; ") << table.size() << " table rows; 10 s clip at 24 kHz -> "
           << p.n_audio << " windows of " << min_ms << "-" << max_ms << " ms";
  return v;
}

AttributionMatrix Matrix(std::size_t na, std::size_t nt, std::size_t tokens,
                         std::vector<double> values) {
  AttributionMatrix a;
  a.partition.n_audio = na;
  a.partition.n_text = nt;
  a.shapley.feature_count = na + nt;
  a.shapley.token_count = tokens;
  a.shapley.values = std::move(values);
  return a;
}

Verdict ModalityUnitSuite() {
  Verdict v;
  struct Hand {
    AttributionMatrix m;
    double pa, pt, a;
  };
  const std::vector<Hand> hand = {
      {Matrix(2, 2, 1, {0, 0, 0.5, -1.5}), 0.0, 2.0, 0.0},
      {Matrix(1, 2, 2, {0.5, -0.5, 1.0, 1.0, -0.5, 0.5}), 1.0, 3.0, 0.25},
      {Matrix(2, 1, 1, {0.5, -0.5, 1.0}), 1.0, 1.0, 0.5},
      {Matrix(2, 2, 2, {-1, -1, 1, 1, 0.25, -0.25, -0.25, 0.25}), 4.0, 1.0, 0.8}};
  for (std::size_t i = 0; i < hand.size(); ++i) {
    const ModalityScore s = ModalityContribution(hand[i].m);
    const bool ok = s.phi_audio == hand[i].pa && s.phi_text == hand[i].pt &&
                    s.a_shap == hand[i].a && s.t_shap == 1.0 - hand[i].a;
    v.Require(ok, "hand matrix " + std::to_string(i));
  }
  v.Require(!ModalityContribution(Matrix(1, 1, 1, {0, 0})).defined(), "all-zero not undefined");

  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double worst = 0.0, worst_phi = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t na = 1 + rng() % 8, nt = 1 + rng() % 8, tokens = 1 + rng() % 5;
    std::vector<double> vals((na + nt) * tokens);
    for (double& x : vals) x = g(rng);
    const ModalityScore s = ModalityContribution(Matrix(na, nt, tokens, vals));
    double pa = 0.0, pt = 0.0;
    for (std::size_t j = 0; j < na + nt; ++j) {
      for (std::size_t t = 0; t < tokens; ++t) (j < na ? pa : pt) += std::abs(vals[j * tokens + t]);
    }
    worst_phi = std::max({worst_phi, std::abs(s.phi_audio - pa), std::abs(s.phi_text - pt)});
    worst = std::max(worst, std::abs(*s.a_shap + *s.t_shap - 1.0));
  }
  v.Require(worst <= kShareSumTol, "a_shap + t_shap != 1");
  v.Require(worst_phi <= 1e-12, "phi mass disagrees with recount");
  v.detail << (v.pass ? "" : "; ") << hand.size() << " hand matrices exact; 1000 random: max |a+t-1| = "
           << worst << ", max phi recount residual " << worst_phi;
  return v;
}

// Runs `mmshap serve-stub --port 0` and returns its URL and pid.
std::pair<std::string, pid_t> SpawnStub() {
  int fds[2];
  if (pipe(fds) != 0) return {"", -1};
  const pid_t pid = fork();
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl(MMSHAP_CLI_PATH, MMSHAP_CLI_PATH, "serve-stub", "--port", "0", "--kind", "interaction",
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  std::string line;
  char c;
  while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
  close(fds[0]);
  const auto at = line.rfind(" at ");
  return {at == std::string::npos ? "" : line.substr(at + 4), pid};
}

Verdict ProtocolConformance() {
  Verdict v;
  const auto [url, pid] = SpawnStub();
  v.Require(!url.empty(), "serve-stub did not report a URL");
  if (!url.empty()) {
    const ConformanceReport report = RunConformanceSuite(url);
    v.Require(report.passed(), "suite failed");
    std::size_t passed = 0;
    for (const auto& c : report.checks) passed += c.passed;
    v.detail << (v.pass ? "" : ": ") << passed << "/" << report.checks.size()
             << " checks passed against " << url;
    if (!report.passed()) v.detail << "\n" << report.Summary();
  }
  if (pid > 0) {
    kill(pid, SIGTERM);
    waitpid(pid, nullptr, 0);
  }
  return v;
}

Verdict ReportShape() {
  Verdict v;
  TempDir dir("acc_report");
  const fs::path corpus = WriteCorpus(dir.path());
  for (const char* preset : {"additive", "interaction"}) {
    for (const char* mode : {"mc-pi", "mc-npi"}) {
      const fs::path out = dir.path() / "runs" / (std::string(preset) + "_" + mode);
      const CliResult r = Cli("run --dataset " + Quote(corpus) + " --endpoint synthetic:" +
                              preset + " --mode " + mode + " --seed 7 --out " + Quote(out));
      v.Require(r.code == 0, std::string("run ") + preset + " " + mode);
    }
  }
  const fs::path runs = dir.path() / "runs";
  const CliResult md = Cli("report --run-dir " + Quote(runs) + " --format md");
  const CliResult md2 = Cli("report --run-dir " + Quote(runs) + " --format md");
  v.Require(md.code == 0, "report exit");
  v.Require(md.out == md2.out, "report not reproducible");

  // Shape: header, separator, one row per model with five cells.
  std::vector<std::string> lines;
  std::istringstream in(md.out);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  v.Require(lines.size() >= 4 &&
                lines[0] == "| Model | Accuracy MC-PI | Accuracy MC-NPI | A-SHAP MC-PI | "
                            "A-SHAP MC-NPI |",
            "header row");
  for (std::size_t i = 2; i < 4 && i < lines.size(); ++i) {
    const auto cells = std::count(lines[i].begin(), lines[i].end(), '|');
    v.Require(cells == 6, "row " + std::to_string(i) + " has " + std::to_string(cells - 1) + " cells");
    v.Require(std::count(lines[i].begin(), lines[i].end(), '\xb1') == 2, "row lacks two ± cells");
  }
  v.Require(lines.size() >= 4 && lines[2].rfind("| synthetic-additive |", 0) == 0 &&
                lines[3].rfind("| synthetic-interaction |", 0) == 0,
            "model rows");

  // Recompute from the persisted per-question files.
  std::vector<QuestionResult> all;
  for (const fs::path& d : FindRunDirectories(runs)) {
    RunDirectory run = LoadRunDirectory(d);
    const RunReport one = AggregateReport(run.results);
    v.Require(ReadTextFile(d / "summary.json") == FormatReport(one, ReportFormat::kJson),
              "summary.json differs for " + d.filename().string());
    for (auto& r : run.results) all.push_back(std::move(r));
  }
  v.Require(FormatReport(AggregateReport(all), ReportFormat::kMarkdown) == md.out,
            "recomputed markdown differs");
  const CliResult csv = Cli("report --run-dir " + Quote(runs) + " --format csv");
  v.Require(FormatReport(AggregateReport(all), ReportFormat::kCsv) == csv.out,
            "recomputed csv differs");

  // Independent recount from raw question files.
  std::map<std::string, std::pair<int, int>> recount;
  for (const auto& e : fs::recursive_directory_iterator(runs)) {
    if (e.path().parent_path().filename() != "questions") continue;
    const json q = json::parse(ReadTextFile(e.path()));
    auto& [n, k] = recount[q["model_id"].get<std::string>() + "," +
                           (q["mode"] == "mc-pi" ? "MC-PI" : "MC-NPI")];
    ++n;
    k += q["is_correct"].get<bool>();
  }
  std::istringstream csv_in(csv.out);
  std::string row;
  std::getline(csv_in, row);
  std::size_t rows = 0;
  while (std::getline(csv_in, row)) {
    std::vector<std::string> f;
    std::stringstream ss(row);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    const auto& [n, k] = recount[f[0] + "," + f[1]];
    v.Require(std::stoi(f[2]) == n && std::stoi(f[3]) == k &&
                  std::stod(f[5]) == static_cast<double>(k) / n,
              "accuracy recount for " + f[0] + " " + f[1]);
    ++rows;
  }
  v.Require(rows == 4, "csv has " + std::to_string(rows) + " cells");
  v.detail << (v.pass ? "" : "; ") << "2 models x {MC-PI, MC-NPI}; markdown, csv and each "
           << "summary.json reproduced bit-for-bit from persisted files";
  return v;
}

Verdict PlotRule() {
  Verdict v;
  TempDir dir("acc_plot");
  // Crafted matrix: 4 windows, 6 text tokens, 2 answer tokens; token 1
  // dominates. Text |phi| for token 1 relative to its max: 1, 0.79, 0.8,
  // 0.95, 0.5, 0.
  const std::vector<double> audio_t1 = {0.6, -1.2, 0.0, 0.3};
  const std::vector<double> text_t1 = {-2.0, 1.58, 1.6, -1.9, 1.0, 0.0};
  QuestionResult r;
  r.question_id = "crafted";
  r.model_id = "m";
  r.correct_letter = "B";
  r.answer_tokens = {"(B)", "Doorbell"};
  AttributionMatrix a;
  a.partition.n_audio = 4;
  a.partition.n_text = 6;
  for (std::size_t i = 0; i < 4; ++i) a.partition.audio_windows.push_back({i * 100, i * 100 + 100});
  for (std::size_t i = 0; i < 6; ++i) {
    a.partition.text_positions.push_back(10 + i);
    r.text_feature_surfaces.push_back("tok" + std::to_string(i));
  }
  a.shapley.feature_count = 10;
  a.shapley.token_count = 2;
  for (double x : audio_t1) a.shapley.values.insert(a.shapley.values.end(), {0.01, x});
  for (double x : text_t1) a.shapley.values.insert(a.shapley.values.end(), {0.02, x});
  a.shapley.full_value = {0, 0};
  a.shapley.empty_value = {0, 0};
  r.attribution = a;
  r.modality_score = ModalityContribution(a);
  r.audio_samples = 400;
  r.sample_rate_hz = 16000;
  const fs::path run = dir.path() / "run";
  WriteTextFile(run / "run.json", "{}");
  SaveQuestionResult(run, r);

  const fs::path svg = dir.path() / "crafted.svg";
  const CliResult c = Cli("plot --run-dir " + Quote(run) + " --question-id crafted --token auto --out " +
                          Quote(svg));
  v.Require(c.code == 0, "plot exit " + std::to_string(c.code));
  if (c.code != 0) return v;
  const json side = json::parse(ReadTextFile(svg.string() + ".json"));
  v.Require(side["token_index"] == 1, "dominant token not selected");

  double peak = 0.0;
  for (double x : text_t1) peak = std::max(peak, std::abs(x));
  std::vector<bool> expect, got;
  for (std::size_t i = 0; i < text_t1.size(); ++i) {
    expect.push_back(std::abs(text_t1[i]) >= 0.8 * peak);
    got.push_back(side["tokens"][i]["highlight"].get<bool>());
  }
  v.Require(got == expect, "highlight set");

  const std::map<std::string, std::function<double(double)>> strips = {
      {"absolute", [](double x) { return std::abs(x); }},
      {"positive", [](double x) { return std::max(x, 0.0); }},
      {"negative", [](double x) { return std::min(x, 0.0); }}};
  const std::string text = ReadTextFile(svg);
  for (const auto& [name, fn] : strips) {
    const auto values = side["strips"][name]["values"].get<std::vector<double>>();
    std::vector<double> want;
    for (double x : audio_t1) want.push_back(fn(x));
    v.Require(values == want, name + " strip values");
    v.Require(text.find("data-name=\"" + name + "\"") != std::string::npos, name + " strip in SVG");
  }
  std::size_t n_hi = 0;
  for (bool b : got) n_hi += b;
  v.detail << (v.pass ? "" : "; ") << n_hi << " of 6 tokens highlighted (0.79 excluded, 0.80 "
           << "included); absolute/positive/negative strips match |phi|, max(phi,0), min(phi,0)";
  return v;
}

}  // namespace
}  // namespace mmshap

int main() {
  using mmshap::Verdict;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"shapley_oracle_equivalence", mmshap::ShapleyOracleEquivalence},
      {"convergence_trend", mmshap::ConvergenceTrend},
      {"end_to_end_modality_oracle", mmshap::EndToEndModalityOracle},
      {"windowing_check", mmshap::WindowingCheck},
      {"modality_unit_suite", mmshap::ModalityUnitSuite},
      {"protocol_conformance", mmshap::ProtocolConformance},
      {"report_shape", mmshap::ReportShape},
      {"plot_rule", mmshap::PlotRule},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first
              << ": " << v.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " acceptance criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
