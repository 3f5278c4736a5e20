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

#include "cli.h"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmshap/corpus.h"
#include "mmshap/error.h"
#include "mmshap/plot.h"
#include "mmshap/report.h"
#include "mmshap/results_io.h"
#include "mmshap/runner.h"
#include "mmshap/stub_server.h"
#include "mmshap/conformance.h"
#include "mmshap/synthetic.h"
#include "mmshap/wire.h"

namespace mmshap::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSyntheticScheme = "synthetic:";

int ExitCodeFor(ErrorCode code) {
  if (IsUnreachable(code)) return kExitUnreachable;
  switch (code) {
    case ErrorCode::kSchemaError:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMissingExample:
    case ErrorCode::kMissingAttribution:
    case ErrorCode::kIoError:
    case ErrorCode::kEmptyMaskableSet:
    case ErrorCode::kExactTooLarge:
      return kExitConfig;
    default:
      return kExitFailure;
  }
}

struct EndpointArgs {
  std::string endpoint;
  double timeout_s = 60.0;
  std::string bearer_token;
  std::size_t max_in_flight = 4;
};

// Accepts an http(s) base URL or synthetic:<preset>.
std::shared_ptr<const ModelEndpoint> OpenEndpoint(const EndpointArgs& args) {
  if (args.endpoint.starts_with(kSyntheticScheme)) {
    const std::string preset = args.endpoint.substr(kSyntheticScheme.size());
    return std::make_shared<SyntheticEndpoint>(SyntheticPreset(preset));
  }
  WireOptions options;
  options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(args.timeout_s * 1000));
  options.bearer_token = args.bearer_token;
  options.max_in_flight = std::max<std::size_t>(1, args.max_in_flight);
  try {
    return HttpEndpoint::Connect(args.endpoint, options);
  } catch (const Error& e) {
    // A server that does not speak the protocol is as unusable as no server.
    if (e.code() == ErrorCode::kProtocolViolation) {
      throw Error(ErrorCode::kConnectFailed, std::string(e.what()));
    }
    throw;
  }
}

void AddEndpointOptions(CLI::App* cmd, EndpointArgs& args) {
  cmd->add_option("--endpoint", args.endpoint, "Model server base URL or synthetic:<preset>")
      ->required();
  cmd->add_option("--timeout", args.timeout_s, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bearer-token", args.bearer_token, "Bearer token sent to the model server")
      ->envname("MMSHAP_BEARER_TOKEN");
}

struct RunArgs {
  std::string dataset;
  std::string audio_root;
  EndpointArgs endpoint;
  std::string mode = "mc-npi";
  std::string estimator;
  int m = 10;
  std::uint64_t seed = 0;
  bool no_antithetic = false;
  std::string filter_source;
  std::string grep;
  double max_audio_seconds = 0.0;
  std::string out;
  std::size_t concurrency = 1;
  std::string template_path;
  bool collapse_tokens = false;
  bool no_attribution = false;
};

int DoRun(const RunArgs& args, CLI::App* cmd) {
  RunConfig config;
  const auto mode = ParsePromptMode(args.mode);
  if (!mode) throw Error(ErrorCode::kInvalidArgument, "unknown --mode " + args.mode);
  config.mode = *mode;
  if (!args.template_path.empty()) {
    config.prompt_template = LoadPromptTemplate(args.template_path);
  }
  if (!args.estimator.empty()) {
    if (args.estimator == "exact") {
      config.estimator.method = EstimatorMethod::kExact;
    } else if (args.estimator == "permutation") {
      config.estimator.method = EstimatorMethod::kPermutation;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown --estimator " + args.estimator);
    }
    config.estimator_explicit = true;
  }
  config.estimator.permutations = args.m;
  config.estimator.seed = args.seed;
  config.estimator.antithetic = !args.no_antithetic;
  if (cmd->count("--max-audio-seconds") > 0) config.max_audio_seconds = args.max_audio_seconds;
  config.concurrency = std::max<std::size_t>(1, args.concurrency);
  config.scoring.collapse_tokens = args.collapse_tokens;
  config.persist_attribution = !args.no_attribution;

  CorpusFilter filter;
  if (!args.filter_source.empty()) filter.source = args.filter_source;
  if (!args.grep.empty()) filter.grep = args.grep;
  const fs::path audio_root =
      args.audio_root.empty() ? fs::path(args.dataset).parent_path() : fs::path(args.audio_root);
  LoadedCorpus corpus = LoadCorpus(args.dataset, audio_root, filter);
  for (const std::string& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "corpus: " << corpus.questions.size() << " of " << corpus.total_records
            << " questions selected\n";

  EndpointArgs endpoint = args.endpoint;
  endpoint.max_in_flight = config.concurrency;
  const auto model = OpenEndpoint(endpoint);

  const RunOutcome outcome = RunCorpus(corpus.questions, *model, config, fs::path(args.out),
                                       [](const std::string& line) { std::cerr << line << "\n"; });
  std::cout << FormatReport(AggregateReport(outcome.results), ReportFormat::kMarkdown);
  std::cerr << "run: " << outcome.results.size() << " succeeded, " << outcome.failures.size()
            << " failed; results in " << args.out << "\n";
  if (outcome.failures.empty()) return kExitOk;
  bool all_unreachable = outcome.results.empty();
  for (const QuestionFailure& f : outcome.failures) {
    all_unreachable = all_unreachable && IsUnreachable(f.code);
  }
  return all_unreachable ? kExitUnreachable : kExitPartial;
}

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::string format = "md";
  std::string out;
};

int DoReport(const ReportArgs& args) {
  const auto format = ParseReportFormat(args.format);
  if (!format) throw Error(ErrorCode::kInvalidArgument, "unknown --format " + args.format);
  std::vector<QuestionResult> results;
  std::size_t dirs = 0;
  for (const std::string& root : args.run_dirs) {
    for (const fs::path& dir : FindRunDirectories(root)) {
      RunDirectory run = LoadRunDirectory(dir);
      for (QuestionResult& r : run.results) results.push_back(std::move(r));
      ++dirs;
    }
  }
  if (dirs == 0) throw Error(ErrorCode::kIoError, "no run directories found");
  const std::string text = FormatReport(AggregateReport(results), *format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    WriteTextFile(args.out, text);
  }
  return kExitOk;
}

struct PlotArgs {
  std::string run_dir;
  std::string question_id;
  std::string token = "auto";
  std::string out;
};

int DoPlot(const PlotArgs& args) {
  PlotOptions options;
  if (args.token != "auto") {
    std::size_t index = 0;
    const char* end = args.token.data() + args.token.size();
    const auto [ptr, ec] = std::from_chars(args.token.data(), end, index);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidArgument, "--token must be an index or auto");
    }
    options.token = index;
  }
  const fs::path file = QuestionResultPath(args.run_dir, args.question_id);
  if (!fs::exists(file)) {
    throw Error(ErrorCode::kIoError, "no result for question " + args.question_id + " in " +
                                         args.run_dir);
  }
  const QuestionResult result = QuestionResultFromJson(ReadTextFile(file));
  const fs::path out = args.out.empty()
                           ? fs::path(args.run_dir) / "plots" / (file.stem().string() + ".svg")
                           : fs::path(args.out);
  const PlotData data = EmitPlot(result, out, options);
  std::size_t highlighted = 0;
  for (const PlotToken& t : data.tokens) highlighted += t.highlight ? 1 : 0;
  std::cerr << "plot: token " << data.token_index << " \"" << data.token_text << "\", "
            << highlighted << " highlighted question tokens -> " << out.string() << "\n";
  return kExitOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8765;
  std::string kind = "balanced";
  std::string bearer_token;
};

int DoServe(const ServeArgs& args) {
  auto model = std::make_shared<SyntheticEndpoint>(SyntheticPreset(args.kind));
  StubServerOptions options;
  options.host = args.host;
  options.port = args.port;
  options.bearer_token = args.bearer_token;
  StubServer server(model, options);
  server.Run([&](const std::string& url) {
    std::cout << "serving " << model->Describe().model_id << " at " << url << std::endl;
  });
  return kExitOk;
}

int DoConformance(const EndpointArgs& args) {
  WireOptions options;
  options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(args.timeout_s * 1000));
  options.bearer_token = args.bearer_token;
  const ConformanceReport report = RunConformanceSuite(args.endpoint, options);
  std::cout << report.Summary();
  return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Modality attribution for audio language models"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Attribute every question of a corpus");
  run_cmd->add_option("--dataset", run.dataset, "Corpus JSON")->required();
  run_cmd->add_option("--audio-root", run.audio_root,
                      "Directory audio paths are relative to (default: the dataset's)");
  AddEndpointOptions(run_cmd, run.endpoint);
  run_cmd->add_option("--mode", run.mode, "mc-pi or mc-npi")->capture_default_str();
  run_cmd->add_option("--estimator", run.estimator,
                      "exact or permutation (default: exact when n <= 12, else permutation)");
  run_cmd->add_option("--m", run.m, "Sampled permutations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Run seed")->capture_default_str();
  run_cmd->add_flag("--no-antithetic", run.no_antithetic, "Do not walk reversed permutations");
  run_cmd->add_option("--filter-source", run.filter_source, "Keep questions from this source");
  run_cmd->add_option("--grep", run.grep, "Keep questions whose text contains this");
  run_cmd->add_option("--max-audio-seconds", run.max_audio_seconds, "Truncate clips")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out, "Run directory")->required();
  run_cmd->add_option("--concurrency", run.concurrency, "Questions and requests in flight")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--template", run.template_path, "Prompt template JSON");
  run_cmd->add_flag("--collapse-tokens", run.collapse_tokens,
                    "Attribute the summed answer logit instead of each token");
  run_cmd->add_flag("--no-attribution", run.no_attribution,
                    "Do not persist per-question attribution matrices");

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate persisted run directories");
  report_cmd->add_option("--run-dir", report.run_dirs, "Run directory or a parent of several")
      ->required();
  report_cmd->add_option("--format", report.format, "md, csv or json")->capture_default_str();
  report_cmd->add_option("--out", report.out, "Write to this file instead of stdout");

  PlotArgs plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render one question's attribution");
  plot_cmd->add_option("--run-dir", plot.run_dir, "Run directory")->required();
  plot_cmd->add_option("--question-id", plot.question_id, "Question id")->required();
  plot_cmd->add_option("--token", plot.token, "Answer token index or auto")
      ->capture_default_str();
  plot_cmd->add_option("--out", plot.out, "SVG path (sidecar JSON is written next to it)");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the synthetic-oracle checks");

  ServeArgs serve;
  CLI::App* serve_cmd =
      app.add_subcommand("serve-stub", "Serve a synthetic model over the /v1 protocol");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
  serve_cmd->add_option("--kind", serve.kind,
                        "additive, balanced, dummy_audio, dummy_text, interaction or constant")
      ->capture_default_str();
  serve_cmd->add_option("--bearer-token", serve.bearer_token, "Require this bearer token");

  EndpointArgs conformance;
  CLI::App* conformance_cmd =
      app.add_subcommand("conformance", "Check a /v1 server against the protocol");
  AddEndpointOptions(conformance_cmd, conformance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return DoRun(run, run_cmd);
    if (*report_cmd) return DoReport(report);
    if (*plot_cmd) return DoPlot(plot);
    if (*selftest_cmd) return RunSelftest(std::cout);
    if (*serve_cmd) return DoServe(serve);
    if (*conformance_cmd) return DoConformance(conformance);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace mmshap::cli
