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

// Per-question attribution plot: question tokens highlighted by |phi| and
// three waveform strips (absolute, positive, negative) for one answer token.

#ifndef MMSHAP_PLOT_H_
#define MMSHAP_PLOT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmshap/runner.h"

namespace mmshap {

struct PlotOptions {
  // Answer token to plot; empty picks the token with the largest
  // sum over features of |phi|.
  std::optional<std::size_t> token;
  // Tokens with |phi| >= highlight_fraction * max |phi| are highlighted.
  double highlight_fraction = 0.8;
};

struct PlotToken {
  std::size_t position = 0;  // prompt position
  std::string text;
  double value = 0.0;          // phi for the selected answer token
  double total_abs = 0.0;      // sum over answer tokens of |phi|
  double intensity = 0.0;      // |value| / max |value|, in [0, 1]
  bool highlight = false;
};

struct PlotStrip {
  std::string name;             // "absolute", "positive" or "negative"
  std::vector<double> values;   // per audio window
  std::vector<double> intensity;  // |value| / max |value| within the strip
};

struct PlotData {
  std::string question_id;
  std::size_t token_index = 0;
  std::string token_text;
  std::vector<PlotToken> tokens;
  std::vector<Span> windows;
  std::size_t audio_samples = 0;
  int sample_rate_hz = 0;
  PlotStrip absolute;
  PlotStrip positive;
  PlotStrip negative;
};

// Throws kMissingAttribution when the result carries no matrix and
// kInvalidArgument for an out-of-range token.
PlotData BuildPlotData(const QuestionResult& result, const PlotOptions& options = {});

std::string RenderPlotSvg(const PlotData& data);
std::string PlotDataToJson(const PlotData& data);

// Writes the SVG to `output_path` and the sidecar JSON next to it
// (`output_path` + ".json").
PlotData EmitPlot(const QuestionResult& result, const std::filesystem::path& output_path,
                  const PlotOptions& options = {});

}  // namespace mmshap

#endif  // MMSHAP_PLOT_H_
