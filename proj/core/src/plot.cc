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

#include "mmshap/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mmshap/error.h"
#include "mmshap/results_io.h"

namespace mmshap {
namespace {

constexpr double kWidth = 960.0;
constexpr double kMargin = 20.0;
constexpr double kCharWidth = 7.2;
constexpr double kTokenHeight = 20.0;
constexpr double kStripHeight = 36.0;

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Rgb(double r, double g, double b) {
  char buf[32];
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255)); };
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", c(r), c(g), c(b));
  return buf;
}

void Normalize(PlotStrip& strip) {
  double peak = 0.0;
  for (double v : strip.values) peak = std::max(peak, std::abs(v));
  strip.intensity.assign(strip.values.size(), 0.0);
  if (peak == 0.0) return;
  for (std::size_t i = 0; i < strip.values.size(); ++i) {
    strip.intensity[i] = std::abs(strip.values[i]) / peak;
  }
}

}  // namespace

PlotData BuildPlotData(const QuestionResult& result, const PlotOptions& options) {
  if (!result.attribution) {
    throw Error(ErrorCode::kMissingAttribution,
                "question " + result.question_id + " has no persisted attribution");
  }
  const AttributionMatrix& a = *result.attribution;
  const FeaturePartition& p = a.partition;
  const std::size_t tokens = a.token_count();

  PlotData data;
  data.question_id = result.question_id;
  data.windows = p.audio_windows;
  data.audio_samples = result.audio_samples;
  data.sample_rate_hz = result.sample_rate_hz;

  if (options.token) {
    if (*options.token >= tokens) {
      throw Error(ErrorCode::kInvalidArgument,
                  "answer token " + std::to_string(*options.token) + " out of range (" +
                      std::to_string(tokens) + " tokens)");
    }
    data.token_index = *options.token;
  } else {
    double best = -1.0;
    for (std::size_t t = 0; t < tokens; ++t) {
      double mass = 0.0;
      for (std::size_t j = 0; j < a.feature_count(); ++j) mass += std::abs(a.at(j, t));
      if (mass > best) {
        best = mass;
        data.token_index = t;
      }
    }
  }
  const std::size_t t = data.token_index;
  if (t < result.answer_tokens.size()) data.token_text = result.answer_tokens[t];

  double peak = 0.0;
  for (std::size_t k = 0; k < p.n_text; ++k) {
    const std::size_t j = p.n_audio + k;
    PlotToken tok;
    tok.position = p.text_positions[k];
    if (k < result.text_feature_surfaces.size()) tok.text = result.text_feature_surfaces[k];
    tok.value = a.at(j, t);
    for (std::size_t u = 0; u < tokens; ++u) tok.total_abs += std::abs(a.at(j, u));
    peak = std::max(peak, std::abs(tok.value));
    data.tokens.push_back(std::move(tok));
  }
  for (PlotToken& tok : data.tokens) {
    if (peak > 0.0) {
      tok.intensity = std::abs(tok.value) / peak;
      tok.highlight = std::abs(tok.value) >= options.highlight_fraction * peak;
    }
  }

  data.absolute.name = "absolute";
  data.positive.name = "positive";
  data.negative.name = "negative";
  for (std::size_t j = 0; j < p.n_audio; ++j) {
    const double v = a.at(j, t);
    data.absolute.values.push_back(std::abs(v));
    data.positive.values.push_back(std::max(v, 0.0));
    data.negative.values.push_back(std::min(v, 0.0));
  }
  Normalize(data.absolute);
  Normalize(data.positive);
  Normalize(data.negative);
  return data;
}

std::string RenderPlotSvg(const PlotData& data) {
  // Token rows first, to know the height.
  struct Placed {
    double x, y, w;
    const PlotToken* tok;
  };
  std::vector<Placed> placed;
  double x = kMargin;
  double y = 48.0;
  for (const PlotToken& tok : data.tokens) {
    const double w = kCharWidth * static_cast<double>(std::max<std::size_t>(1, tok.text.size())) + 8.0;
    if (x + w > kWidth - kMargin && x > kMargin) {
      x = kMargin;
      y += kTokenHeight + 4.0;
    }
    placed.push_back({x, y, w, &tok});
    x += w + 4.0;
  }
  const double strips_top = y + kTokenHeight + 36.0;
  const double height = strips_top + 3 * (kStripHeight + 24.0) + 30.0;
  const double plot_w = kWidth - 2 * kMargin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << kWidth << " " << height
      << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"24\" font-size=\"14\">"
      << XmlEscape(data.question_id) << " - answer token " << data.token_index
      << " \"" << XmlEscape(data.token_text) << "\"</text>\n";

  for (const Placed& p : placed) {
    const bool hi = p.tok->highlight;
    svg << "<g class=\"token" << (hi ? " highlight" : "") << "\"><rect x=\"" << p.x
        << "\" y=\"" << p.y << "\" width=\"" << p.w << "\" height=\"" << kTokenHeight
        << "\" fill=\"" << (hi ? "black" : "white") << "\" stroke=\"#bbbbbb\"/>"
        << "<text x=\"" << p.x + 4 << "\" y=\"" << p.y + 14 << "\" fill=\""
        << (hi ? "white" : "black") << "\">" << XmlEscape(p.tok->text)
        << "</text></g>\n";
  }

  const double total = static_cast<double>(std::max<std::size_t>(1, data.audio_samples));
  const PlotStrip* strips[] = {&data.absolute, &data.positive, &data.negative};
  for (int s = 0; s < 3; ++s) {
    const PlotStrip& strip = *strips[s];
    const double top = strips_top + s * (kStripHeight + 24.0);
    svg << "<text x=\"" << kMargin << "\" y=\"" << top - 6 << "\">" << strip.name
        << "</text>\n";
    svg << "<g class=\"strip\" data-name=\"" << strip.name << "\">\n";
    for (std::size_t w = 0; w < data.windows.size() && w < strip.intensity.size(); ++w) {
      const double i = strip.intensity[w];
      std::string fill;
      if (s == 0) fill = Rgb(1 - i, 1 - i, 1 - i);
      if (s == 1) fill = Rgb(1, 1 - i, 1 - i);
      if (s == 2) fill = Rgb(1 - i, 1 - i, 1);
      const double x0 = kMargin + plot_w * static_cast<double>(data.windows[w].begin) / total;
      const double x1 = kMargin + plot_w * static_cast<double>(data.windows[w].end) / total;
      svg << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\""
          << std::max(x1 - x0, 0.5) << "\" height=\"" << kStripHeight << "\" fill=\""
          << fill << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << kMargin << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << kStripHeight << "\" fill=\"none\" stroke=\"#888888\"/>\n";
  }
  if (data.sample_rate_hz > 0) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f s",
                  static_cast<double>(data.audio_samples) / data.sample_rate_hz);
    svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << height - 10
        << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string PlotDataToJson(const PlotData& data) {
  using nlohmann::json;
  json tokens = json::array();
  for (const PlotToken& t : data.tokens) {
    tokens.push_back({{"position", t.position},
                      {"text", t.text},
                      {"value", t.value},
                      {"total_abs", t.total_abs},
                      {"intensity", t.intensity},
                      {"highlight", t.highlight}});
  }
  json windows = json::array();
  for (const Span& w : data.windows) windows.push_back({w.begin, w.end});
  auto strip = [](const PlotStrip& s) {
    return json{{"values", s.values}, {"intensity", s.intensity}};
  };
  json j = {{"question_id", data.question_id},
            {"token_index", data.token_index},
            {"token_text", data.token_text},
            {"tokens", tokens},
            {"audio_windows", windows},
            {"audio_samples", data.audio_samples},
            {"sample_rate_hz", data.sample_rate_hz},
            {"strips",
             {{"absolute", strip(data.absolute)},
              {"positive", strip(data.positive)},
              {"negative", strip(data.negative)}}}};
  return j.dump(1) + "\n";
}

PlotData EmitPlot(const QuestionResult& result, const std::filesystem::path& output_path,
                  const PlotOptions& options) {
  PlotData data = BuildPlotData(result, options);
  if (output_path.has_parent_path()) {
    std::filesystem::create_directories(output_path.parent_path());
  }
  WriteTextFile(output_path, RenderPlotSvg(data));
  WriteTextFile(output_path.string() + ".json", PlotDataToJson(data));
  return data;
}

}  // namespace mmshap
