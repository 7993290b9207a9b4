// Copyright 2026 The Topover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "topover/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "topover/error.h"

namespace topover {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParameterError("setting '" + key + "': '" + v +
                         "' is not a number");
  }
  return out;
}

long long ToInt(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParameterError("setting '" + key + "': '" + v +
                         "' is not an integer");
  }
  return out;
}

std::size_t ToCount(const std::string& key, const std::string& v) {
  const long long n = ToInt(key, v);
  if (n < 0) throw ParameterError("setting '" + key + "' must be >= 0");
  return static_cast<std::size_t>(n);
}

bool ToBool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ParameterError("setting '" + key + "': '" + v + "' is not a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"ratio",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.ratio_threshold = ToDouble(k, v);
       }},
      {"normalize-descriptors",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.normalize_descriptors = ToBool(k, v);
       }},
      {"epsilon",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.spatial.epsilon = ToDouble(k, v);
       }},
      {"sp-max-hypotheses",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.spatial.max_hypotheses = ToCount(k, v);
       }},
      {"ignore-rotation",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.spatial.ignore_rotation = ToBool(k, v);
       }},
      {"alpha",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.alpha = ToDouble(k, v);
       }},
      {"grid",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.grid = static_cast<int>(ToInt(k, v));
       }},
      {"patch-fraction",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.patch_fraction = ToDouble(k, v);
       }},
      {"overlap-step",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.overlap_step = ToDouble(k, v);
       }},
      {"max-hypotheses",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.max_hypotheses = ToCount(k, v);
       }},
      {"min-keypoints",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.min_keypoints_per_patch = ToCount(k, v);
       }},
      {"min-overlap",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.min_overlap = ToDouble(k, v);
       }},
      {"skip-covered-seeds",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.skip_covered_seeds = ToBool(k, v);
       }},
      {"skip-min-pairs",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.skip_min_pairs = ToCount(k, v);
       }},
      {"prefilter-sp",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.topo.prefilter_with_sp = ToBool(k, v);
       }},
      {"metric",
       [](RunConfig& c, const auto&, const auto& v) {
         c.topo.metric = ParseScoreMetric(v);
       }},
      {"scorer",
       [](RunConfig& c, const auto&, const auto& v) {
         c.scorer = ParseScorer(v);
       }},
      {"k",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.k = ToCount(k, v);
       }},
      {"threads",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.threads = static_cast<int>(ToInt(k, v));
       }},
  };
  return setters;
}

}  // namespace

void RunConfig::Validate() const {
  if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) {
    throw ParameterError("ratio must lie in (0, 1]");
  }
  if (threads < 1) throw ParameterError("threads must be >= 1");
  topo.Validate();
  spatial.Validate();
}

PairScoring RunConfig::Scoring() const {
  PairScoring s;
  s.scorer = scorer;
  s.topo = topo;
  s.spatial = spatial;
  s.ratio_threshold = ratio_threshold;
  return s;
}

void RunConfig::SyncThreads() {
  topo.threads = threads;
  spatial.threads = threads;
}

KeyValues ParseKeyValues(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError("config line " + std::to_string(line_no) +
                        ": empty key or value");
    }
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues LoadKeyValues(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseKeyValues(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : Setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void ApplySetting(RunConfig& cfg, const std::string& key,
                  const std::string& value) {
  const auto& setters = Setters();
  auto it = setters.find(key);
  if (it == setters.end()) {
    throw ParameterError("unknown setting '" + key + "'");
  }
  it->second(cfg, key, value);
}

}  // namespace topover
