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

#ifndef TOPOVER_CONFIG_H_
#define TOPOVER_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "topover/retrieval.h"
#include "topover/spatial.h"
#include "topover/topo.h"

namespace topover {

// Everything a run needs besides file paths.
struct RunConfig {
  TopoConfig topo;
  SpatialConfig spatial;
  double ratio_threshold = kDefaultRatioThreshold;
  ScorerKind scorer = ScorerKind::kTp;
  std::size_t k = 100;
  int threads = 1;
  bool normalize_descriptors = false;

  // Validates every nested config; throws ParameterError.
  void Validate() const;
  PairScoring Scoring() const;
  // Pushes `threads` into the nested configs.
  void SyncThreads();
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key = value" lines; '#' starts a comment. Throws FormatError naming the
// line.
KeyValues ParseKeyValues(const std::string& text);
KeyValues LoadKeyValues(const std::filesystem::path& path);

// Keys accepted by ApplySetting, which match the long CLI flag names.
const std::vector<std::string>& ConfigKeys();

// Throws ParameterError on an unknown key or a malformed value.
void ApplySetting(RunConfig& cfg, const std::string& key,
                  const std::string& value);

}  // namespace topover

#endif  // TOPOVER_CONFIG_H_
