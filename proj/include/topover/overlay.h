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

#ifndef TOPOVER_OVERLAY_H_
#define TOPOVER_OVERLAY_H_

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "topover/features.h"
#include "topover/spatial.h"
#include "topover/topo.h"

namespace topover {

// Overlay document: patch rectangles, adjusted rectangles, matched keypoint
// coordinates, fovea scores and accept/reject decisions of a TP run, plus
// the SP inliers when given. Rectangles are {"cx","cy","hw","hh"}.
nlohmann::json OverlayJson(const TpResult& tp, const FeatureSet& p1,
                           const FeatureSet& p2,
                           const std::optional<SpResult>& sp = std::nullopt);

void WriteOverlay(const nlohmann::json& overlay,
                  const std::filesystem::path& path);

nlohmann::json PatchJson(const Patch& p);

}  // namespace topover

#endif  // TOPOVER_OVERLAY_H_
