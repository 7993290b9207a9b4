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

#include "topover/overlay.h"

#include <fstream>

#include "topover/error.h"

namespace topover {

using nlohmann::json;

json PatchJson(const Patch& p) {
  return json{{"cx", p.center.x}, {"cy", p.center.y}, {"hw", p.half_w},
              {"hh", p.half_h}};
}

namespace {

json MatchesJson(const std::vector<Match>& matches, const FeatureSet& p1,
                 const FeatureSet& p2) {
  json arr = json::array();
  for (const Match& m : matches) {
    const Keypoint& a = p1.keypoint(m.idx1);
    const Keypoint& b = p2.keypoint(m.idx2);
    arr.push_back(json{{"idx1", m.idx1},
                       {"idx2", m.idx2},
                       {"p1", {a.x, a.y}},
                       {"p2", {b.x, b.y}}});
  }
  return arr;
}

json RegionJson(const HomeomorphismRegion& region, const FeatureSet& p1,
                const FeatureSet& p2) {
  json pairs = json::array();
  for (std::size_t i = 0; i < region.pairs.size(); ++i) {
    const PatchPair& pp = region.pairs[i];
    json j{{"r1", PatchJson(pp.r1)},
           {"r2_adjusted", PatchJson(pp.r2)},
           {"score", pp.score.value_or(0.0)}};
    if (i < region.pair_matches.size()) {
      j["matches"] = MatchesJson(region.pair_matches[i], p1, p2);
    }
    pairs.push_back(std::move(j));
  }
  json trace = json::array();
  for (const FoveaTrace& t : region.trace) {
    trace.push_back(json{{"r1", PatchJson(t.r1)},
                         {"r2", PatchJson(t.r2_proposed)},
                         {"r2_adjusted", PatchJson(t.r2_adjusted)},
                         {"score", t.score},
                         {"matched", t.matched},
                         {"decision", ToString(t.decision)}});
  }
  return json{{"seed_match", region.seed},
              {"pairs", std::move(pairs)},
              {"steps", std::move(trace)},
              {"matched_keypoints",
               MatchesJson(region.matched_keypoints, p1, p2)}};
}

}  // namespace

json OverlayJson(const TpResult& tp, const FeatureSet& p1,
                 const FeatureSet& p2, const std::optional<SpResult>& sp) {
  json doc{{"image1", {{"id", p1.image_id()},
                       {"width", p1.width()},
                       {"height", p1.height()}}},
           {"image2", {{"id", p2.image_id()},
                       {"width", p2.width()},
                       {"height", p2.height()}}},
           {"tp", {{"metric", ToString(tp.metric)},
                   {"score", tp.score},
                   {"matches", tp.match_count},
                   {"seeds_tried", tp.seeds_tried},
                   {"seeds_skipped", tp.seeds_skipped},
                   {"best", RegionJson(tp.best, p1, p2)}}}};
  if (!tp.all_regions.empty()) {
    json all = json::array();
    for (const auto& r : tp.all_regions) all.push_back(RegionJson(r, p1, p2));
    doc["tp"]["regions"] = std::move(all);
  }
  if (sp) {
    doc["sp"] = json{{"inliers", sp->inlier_count},
                     {"matches", sp->match_count},
                     {"transform", sp->best.m},
                     {"inlier_matches",
                      MatchesJson(sp->inlier_matches, p1, p2)}};
  }
  return doc;
}

void WriteOverlay(const json& overlay, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << overlay.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace topover
