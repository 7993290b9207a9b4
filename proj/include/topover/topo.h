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

#ifndef TOPOVER_TOPO_H_
#define TOPOVER_TOPO_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topover/features.h"
#include "topover/geometry.h"
#include "topover/spatial.h"

namespace topover {

// Size measure of a Homeomorphism Region.
enum class ScoreMetric { kPatchCount, kKeypointCount, kUnionArea };

std::string ToString(ScoreMetric metric);
// Accepts "patches", "keypoints", "area". Throws ParameterError.
ScoreMetric ParseScoreMetric(const std::string& name);

struct TopoConfig {
  // Patch side as a fraction of min(width, height) of image 1.
  double patch_fraction = 0.125;
  // Fovea acceptance threshold on the normalized sub-patch score.
  double alpha = 0.2;
  // Sub-patch grid order (grid x grid cells).
  int grid = 3;
  // Saccade stride as a fraction of the patch side.
  double overlap_step = 0.5;
  std::size_t max_hypotheses = 256;
  std::size_t min_keypoints_per_patch = 4;
  // Minimum shared fraction (per axis, of the smaller patch) for two
  // patches to count as overlapping in the topology checks.
  double min_overlap = 0.25;
  // Skip seeds whose image-1 keypoint already lies in a found region with
  // at least skip_min_pairs pairs. Forces sequential seed order.
  bool skip_covered_seeds = true;
  std::size_t skip_min_pairs = 4;
  // Keep only hypotheses that are inliers of the best SP transform.
  bool prefilter_with_sp = false;
  double prefilter_epsilon = 8.0;
  ScoreMetric metric = ScoreMetric::kPatchCount;
  bool keep_all_regions = false;
  bool record_trace = false;
  int threads = 1;

  void Validate() const;
};

// Translation plus per-axis scale taking image-1 coordinates near a patch
// pair into image 2. Saccade uses it to place candidate partners.
struct LocalMap {
  Point2 anchor1;
  Point2 anchor2;
  double ratio_x = 1.0;
  double ratio_y = 1.0;

  Point2 Apply(const Point2& p) const {
    return {anchor2.x + ratio_x * (p.x - anchor1.x),
            anchor2.y + ratio_y * (p.y - anchor1.y)};
  }
};

struct PatchPair {
  Patch r1;
  Patch r2;
  // Present only once the pair went through the fovea.
  std::optional<double> score;
  LocalMap map;
};

// Seed produced from one ratio-test match.
struct Hypothesis {
  PatchPair pair;
  std::size_t match_index = 0;  // index into the match list
  Match match;
};

struct FoveaResult {
  Patch r2_adjusted;
  double score = 0.0;
  bool verified = false;
  std::vector<Match> matches;      // restricted matches r1 -> r2
  std::size_t consistent = 0;      // partners in the corresponding cell
  std::size_t occupied_cells = 0;  // non-empty sub-patches of r1
  LocalMap map;
};

using FoveaFn = std::function<FoveaResult(const PatchPair& candidate)>;

// Verified pairs during region growth. Candidate centers live on a
// lattice anchored at the seed; `visited` holds the lattice keys of every
// pair ever proposed or verified.
struct GrowthState {
  std::vector<PatchPair> verified;
  Point2 origin;
  double stride_x = 1.0;
  double stride_y = 1.0;
  std::set<std::pair<std::int64_t, std::int64_t>> visited;

  static GrowthState Start(const PatchPair& seed, const TopoConfig& cfg);
  std::pair<std::int64_t, std::int64_t> KeyOf(const Point2& center) const;
  bool IsVisited(const Point2& center) const;
  void MarkVisited(const Point2& center);
};

enum class Decision { kAccepted, kFoveaRejected, kTopologyRejected };
std::string ToString(Decision d);

// One fovea evaluation, kept for overlays.
struct FoveaTrace {
  Patch r1;
  Patch r2_proposed;
  Patch r2_adjusted;
  double score = 0.0;
  std::size_t matched = 0;
  Decision decision = Decision::kFoveaRejected;
};

struct HomeomorphismRegion {
  std::vector<PatchPair> pairs;
  // Restricted matches of every verified pair, deduplicated by idx1 (first
  // pair wins).
  std::vector<Match> matched_keypoints;
  // Restricted matches per pair, parallel to `pairs`.
  std::vector<std::vector<Match>> pair_matches;
  std::size_t seed = 0;  // generating match index
  std::vector<FoveaTrace> trace;

  bool empty() const { return pairs.empty(); }
};

struct TpResult {
  HomeomorphismRegion best;
  double score = 0.0;
  ScoreMetric metric = ScoreMetric::kPatchCount;
  std::vector<HomeomorphismRegion> all_regions;
  std::size_t match_count = 0;
  std::size_t seeds_tried = 0;
  std::size_t seeds_skipped = 0;
};

// Patch half extent for image 1 under `cfg`.
double PatchHalfSize(const FeatureSet& p1, const TopoConfig& cfg);

std::vector<Hypothesis> BuildHypotheses(const std::vector<Match>& matches,
                                        const FeatureSet& p1,
                                        const FeatureSet& p2,
                                        const TopoConfig& cfg);

// Candidate neighbors of the verified pairs (see GrowthState). Does not
// modify the state.
std::vector<PatchPair> Saccade(const GrowthState& state, const TopoConfig& cfg,
                               const ImageBounds& bounds1,
                               const ImageBounds& bounds2);

// Bounding rectangle of the matched partners in image 2 with a 5% margin;
// r2 itself when fewer than min_keypoints matches.
Patch AdjustPatch(const Patch& r1, const Patch& r2,
                  const std::vector<Match>& matches, const FeatureSet& p2,
                  std::size_t min_keypoints);

// Sub-patch cell of `p` in a grid x grid partition of `patch`, row-major.
int SubPatchCell(const Patch& patch, const Point2& p, int grid);

FoveaResult Fovea(const Patch& r1, const Patch& r2, const FeatureSet& p1,
                  const FeatureSet& p2, const TopoConfig& cfg);

HomeomorphismRegion GrowRegion(const PatchPair& seed, const FeatureSet& p1,
                               const FeatureSet& p2, const TopoConfig& cfg);

// Region growth with an arbitrary fovea. The returned region carries no
// matches unless the fovea reports them.
HomeomorphismRegion GrowRegionWith(const PatchPair& seed, const FoveaFn& fovea,
                                   const TopoConfig& cfg,
                                   const ImageBounds& bounds1,
                                   const ImageBounds& bounds2);

double HrScore(const HomeomorphismRegion& region, ScoreMetric metric,
               double image1_area);

struct ValidityReport {
  bool valid = true;
  int condition = 0;  // violated condition (1..3), 0 when valid
  std::size_t first = 0;
  std::size_t second = 0;
  std::string message;
};

ValidityReport CheckHrValidity(const HomeomorphismRegion& region, double alpha,
                               double min_overlap);

TpResult TopoVerify(const FeatureSet& p1, const FeatureSet& p2,
                    const TopoConfig& cfg,
                    double ratio_threshold = kDefaultRatioThreshold);

// Variant on a precomputed ratio-test match list.
TpResult TopoVerifyMatches(const std::vector<Match>& matches,
                           const FeatureSet& p1, const FeatureSet& p2,
                           const TopoConfig& cfg);

}  // namespace topover

#endif  // TOPOVER_TOPO_H_
