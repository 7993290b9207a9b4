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

#ifndef TOPOVER_SPATIAL_H_
#define TOPOVER_SPATIAL_H_

#include <array>
#include <cstddef>
#include <vector>

#include "topover/features.h"

namespace topover {

// Row-major 3x3 transform with last row [0, 0, 1], applied to column
// vectors: q = M * [x, y, 1]^T.
struct AffineHypothesis {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::size_t source_match = 0;

  Point2 Apply(const Point2& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }
  static AffineHypothesis Identity() { return {}; }
};

struct SpatialConfig {
  double epsilon = 8.0;  // pixels
  std::size_t max_hypotheses = 1000;
  bool ignore_rotation = false;
  int threads = 1;

  void Validate() const;
};

struct SpResult {
  AffineHypothesis best;
  std::size_t inlier_count = 0;
  std::vector<Match> inlier_matches;
  std::size_t match_count = 0;  // ratio-test matches considered
};

// Similarity transform taking keypoint idx1 onto keypoint idx2: position
// offset, scale ratio and (unless ignore_rotation) orientation difference.
AffineHypothesis HypothesisFromMatch(const Match& match, const FeatureSet& p1,
                                     const FeatureSet& p2,
                                     bool ignore_rotation = false);

struct InlierCount {
  std::size_t count = 0;
  std::vector<Match> inliers;
};

// Matches whose residual ||M p1 - p2|| is strictly below epsilon.
InlierCount CountInliers(const AffineHypothesis& h,
                         const std::vector<Match>& matches,
                         const FeatureSet& p1, const FeatureSet& p2,
                         double epsilon);

// Exhaustive single-correspondence RANSAC over the ratio-test matches.
SpResult SpatialVerify(const FeatureSet& p1, const FeatureSet& p2,
                       const SpatialConfig& cfg,
                       double ratio_threshold = kDefaultRatioThreshold);

// Same as SpatialVerify on a precomputed match list.
SpResult SpatialVerifyMatches(const std::vector<Match>& matches,
                              const FeatureSet& p1, const FeatureSet& p2,
                              const SpatialConfig& cfg);

}  // namespace topover

#endif  // TOPOVER_SPATIAL_H_
