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

#include "topover/spatial.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topover/error.h"
#include "topover/parallel.h"

namespace topover {

void SpatialConfig::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be > 0");
  }
  if (max_hypotheses < 1) throw ParameterError("max_hypotheses must be >= 1");
  if (threads < 1) throw ParameterError("threads must be >= 1");
}

AffineHypothesis HypothesisFromMatch(const Match& match, const FeatureSet& p1,
                                     const FeatureSet& p2,
                                     bool ignore_rotation) {
  if (match.idx1 >= p1.size() || match.idx2 >= p2.size()) {
    throw InvalidKeypointError("match index out of range");
  }
  const Keypoint& a = p1.keypoint(match.idx1);
  const Keypoint& b = p2.keypoint(match.idx2);
  if (!(a.scale > 0.0) || !(b.scale > 0.0)) {
    throw InvalidKeypointError("keypoint scale must be > 0");
  }
  const double s = b.scale / a.scale;
  const double theta = ignore_rotation ? 0.0 : b.orientation - a.orientation;
  const double c = s * std::cos(theta);
  const double sn = s * std::sin(theta);
  AffineHypothesis h;
  h.m = {c, -sn, b.x - (c * a.x - sn * a.y),
         sn, c, b.y - (sn * a.x + c * a.y),
         0, 0, 1};
  h.source_match = 0;
  const double det = h.m[0] * h.m[4] - h.m[1] * h.m[3];
  if (!(std::abs(det) > 1e-12) || !std::isfinite(det)) {
    throw InvalidKeypointError("degenerate similarity transform");
  }
  return h;
}

InlierCount CountInliers(const AffineHypothesis& h,
                         const std::vector<Match>& matches,
                         const FeatureSet& p1, const FeatureSet& p2,
                         double epsilon) {
  InlierCount out;
  const double eps2 = epsilon * epsilon;
  for (const Match& m : matches) {
    const Point2 q = h.Apply(p1.keypoint(m.idx1).location());
    const Keypoint& b = p2.keypoint(m.idx2);
    const double dx = q.x - b.x;
    const double dy = q.y - b.y;
    if (dx * dx + dy * dy < eps2) out.inliers.push_back(m);
  }
  out.count = out.inliers.size();
  return out;
}

SpResult SpatialVerifyMatches(const std::vector<Match>& matches,
                              const FeatureSet& p1, const FeatureSet& p2,
                              const SpatialConfig& cfg) {
  cfg.Validate();
  SpResult result;
  result.match_count = matches.size();
  if (matches.empty()) return result;

  // Hypotheses in ascending ratio order, capped.
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return matches[a].ratio < matches[b].ratio;
  });
  if (order.size() > cfg.max_hypotheses) order.resize(cfg.max_hypotheses);

  std::vector<std::size_t> counts(order.size(), 0);
  ParallelFor(order.size(), cfg.threads, [&](std::size_t k) {
    const AffineHypothesis h =
        HypothesisFromMatch(matches[order[k]], p1, p2, cfg.ignore_rotation);
    const double eps2 = cfg.epsilon * cfg.epsilon;
    std::size_t n = 0;
    for (const Match& m : matches) {
      const Point2 q = h.Apply(p1.keypoint(m.idx1).location());
      const Keypoint& b = p2.keypoint(m.idx2);
      const double dx = q.x - b.x;
      const double dy = q.y - b.y;
      if (dx * dx + dy * dy < eps2) ++n;
    }
    counts[k] = n;
  });

  // Argmax; ties go to the lowest generating match index.
  std::size_t best = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (counts[k] > counts[best] ||
        (counts[k] == counts[best] && order[k] < order[best])) {
      best = k;
    }
  }
  result.best =
      HypothesisFromMatch(matches[order[best]], p1, p2, cfg.ignore_rotation);
  result.best.source_match = order[best];
  InlierCount inl =
      CountInliers(result.best, matches, p1, p2, cfg.epsilon);
  result.inlier_count = inl.count;
  result.inlier_matches = std::move(inl.inliers);
  return result;
}

SpResult SpatialVerify(const FeatureSet& p1, const FeatureSet& p2,
                       const SpatialConfig& cfg, double ratio_threshold) {
  cfg.Validate();
  if (p1.empty() || p2.size() < 2) {
    SpResult empty;
    return empty;
  }
  return SpatialVerifyMatches(RatioTestMatch(p1, p2, ratio_threshold), p1, p2,
                              cfg);
}

}  // namespace topover
