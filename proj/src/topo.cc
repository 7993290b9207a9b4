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

#include "topover/topo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topover/error.h"

namespace topover {

std::string ToString(ScoreMetric metric) {
  switch (metric) {
    case ScoreMetric::kPatchCount:
      return "patches";
    case ScoreMetric::kKeypointCount:
      return "keypoints";
    case ScoreMetric::kUnionArea:
      return "area";
  }
  return "patches";
}

ScoreMetric ParseScoreMetric(const std::string& name) {
  if (name == "patches") return ScoreMetric::kPatchCount;
  if (name == "keypoints") return ScoreMetric::kKeypointCount;
  if (name == "area") return ScoreMetric::kUnionArea;
  throw ParameterError("unknown metric '" + name +
                       "' (expected patches, keypoints or area)");
}

std::string ToString(Decision d) {
  switch (d) {
    case Decision::kAccepted:
      return "accepted";
    case Decision::kFoveaRejected:
      return "fovea_rejected";
    case Decision::kTopologyRejected:
      return "topology_rejected";
  }
  return "fovea_rejected";
}

void TopoConfig::Validate() const {
  if (!(patch_fraction > 0.0 && patch_fraction < 1.0)) {
    throw ParameterError("patch_fraction must lie in (0, 1)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1]");
  }
  if (grid < 1) throw ParameterError("grid must be >= 1");
  if (!(overlap_step > 0.0 && overlap_step < 1.0)) {
    throw ParameterError("overlap_step must lie in (0, 1)");
  }
  if (max_hypotheses < 1) throw ParameterError("max_hypotheses must be >= 1");
  if (!(min_overlap >= 0.0 && min_overlap < 1.0 - overlap_step)) {
    throw ParameterError(
        "min_overlap must lie in [0, 1 - overlap_step) so that saccade "
        "candidates overlap their parent");
  }
  if (!(prefilter_epsilon > 0.0)) {
    throw ParameterError("prefilter_epsilon must be > 0");
  }
  if (threads < 1) throw ParameterError("threads must be >= 1");
}

// ---------------------------------------------------------------------------
// Growth state

GrowthState GrowthState::Start(const PatchPair& seed, const TopoConfig& cfg) {
  GrowthState s;
  s.origin = seed.r1.center;
  s.stride_x = cfg.overlap_step * 2.0 * seed.r1.half_w;
  s.stride_y = cfg.overlap_step * 2.0 * seed.r1.half_h;
  s.MarkVisited(seed.r1.center);
  return s;
}

std::pair<std::int64_t, std::int64_t> GrowthState::KeyOf(
    const Point2& center) const {
  return {std::llround((center.x - origin.x) / stride_x),
          std::llround((center.y - origin.y) / stride_y)};
}

bool GrowthState::IsVisited(const Point2& center) const {
  return visited.count(KeyOf(center)) > 0;
}

void GrowthState::MarkVisited(const Point2& center) {
  visited.insert(KeyOf(center));
}

// ---------------------------------------------------------------------------
// Hypotheses

double PatchHalfSize(const FeatureSet& p1, const TopoConfig& cfg) {
  return 0.5 * cfg.patch_fraction * std::min(p1.width(), p1.height());
}

std::vector<Hypothesis> BuildHypotheses(const std::vector<Match>& matches,
                                        const FeatureSet& p1,
                                        const FeatureSet& p2,
                                        const TopoConfig& cfg) {
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return matches[a].ratio < matches[b].ratio;
  });
  if (order.size() > cfg.max_hypotheses) order.resize(cfg.max_hypotheses);

  const double half = PatchHalfSize(p1, cfg);
  std::vector<Hypothesis> out;
  out.reserve(order.size());
  for (std::size_t idx : order) {
    const Match& m = matches[idx];
    const Keypoint& k1 = p1.keypoint(m.idx1);
    const Keypoint& k2 = p2.keypoint(m.idx2);
    const double ratio = k2.scale / k1.scale;
    Hypothesis h;
    h.match_index = idx;
    h.match = m;
    h.pair.r1 = Patch{k1.location(), half, half};
    h.pair.r2 = Patch{k2.location(), half * ratio, half * ratio};
    h.pair.map = LocalMap{k1.location(), k2.location(), ratio, ratio};
    out.push_back(h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Saccade

namespace detail {

// Candidates around the verified pairs listed in `parents`.
std::vector<PatchPair> SaccadeFrom(const GrowthState& state,
                                   std::span<const std::size_t> parents,
                                   const TopoConfig& cfg,
                                   const ImageBounds& bounds1,
                                   const ImageBounds& bounds2) {
  std::vector<PatchPair> out;
  std::set<std::pair<std::int64_t, std::int64_t>> proposed;
  for (std::size_t pi : parents) {
    const PatchPair& parent = state.verified[pi];
    const auto base = state.KeyOf(parent.r1.center);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const std::pair<std::int64_t, std::int64_t> key{base.first + dx,
                                                        base.second + dy};
        if (state.visited.count(key) || proposed.count(key)) continue;
        Patch r1{{state.origin.x + double(key.first) * state.stride_x,
                  state.origin.y + double(key.second) * state.stride_y},
                 parent.r1.half_w,
                 parent.r1.half_h};
        if (!IntersectsImage(r1, bounds1)) continue;
        std::size_t touching = 0;
        for (const PatchPair& v : state.verified) {
          if (Overlaps(r1, v.r1, cfg.min_overlap) && ++touching > 1) break;
        }
        if (touching != 1) continue;
        Patch r2{parent.map.Apply(r1.center),
                 r1.half_w * parent.map.ratio_x,
                 r1.half_h * parent.map.ratio_y};
        if (!IntersectsImage(r2, bounds2)) continue;
        proposed.insert(key);
        out.push_back(PatchPair{r1, r2, std::nullopt, parent.map});
      }
    }
  }
  return out;
}

}  // namespace detail

std::vector<PatchPair> Saccade(const GrowthState& state, const TopoConfig& cfg,
                               const ImageBounds& bounds1,
                               const ImageBounds& bounds2) {
  std::vector<std::size_t> all(state.verified.size());
  std::iota(all.begin(), all.end(), 0);
  return detail::SaccadeFrom(state, all, cfg, bounds1, bounds2);
}

// ---------------------------------------------------------------------------
// Fovea

Patch AdjustPatch(const Patch& r1, const Patch& r2,
                  const std::vector<Match>& matches, const FeatureSet& p2,
                  std::size_t min_keypoints) {
  (void)r1;
  if (matches.empty() || matches.size() < min_keypoints) return r2;
  double x0 = p2.keypoint(matches[0].idx2).x;
  double x1 = x0;
  double y0 = p2.keypoint(matches[0].idx2).y;
  double y1 = y0;
  for (const Match& m : matches) {
    const Keypoint& k = p2.keypoint(m.idx2);
    x0 = std::min(x0, k.x);
    x1 = std::max(x1, k.x);
    y0 = std::min(y0, k.y);
    y1 = std::max(y1, k.y);
  }
  // 5% margin; a floor keeps degenerate (collinear) clusters valid.
  constexpr double kMargin = 1.05;
  constexpr double kMinHalf = 0.5;
  return Patch{{0.5 * (x0 + x1), 0.5 * (y0 + y1)},
               std::max(kMinHalf, 0.5 * (x1 - x0) * kMargin),
               std::max(kMinHalf, 0.5 * (y1 - y0) * kMargin)};
}

int SubPatchCell(const Patch& patch, const Point2& p, int grid) {
  auto index = [grid](double v, double lo, double extent) {
    int i = static_cast<int>(std::floor((v - lo) / extent * grid));
    return std::clamp(i, 0, grid - 1);
  };
  const int col = index(p.x, patch.left(), 2.0 * patch.half_w);
  const int row = index(p.y, patch.top(), 2.0 * patch.half_h);
  return row * grid + col;
}

namespace {

double Median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  }
  return m;
}

// Median of pairwise coordinate-spread ratios over well-separated pairs.
double RobustRatio(const std::vector<Point2>& a, const std::vector<Point2>& b,
                   bool use_x, double min_spread, double prior) {
  std::vector<double> ratios;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double d1 = use_x ? a[j].x - a[i].x : a[j].y - a[i].y;
      const double d2 = use_x ? b[j].x - b[i].x : b[j].y - b[i].y;
      if (std::abs(d1) >= min_spread && d1 * d2 > 0.0) {
        ratios.push_back(d2 / d1);
      }
    }
  }
  if (ratios.size() < 3) return prior;
  return std::clamp(Median(std::move(ratios)), prior / 1.5, prior * 1.5);
}

}  // namespace

FoveaResult Fovea(const Patch& r1, const Patch& r2, const FeatureSet& p1,
                  const FeatureSet& p2, const TopoConfig& cfg) {
  FoveaResult res;
  res.r2_adjusted = r2;
  const double prior_x = r2.half_w / r1.half_w;
  const double prior_y = r2.half_h / r1.half_h;
  res.map = LocalMap{r1.center, r2.center, prior_x, prior_y};

  res.matches = RestrictedMatch(p1, r1, p2, r2);
  if (res.matches.empty()) return res;
  res.r2_adjusted =
      AdjustPatch(r1, r2, res.matches, p2, cfg.min_keypoints_per_patch);

  const int cells = cfg.grid * cfg.grid;
  std::vector<std::size_t> total(cells, 0);
  std::vector<std::size_t> hit(cells, 0);
  std::vector<Point2> good1;
  std::vector<Point2> good2;
  for (const Match& m : res.matches) {
    const Point2 a = p1.keypoint(m.idx1).location();
    const Point2 b = p2.keypoint(m.idx2).location();
    const int ca = SubPatchCell(r1, a, cfg.grid);
    const int cb = SubPatchCell(res.r2_adjusted, b, cfg.grid);
    ++total[ca];
    if (ca == cb) {
      ++hit[ca];
      good1.push_back(a);
      good2.push_back(b);
    }
  }
  double sum = 0.0;
  for (int k = 0; k < cells; ++k) {
    if (total[k] == 0) continue;
    ++res.occupied_cells;
    sum += double(hit[k]) / double(total[k]);
  }
  res.score = res.occupied_cells ? sum / double(res.occupied_cells) : 0.0;
  res.consistent = good1.size();
  res.verified = res.score >= cfg.alpha &&
                 res.matches.size() >= cfg.min_keypoints_per_patch;

  // Local map for the saccade: robust scale per axis, then the median
  // translation of the consistent matches around the r1 center.
  if (good1.size() >= cfg.min_keypoints_per_patch && good1.size() >= 2) {
    const double rx =
        RobustRatio(good1, good2, true, 0.25 * r1.half_w, prior_x);
    const double ry =
        RobustRatio(good1, good2, false, 0.25 * r1.half_h, prior_y);
    std::vector<double> tx;
    std::vector<double> ty;
    for (std::size_t i = 0; i < good1.size(); ++i) {
      tx.push_back(good2[i].x - rx * (good1[i].x - r1.center.x));
      ty.push_back(good2[i].y - ry * (good1[i].y - r1.center.y));
    }
    res.map = LocalMap{r1.center, {Median(tx), Median(ty)}, rx, ry};
  }
  return res;
}

}  // namespace topover
