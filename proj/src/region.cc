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

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <set>

#include "topover/error.h"
#include "topover/parallel.h"
#include "topover/topo.h"

namespace topover {

namespace detail {
std::vector<PatchPair> SaccadeFrom(const GrowthState& state,
                                   std::span<const std::size_t> parents,
                                   const TopoConfig& cfg,
                                   const ImageBounds& bounds1,
                                   const ImageBounds& bounds2);
}  // namespace detail

namespace {

// Topological consistency of a new pair against every member.
bool ConsistentWithMembers(const Patch& r1, const Patch& r2,
                           const std::vector<PatchPair>& members,
                           double min_overlap) {
  for (const PatchPair& m : members) {
    if (Overlaps(r1, m.r1, min_overlap) != Overlaps(r2, m.r2, min_overlap)) {
      return false;
    }
  }
  return true;
}

void RecordMatches(HomeomorphismRegion& region, std::set<std::size_t>& seen,
                   const std::vector<Match>& matches) {
  for (const Match& m : matches) {
    if (seen.insert(m.idx1).second) region.matched_keypoints.push_back(m);
  }
}

}  // namespace

HomeomorphismRegion GrowRegionWith(const PatchPair& seed, const FoveaFn& fovea,
                                   const TopoConfig& cfg,
                                   const ImageBounds& bounds1,
                                   const ImageBounds& bounds2) {
  HomeomorphismRegion region;
  GrowthState state = GrowthState::Start(seed, cfg);
  std::set<std::size_t> seen;

  // Fovea-verified candidates wait here and are admitted best score
  // first, ties in proposal order. Admitting strong pairs before weak ones
  // means a pair that only passes a lower alpha can never block one that
  // passes a higher alpha, so lowering alpha only adds pairs.
  struct Pending {
    double score;
    std::uint64_t order;
    PatchPair cand;
    FoveaResult res;
  };
  auto later = [](const Pending& a, const Pending& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.order > b.order;
  };
  std::priority_queue<Pending, std::vector<Pending>, decltype(later)> pending(
      later);
  std::uint64_t next_order = 0;

  auto trace = [&](const PatchPair& cand, const FoveaResult& res,
                   Decision d) {
    if (!cfg.record_trace) return;
    region.trace.push_back(FoveaTrace{cand.r1, cand.r2, res.r2_adjusted,
                                      res.score, res.matches.size(), d});
  };
  auto admit = [&](const PatchPair& cand, FoveaResult res) {
    if (!ConsistentWithMembers(cand.r1, res.r2_adjusted, state.verified,
                               cfg.min_overlap)) {
      trace(cand, res, Decision::kTopologyRejected);
      return false;
    }
    trace(cand, res, Decision::kAccepted);
    PatchPair member{cand.r1, res.r2_adjusted, res.score, res.map};
    state.verified.push_back(member);
    region.pairs.push_back(member);
    RecordMatches(region, seen, res.matches);
    region.pair_matches.push_back(std::move(res.matches));
    return true;
  };
  auto expand = [&](std::size_t parent) {
    const std::size_t parents[] = {parent};
    for (PatchPair& c :
         detail::SaccadeFrom(state, parents, cfg, bounds1, bounds2)) {
      state.MarkVisited(c.r1.center);
      FoveaResult res = fovea(c);
      if (!res.verified) {
        trace(c, res, Decision::kFoveaRejected);
        continue;
      }
      const double score = res.score;
      pending.push(Pending{score, next_order++, std::move(c), std::move(res)});
    }
  };

  FoveaResult first = fovea(seed);
  if (!first.verified) {
    trace(seed, first, Decision::kFoveaRejected);
    return region;
  }
  admit(seed, std::move(first));
  expand(0);
  while (!pending.empty()) {
    Pending top = pending.top();
    pending.pop();
    if (admit(top.cand, std::move(top.res))) {
      expand(state.verified.size() - 1);
    }
  }
  return region;
}

HomeomorphismRegion GrowRegion(const PatchPair& seed, const FeatureSet& p1,
                               const FeatureSet& p2, const TopoConfig& cfg) {
  cfg.Validate();
  FoveaFn fovea = [&](const PatchPair& cand) {
    return Fovea(cand.r1, cand.r2, p1, p2, cfg);
  };
  return GrowRegionWith(seed, fovea, cfg, p1.bounds(), p2.bounds());
}

double HrScore(const HomeomorphismRegion& region, ScoreMetric metric,
               double image1_area) {
  switch (metric) {
    case ScoreMetric::kPatchCount:
      return double(region.pairs.size());
    case ScoreMetric::kKeypointCount:
      return double(region.matched_keypoints.size());
    case ScoreMetric::kUnionArea: {
      if (region.pairs.empty() || !(image1_area > 0.0)) return 0.0;
      std::vector<Patch> r1s;
      r1s.reserve(region.pairs.size());
      for (const auto& p : region.pairs) r1s.push_back(p.r1);
      return UnionArea(r1s) / image1_area;
    }
  }
  return 0.0;
}

ValidityReport CheckHrValidity(const HomeomorphismRegion& region, double alpha,
                               double min_overlap) {
  ValidityReport rep;
  const auto& pairs = region.pairs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].score || *pairs[i].score < alpha) {
      rep = {false, 1, i, i,
             "pair " + std::to_string(i) + " lacks a fovea score >= alpha"};
      return rep;
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const bool o1 = Overlaps(pairs[i].r1, pairs[j].r1, min_overlap);
      const bool o2 = Overlaps(pairs[i].r2, pairs[j].r2, min_overlap);
      if (o1 != o2) {
        rep = {false, 2, i, j,
               "pairs " + std::to_string(i) + " and " + std::to_string(j) +
                   (o1 ? ": r1 overlap but r2 do not"
                       : ": r2 overlap but r1 do not")};
        return rep;
      }
    }
  }
  if (pairs.size() > 1) {
    std::vector<bool> reached(pairs.size(), false);
    std::deque<std::size_t> queue{0};
    reached[0] = true;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (!reached[j] && Overlaps(pairs[i].r1, pairs[j].r1, min_overlap)) {
          reached[j] = true;
          queue.push_back(j);
        }
      }
    }
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (!reached[j]) {
        rep = {false, 3, j, 0,
               "pair " + std::to_string(j) +
                   " is not connected to pair 0 through r1 overlaps"};
        return rep;
      }
    }
  }
  return rep;
}

TpResult TopoVerifyMatches(const std::vector<Match>& matches,
                           const FeatureSet& p1, const FeatureSet& p2,
                           const TopoConfig& cfg) {
  cfg.Validate();
  TpResult result;
  result.metric = cfg.metric;
  result.match_count = matches.size();
  if (matches.empty()) return result;

  std::vector<Hypothesis> seeds = BuildHypotheses(matches, p1, p2, cfg);
  if (cfg.prefilter_with_sp) {
    SpatialConfig sp_cfg;
    sp_cfg.epsilon = cfg.prefilter_epsilon;
    const SpResult sp = SpatialVerifyMatches(matches, p1, p2, sp_cfg);
    std::set<std::size_t> inlier_idx1;
    for (const Match& m : sp.inlier_matches) inlier_idx1.insert(m.idx1);
    std::erase_if(seeds, [&](const Hypothesis& h) {
      return !inlier_idx1.count(h.match.idx1);
    });
  }
  const double area1 = p1.width() * p1.height();

  std::vector<HomeomorphismRegion> regions(seeds.size());
  std::vector<bool> grown(seeds.size(), false);
  if (cfg.skip_covered_seeds || cfg.threads <= 1) {
    std::vector<std::size_t> covering;  // indices of large regions
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const Point2 kp = p1.keypoint(seeds[k].match.idx1).location();
      bool covered = false;
      if (cfg.skip_covered_seeds) {
        for (std::size_t c : covering) {
          for (const auto& pp : regions[c].pairs) {
            if (pp.r1.Contains(kp)) {
              covered = true;
              break;
            }
          }
          if (covered) break;
        }
      }
      if (covered) {
        ++result.seeds_skipped;
        continue;
      }
      regions[k] = GrowRegion(seeds[k].pair, p1, p2, cfg);
      regions[k].seed = seeds[k].match_index;
      grown[k] = true;
      if (regions[k].pairs.size() >= cfg.skip_min_pairs) covering.push_back(k);
    }
  } else {
    ParallelFor(seeds.size(), cfg.threads, [&](std::size_t k) {
      regions[k] = GrowRegion(seeds[k].pair, p1, p2, cfg);
      regions[k].seed = seeds[k].match_index;
      grown[k] = true;
    });
  }

  bool have_best = false;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!grown[k]) continue;
    ++result.seeds_tried;
    const double s = HrScore(regions[k], cfg.metric, area1);
    if (!have_best || s > result.score ||
        (s == result.score && regions[k].seed < result.best.seed)) {
      result.best = regions[k];
      result.score = s;
      have_best = true;
    }
  }
  if (cfg.keep_all_regions) {
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (grown[k]) result.all_regions.push_back(std::move(regions[k]));
    }
  }
  return result;
}

TpResult TopoVerify(const FeatureSet& p1, const FeatureSet& p2,
                    const TopoConfig& cfg, double ratio_threshold) {
  cfg.Validate();
  if (p1.empty() || p2.size() < 2) {
    TpResult empty;
    empty.metric = cfg.metric;
    return empty;
  }
  return TopoVerifyMatches(RatioTestMatch(p1, p2, ratio_threshold), p1, p2,
                           cfg);
}

}  // namespace topover
