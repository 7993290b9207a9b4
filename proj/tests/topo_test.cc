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
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"
#include "topover/error.h"
#include "topover/synth.h"
#include "topover/topo.h"

namespace topover {
namespace {

using testing::OneHot;
using testing::OneHotSet;

TopoConfig NoSkip() {
  TopoConfig cfg;
  cfg.skip_covered_seeds = false;
  return cfg;
}

TEST(TopoConfig, Validation) {
  TopoConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.patch_fraction = 1.0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TopoConfig{};
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TopoConfig{};
  cfg.grid = 0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TopoConfig{};
  cfg.overlap_step = 1.0;
  EXPECT_THROW(cfg.Validate(), ParameterError);
  cfg = TopoConfig{};
  cfg.min_overlap = 0.5;  // not below 1 - overlap_step
  EXPECT_THROW(cfg.Validate(), ParameterError);
  EXPECT_EQ(ParseScoreMetric("area"), ScoreMetric::kUnionArea);
  EXPECT_THROW(ParseScoreMetric("size"), ParameterError);
}

TEST(BuildHypotheses, CenteredEqualScales) {
  const FeatureSet p = OneHotSet("p", {{400, 300}, {10, 10}}, 800, 600);
  const auto h = BuildHypotheses({{0, 0, 0.0, 0.1}}, p, p, TopoConfig{});
  ASSERT_EQ(h.size(), 1u);
  const double half = 0.5 * 0.125 * 600;
  EXPECT_EQ(h[0].pair.r1, (Patch{{400, 300}, half, half}));
  EXPECT_EQ(h[0].pair.r2, (Patch{{400, 300}, half, half}));
  EXPECT_FALSE(h[0].pair.score.has_value());
}

TEST(BuildHypotheses, ScaleRatioPropagates) {
  FeatureSet p1("p1", 800, 800, 1), p2("p2", 800, 800, 1);
  p1.Add(Keypoint{100, 100, 2.0, 0}, std::vector<float>{1});
  p2.Add(Keypoint{300, 200, 4.0, 0}, std::vector<float>{1});
  const auto h = BuildHypotheses({{0, 0, 0, 0}}, p1, p2, TopoConfig{});
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h[0].pair.r2.half_w, 2.0 * h[0].pair.r1.half_w);
  EXPECT_DOUBLE_EQ(h[0].pair.r2.half_h, 2.0 * h[0].pair.r1.half_h);
  EXPECT_EQ(h[0].pair.r2.center, (Point2{300, 200}));
}

TEST(BuildHypotheses, CappedInAscendingRatioOrder) {
  const SynthPair pair =
      Generate(testing::Spec(7, SynthRegime::kPlanar, 200));
  auto matches = RatioTestMatch(pair.a, pair.b);
  ASSERT_GE(matches.size(), 40u);
  matches.resize(40);
  // Spread the ratios so the order is informative.
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 0.8);
  for (Match& m : matches) m.ratio = u(rng);
  TopoConfig cfg;
  cfg.max_hypotheses = 32;
  const auto h = BuildHypotheses(matches, pair.a, pair.b, cfg);
  ASSERT_EQ(h.size(), 32u);
  std::vector<std::size_t> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return matches[a].ratio < matches[b].ratio;
  });
  for (std::size_t i = 0; i < 32; ++i) {
    EXPECT_EQ(h[i].match_index, order[i]);
    EXPECT_EQ(h[i].match, matches[order[i]]);
  }
  EXPECT_TRUE(BuildHypotheses({}, pair.a, pair.b, cfg).empty());
}

PatchPair Pair(Point2 c, double half) {
  return PatchPair{Patch{c, half, half}, Patch{c, half, half}, 1.0,
                   LocalMap{c, c, 1.0, 1.0}};
}

TEST(Saccade, UnobstructedNeighborhoodGivesEight) {
  TopoConfig cfg;
  GrowthState s = GrowthState::Start(Pair({500, 500}, 50), cfg);
  s.verified.push_back(Pair({500, 500}, 50));
  const auto c = Saccade(s, cfg, {1000, 1000}, {1000, 1000});
  ASSERT_EQ(c.size(), 8u);
  for (const auto& p : c) {
    EXPECT_NEAR(std::abs(p.r1.center.x - 500) + std::abs(p.r1.center.y - 500),
                p.r1.center.x != 500 && p.r1.center.y != 500 ? 100 : 50,
                1e-9);
    EXPECT_EQ(p.r1.center, p.r2.center);
    EXPECT_FALSE(p.score.has_value());
  }
}

TEST(Saccade, CornerSeedGivesThree) {
  TopoConfig cfg;
  GrowthState s = GrowthState::Start(Pair({0, 0}, 50), cfg);
  s.verified.push_back(Pair({0, 0}, 50));
  const auto c = Saccade(s, cfg, {1000, 1000}, {1000, 1000});
  ASSERT_EQ(c.size(), 3u);
  for (const auto& p : c) {
    EXPECT_GE(p.r1.center.x, 0);
    EXPECT_GE(p.r1.center.y, 0);
  }
}

TEST(Saccade, CandidatesBetweenAdjacentPairsRejected) {
  TopoConfig cfg;
  GrowthState s = GrowthState::Start(Pair({500, 500}, 50), cfg);
  s.verified.push_back(Pair({500, 500}, 50));
  s.verified.push_back(Pair({550, 500}, 50));
  s.MarkVisited({550, 500});
  const auto c = Saccade(s, cfg, {1000, 1000}, {1000, 1000});
  // Offsets (0,+-1) and (1,+-1) touch both pairs; only the outer columns
  // remain.
  ASSERT_EQ(c.size(), 6u);
  for (const auto& p : c) {
    EXPECT_TRUE(p.r1.center.x == 450 || p.r1.center.x == 600)
        << p.r1.center.x;
  }
}

TEST(Saccade, SkipsVisitedAndOutsideImage2) {
  TopoConfig cfg;
  GrowthState s = GrowthState::Start(Pair({500, 500}, 50), cfg);
  PatchPair seed = Pair({500, 500}, 50);
  // Partner sits at the right border of image 2.
  seed.r2.center = {1000, 500};
  seed.map = LocalMap{{500, 500}, {1000, 500}, 1.0, 1.0};
  s.verified.push_back(seed);
  s.MarkVisited({450, 450});
  const auto c = Saccade(s, cfg, {1000, 1000}, {1000, 1000});
  // Column +1 lands fully outside image 2 (left edge at 1000); (-1,-1) is
  // visited.
  EXPECT_EQ(c.size(), 4u);
}

TEST(AdjustPatch, BoundingBoxOfPartners) {
  FeatureSet p2("p2", 200, 200, 1);
  for (Point2 q : {Point2{10, 40}, Point2{30, 60}, Point2{20, 50},
                   Point2{10, 60}}) {
    p2.Add(Keypoint{q.x, q.y, 1, 0}, std::vector<float>{1});
  }
  const Patch r2{{50, 50}, 50, 50};
  std::vector<Match> m;
  for (std::size_t i = 0; i < 4; ++i) m.push_back({i, i, 0, 0});
  const Patch adj = AdjustPatch(r2, r2, m, p2, 4);
  EXPECT_DOUBLE_EQ(adj.center.x, 20);
  EXPECT_DOUBLE_EQ(adj.center.y, 50);
  EXPECT_DOUBLE_EQ(adj.half_w, 10 * 1.05);
  EXPECT_DOUBLE_EQ(adj.half_h, 10 * 1.05);
  EXPECT_LT(adj.right(), 50);  // covers only the left cluster
  EXPECT_EQ(AdjustPatch(r2, r2, {}, p2, 4), r2);
  m.pop_back();
  EXPECT_EQ(AdjustPatch(r2, r2, m, p2, 4), r2);
}

TEST(AdjustPatch, ForeshortenedPairWidthRatio) {
  SynthSpec spec = testing::Spec(13, SynthRegime::kPlanar, 2000);
  spec.anisotropy_range = {0.6, 0.6};
  const SynthPair pair = Generate(spec);
  const auto& t = pair.transforms[0].m;
  ASSERT_NEAR(t[0] / t[4], 0.6, 1e-12);
  const double half = 60;
  int checked = 0;
  for (std::size_t k = 0; k < pair.true_correspondences.size() && checked < 20;
       k += 37) {
    const auto [ia, ib] = pair.true_correspondences[k];
    const Point2 c1 = pair.a.keypoint(ia).location();
    if (c1.x < 200 || c1.x > 800 || c1.y < 200 || c1.y > 800) continue;
    const Patch r1{c1, half, half};
    const Point2 c2 = pair.b.keypoint(ib).location();
    const Patch r2{c2, half, half};
    const auto matches = RestrictedMatch(pair.a, r1, pair.b, r2);
    const Patch adj = AdjustPatch(r1, r2, matches, pair.b, 4);
    // Partner extent per axis relative to the keypoint extent in r1.
    double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
    for (const Match& m : matches) {
      const auto& k1 = pair.a.keypoint(m.idx1);
      x0 = std::min(x0, k1.x);
      x1 = std::max(x1, k1.x);
      y0 = std::min(y0, k1.y);
      y1 = std::max(y1, k1.y);
    }
    const double ratio = (adj.half_w / (x1 - x0)) / (adj.half_h / (y1 - y0));
    EXPECT_NEAR(ratio, 0.6, 0.15 * 0.6);
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(SubPatchCell, RowMajorAndClamped) {
  const Patch p{{15, 15}, 15, 15};
  EXPECT_EQ(SubPatchCell(p, {1, 1}, 3), 0);
  EXPECT_EQ(SubPatchCell(p, {29, 1}, 3), 2);
  EXPECT_EQ(SubPatchCell(p, {1, 29}, 3), 6);
  EXPECT_EQ(SubPatchCell(p, {30, 30}, 3), 8);  // border clamps inward
  EXPECT_EQ(SubPatchCell(p, {15, 15}, 3), 4);
  EXPECT_EQ(SubPatchCell(p, {15, 15}, 1), 0);
}

TEST(Fovea, IdenticalPatchesScoreOne) {
  std::vector<Point2> pts;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
  pts.push_back({0, 0});
  pts.push_back({100, 100});
  const FeatureSet s = OneHotSet("s", pts, 100, 100);
  // r1 equals the margin-expanded bounding box, so the adjusted partner
  // patch reproduces it exactly.
  const Patch r1{{50, 50}, 52.5, 52.5};
  const FoveaResult res = Fovea(r1, r1, s, s, TopoConfig{});
  EXPECT_EQ(res.r2_adjusted, r1);
  EXPECT_DOUBLE_EQ(res.score, 1.0);
  EXPECT_TRUE(res.verified);
  EXPECT_EQ(res.matches.size(), pts.size());
}

TEST(Fovea, EmptyPatchRejected) {
  const FeatureSet s = OneHotSet("s", {{10, 10}, {20, 20}}, 100, 100);
  const Patch r1{{80, 80}, 5, 5};
  const FoveaResult res = Fovea(r1, r1, s, s, TopoConfig{});
  EXPECT_EQ(res.score, 0.0);
  EXPECT_FALSE(res.verified);
  EXPECT_EQ(res.r2_adjusted, r1);
}

TEST(Fovea, HandEnumeratedOneThirdFixture) {
  // Three occupied cells of r1 (0, 4, 8) with three keypoints each; one
  // partner per cell lands in the corresponding cell of r2'.
  const std::vector<Point2> a{{2, 2},   {5, 5},   {8, 8},   {12, 12}, {15, 15},
                              {18, 18}, {22, 22}, {25, 25}, {28, 28}};
  const std::vector<Point2> b{{1, 1},   {15, 5},  {25, 5},  {15, 15}, {5, 15},
                              {25, 15}, {29, 29}, {5, 25},  {15, 25}};
  const FeatureSet p1 = OneHotSet("a", a, 30, 30, 9);
  const FeatureSet p2 = OneHotSet("b", b, 30, 30, 9);
  const Patch r{{15, 15}, 15, 15};
  const FoveaResult res = Fovea(r, r, p1, p2, TopoConfig{});
  ASSERT_EQ(res.matches.size(), 9u);
  EXPECT_EQ(res.occupied_cells, 3u);
  EXPECT_EQ(res.consistent, 3u);
  EXPECT_NEAR(res.score, 1.0 / 3.0, 1e-12);
  EXPECT_TRUE(res.verified);
  TopoConfig strict;
  strict.alpha = 0.34;
  EXPECT_FALSE(Fovea(r, r, p1, p2, strict).verified);
  strict = TopoConfig{};
  strict.min_keypoints_per_patch = 10;
  EXPECT_FALSE(Fovea(r, r, p1, p2, strict).verified);
}

TEST(HrScore, Metrics) {
  HomeomorphismRegion empty;
  EXPECT_EQ(HrScore(empty, ScoreMetric::kPatchCount, 100), 0.0);
  EXPECT_EQ(HrScore(empty, ScoreMetric::kUnionArea, 100), 0.0);
  HomeomorphismRegion r;
  for (int i = 0; i < 7; ++i) {
    r.pairs.push_back(Pair({10.0 * i + 10, 10}, 10));
  }
  r.matched_keypoints = {{0, 0, 0, 0}, {1, 1, 0, 0}, {2, 2, 0, 0}};
  EXPECT_EQ(HrScore(r, ScoreMetric::kPatchCount, 1e4), 7.0);
  EXPECT_EQ(HrScore(r, ScoreMetric::kKeypointCount, 1e4), 3.0);
  // Union of seven 20x20 squares offset by 10: 80 x 20.
  EXPECT_NEAR(HrScore(r, ScoreMetric::kUnionArea, 1e4), 1600.0 / 1e4, 1e-12);
}

TEST(CheckHrValidity, ConstructedViolations) {
  HomeomorphismRegion r;
  r.pairs = {Pair({50, 50}, 20), Pair({70, 50}, 20)};
  EXPECT_TRUE(CheckHrValidity(r, 0.2, 0.25).valid);

  HomeomorphismRegion split = r;
  split.pairs[1].r2.center = {300, 300};  // r1 overlap, r2 disjoint
  const auto rep2 = CheckHrValidity(split, 0.2, 0.25);
  EXPECT_FALSE(rep2.valid);
  EXPECT_EQ(rep2.condition, 2);
  EXPECT_EQ(rep2.first, 0u);
  EXPECT_EQ(rep2.second, 1u);

  HomeomorphismRegion isolated = r;
  isolated.pairs.push_back(Pair({400, 400}, 20));
  const auto rep3 = CheckHrValidity(isolated, 0.2, 0.25);
  EXPECT_FALSE(rep3.valid);
  EXPECT_EQ(rep3.condition, 3);
  EXPECT_EQ(rep3.first, 2u);

  HomeomorphismRegion weak = r;
  weak.pairs[1].score = 0.1;
  EXPECT_EQ(CheckHrValidity(weak, 0.2, 0.25).condition, 1);
  weak.pairs[1].score.reset();
  EXPECT_EQ(CheckHrValidity(weak, 0.2, 0.25).condition, 1);
}

TEST(GrowRegion, RejectedSeedGivesEmptyRegion) {
  const FeatureSet s = OneHotSet("s", {{10, 10}, {20, 20}}, 1000, 1000);
  const PatchPair seed{Patch{{500, 500}, 60, 60}, Patch{{500, 500}, 60, 60},
                       std::nullopt, LocalMap{}};
  EXPECT_TRUE(GrowRegion(seed, s, s, TopoConfig{}).empty());
}

TEST(GrowRegion, PlanarTrueSeedTilesTheOverlap) {
  SynthSpec spec = testing::Spec(7, SynthRegime::kPlanar, 1000);
  spec.scale_range = {0.9, 1.1};
  spec.translation_range = {-0.05, 0.05};
  const SynthPair pair = Generate(spec);
  const auto matches = RatioTestMatch(pair.a, pair.b);
  const auto seeds = BuildHypotheses(matches, pair.a, pair.b, TopoConfig{});
  // First seed that is a true correspondence.
  std::map<std::size_t, std::size_t> truth(pair.true_correspondences.begin(),
                                           pair.true_correspondences.end());
  const Hypothesis* seed = nullptr;
  for (const auto& h : seeds) {
    if (truth.count(h.match.idx1) && truth[h.match.idx1] == h.match.idx2) {
      seed = &h;
      break;
    }
  }
  ASSERT_NE(seed, nullptr);
  const auto region = GrowRegion(seed->pair, pair.a, pair.b, TopoConfig{});
  // Coverage of the textured overlap, estimated on a fine grid.
  Polygon overlap = pair.overlap_polygons[0];
  const Patch& tex = pair.textured_area;
  std::size_t inside = 0, covered = 0;
  for (double y = tex.top() + 2; y < tex.bottom(); y += 4) {
    for (double x = tex.left() + 2; x < tex.right(); x += 4) {
      if (!PointInPolygon(overlap, {x, y})) continue;
      ++inside;
      for (const auto& p : region.pairs) {
        if (p.r1.Contains(x, y)) {
          ++covered;
          break;
        }
      }
    }
  }
  ASSERT_GT(inside, 0u);
  EXPECT_GE(double(covered) / double(inside), 0.6);
  EXPECT_TRUE(CheckHrValidity(region, 0.2, 0.25).valid);
}

TEST(GrowRegion, IsolatedTrapSeedStaysSmall) {
  // A trap seed is isolated when no other trap keypoint lies within one
  // patch side of it in image a. Such seeds should not grow; the rare ones
  // that do leak into the distractor's own window lattice, and no trap
  // region ever approaches the true partner's score.
  std::size_t isolated = 0;
  std::size_t isolated_small = 0;
  std::size_t traps = 0;
  std::size_t small = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SynthPair pair =
        Generate(testing::Spec(seed, SynthRegime::kRepeated, 600));
    const FeatureSet& d = *pair.distractor;
    const TopoConfig cfg;
    const double side = 2.0 * PatchHalfSize(pair.a, cfg);
    const double correct = TopoVerify(pair.a, pair.b, cfg).score;
    ASSERT_FALSE(pair.trap_correspondences.empty());
    for (const auto& [ia, id] : pair.trap_correspondences) {
      bool alone = true;
      for (const auto& other : pair.trap_correspondences) {
        const Keypoint& p = pair.a.keypoint(ia);
        const Keypoint& q = pair.a.keypoint(other.first);
        if (other.first != ia && std::hypot(p.x - q.x, p.y - q.y) < side) {
          alone = false;
        }
      }
      const auto h = BuildHypotheses({Match{ia, id, 0, 0}}, pair.a, d, cfg);
      const auto region = GrowRegion(h[0].pair, pair.a, d, cfg);
      EXPECT_LT(double(region.pairs.size()), 0.5 * correct)
          << "seed " << seed << " trap " << ia;
      ++traps;
      small += region.pairs.size() <= 1;
      isolated += alone;
      isolated_small += alone && region.pairs.size() <= 1;
    }
  }
  ASSERT_GT(isolated, 10u);
  EXPECT_GE(double(isolated_small), 0.85 * double(isolated))
      << isolated_small << " of " << isolated;
  EXPECT_GE(double(small), 0.6 * double(traps)) << small << " of " << traps;
}

TEST(TopoVerify, SelfPairDominatesDistractors) {
  const SynthPair pair =
      Generate(testing::Spec(21, SynthRegime::kRepeated, 500));
  const TopoConfig cfg;
  const TpResult self = TopoVerify(pair.a, pair.a, cfg);
  const TpResult correct = TopoVerify(pair.a, pair.b, cfg);
  const TpResult wrong = TopoVerify(pair.a, *pair.distractor, cfg);
  EXPECT_GT(self.score, correct.score);
  EXPECT_GT(self.score, wrong.score);
  EXPECT_GT(correct.score, wrong.score);
  EXPECT_TRUE(CheckHrValidity(self.best, cfg.alpha, cfg.min_overlap).valid);
}

TEST(TopoVerify, EmptyInputs) {
  FeatureSet empty("e", 100, 100, 4);
  const FeatureSet s = OneHotSet("s", {{10, 10}, {20, 20}}, 100, 100, 4);
  const TpResult r = TopoVerify(empty, s, TopoConfig{});
  EXPECT_EQ(r.score, 0.0);
  EXPECT_TRUE(r.best.empty());
  const TpResult none = TopoVerifyMatches({}, s, s, TopoConfig{});
  EXPECT_EQ(none.score, 0.0);
  EXPECT_EQ(none.seeds_tried, 0u);
}

TEST(TopoVerify, KeypointMetricMatchesRecount) {
  const SynthPair pair =
      Generate(testing::Spec(4, SynthRegime::kMultiplane, 600));
  TopoConfig cfg;
  cfg.metric = ScoreMetric::kKeypointCount;
  const TpResult r = TopoVerify(pair.a, pair.b, cfg);
  ASSERT_FALSE(r.best.empty());
  std::set<std::size_t> recount;
  for (const auto& p : r.best.pairs) {
    for (const Match& m : RestrictedMatch(pair.a, p.r1, pair.b, p.r2)) {
      recount.insert(m.idx1);
    }
  }
  EXPECT_EQ(r.score, double(recount.size()));
  EXPECT_EQ(r.metric, ScoreMetric::kKeypointCount);
}

TEST(TopoVerify, BestHasMaximalScoreAmongAllRegions) {
  const SynthPair pair =
      Generate(testing::Spec(8, SynthRegime::kRepeated, 400));
  TopoConfig cfg = NoSkip();
  cfg.keep_all_regions = true;
  cfg.max_hypotheses = 64;
  const TpResult r = TopoVerify(pair.a, *pair.distractor, cfg);
  ASSERT_FALSE(r.all_regions.empty());
  std::size_t best_seed = r.all_regions[0].seed;
  double best = -1;
  for (const auto& reg : r.all_regions) {
    const double s = HrScore(reg, cfg.metric, 1024.0 * 1024.0);
    EXPECT_LE(s, r.score);
    if (s > best || (s == best && reg.seed < best_seed)) {
      best = s;
      best_seed = reg.seed;
    }
  }
  EXPECT_EQ(best, r.score);
  EXPECT_EQ(best_seed, r.best.seed);
}

TEST(TopoVerify, ThreadsDoNotChangeTheResult) {
  const SynthPair pair =
      Generate(testing::Spec(6, SynthRegime::kMultiplane, 500));
  TopoConfig cfg = NoSkip();
  cfg.max_hypotheses = 48;
  const TpResult one = TopoVerify(pair.a, pair.b, cfg);
  cfg.threads = 4;
  const TpResult four = TopoVerify(pair.a, pair.b, cfg);
  EXPECT_EQ(one.score, four.score);
  EXPECT_EQ(one.best.seed, four.best.seed);
  ASSERT_EQ(one.best.pairs.size(), four.best.pairs.size());
  for (std::size_t i = 0; i < one.best.pairs.size(); ++i) {
    EXPECT_EQ(one.best.pairs[i].r1, four.best.pairs[i].r1);
    EXPECT_EQ(one.best.pairs[i].r2, four.best.pairs[i].r2);
  }
}

TEST(TopoVerify, SpPrefilterKeepsOnlyInlierSeeds) {
  const SynthPair pair =
      Generate(testing::Spec(2, SynthRegime::kRepeated, 400));
  TopoConfig cfg;
  cfg.prefilter_with_sp = true;
  const TpResult r = TopoVerify(pair.a, pair.b, cfg);
  const SpResult sp = SpatialVerify(pair.a, pair.b, SpatialConfig{});
  EXPECT_LE(r.seeds_tried + r.seeds_skipped, sp.inlier_count);
}

}  // namespace
}  // namespace topover
