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
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"
#include "topover/error.h"
#include "topover/synth.h"
#include "topover/topo.h"

namespace topover {
namespace {

std::string Encode(const SynthPair& p) {
  std::string s = EncodeFeaturesText(p.a) + EncodeFeaturesText(p.b);
  if (p.distractor) s += EncodeFeaturesText(*p.distractor);
  return s + p.GroundTruthJson().dump();
}

TEST(SynthSpec, Validation) {
  SynthSpec s;
  EXPECT_NO_THROW(s.Validate());
  s.corruption_rate = 1.0;
  EXPECT_THROW(Generate(s), ParameterError);
  s = SynthSpec{};
  s.keypoint_count = 7;
  EXPECT_THROW(Generate(s), ParameterError);
  s = SynthSpec{};
  s.scale_range = {0.0, 1.0};
  EXPECT_THROW(Generate(s), ParameterError);
  s = SynthSpec{};
  s.regime = SynthRegime::kMultiplane;
  s.plane_count = 1;
  EXPECT_THROW(Generate(s), ParameterError);
  EXPECT_THROW(ParseSynthRegime("spherical"), ParameterError);
  EXPECT_EQ(ParseSynthRegime("repeated"), SynthRegime::kRepeated);
}

TEST(SynthRng, PortableSequence) {
  // mt19937_64 reference value for seed 5489 (10000th output).
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ull);
  SynthRng a(3), b(3);
  for (int i = 0; i < 100; ++i) {
    const double u = a.Uniform();
    EXPECT_EQ(u, b.Uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.Below(7), 7u);
    b.Below(7);
  }
  const auto v = a.UnitVector(16);
  double n = 0;
  for (float x : v) n += double(x) * x;
  EXPECT_NEAR(n, 1.0, 1e-6);
}

TEST(Generate, BitDeterministicInSeed) {
  for (SynthRegime r : {SynthRegime::kPlanar, SynthRegime::kMultiplane,
                        SynthRegime::kRepeated}) {
    SynthSpec spec = testing::Spec(7, r, 200);
    spec.corruption_rate = 0.1;
    spec.clutter_fraction = 0.1;
    EXPECT_EQ(Encode(Generate(spec)), Encode(Generate(spec)));
    SynthSpec other = spec;
    other.seed = 8;
    EXPECT_NE(Encode(Generate(spec)), Encode(Generate(other)));
  }
}

TEST(Generate, PlanarAndMultiplaneShareImageA) {
  const SynthPair p = Generate(testing::Spec(5, SynthRegime::kPlanar, 100));
  const SynthPair m =
      Generate(testing::Spec(5, SynthRegime::kMultiplane, 100));
  EXPECT_EQ(EncodeFeaturesText(p.a), EncodeFeaturesText(m.a));
}

TEST(Generate, IdentityRegimeReproducesImageA) {
  SynthSpec spec = testing::Spec(7, SynthRegime::kPlanar, 100);
  spec.descriptor_noise = 0.0;
  const SynthPair pair = Generate(spec);
  ASSERT_EQ(pair.a.size(), pair.b.size());
  ASSERT_EQ(pair.true_correspondences.size(), pair.a.size());
  for (const auto& [ia, ib] : pair.true_correspondences) {
    const Keypoint& ka = pair.a.keypoint(ia);
    const Keypoint& kb = pair.b.keypoint(ib);
    EXPECT_EQ(ka.x, kb.x);
    EXPECT_EQ(ka.y, kb.y);
    EXPECT_EQ(ka.scale, kb.scale);
    EXPECT_EQ(ka.orientation, kb.orientation);
    EXPECT_TRUE(std::equal(pair.a.descriptor(ia).begin(),
                           pair.a.descriptor(ia).end(),
                           pair.b.descriptor(ib).begin()));
  }
}

class RegimeTest : public ::testing::TestWithParam<SynthRegime> {};

TEST_P(RegimeTest, CorrespondencesFollowTheirPlane) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthSpec spec = testing::Spec(seed, GetParam(), 300);
    spec.scale_range = {0.7, 1.3};
    spec.anisotropy_range = {0.8, 1.2};
    spec.translation_range = {-0.1, 0.1};
    if (GetParam() == SynthRegime::kPlanar) spec.rotation_range = {-0.4, 0.4};
    spec.corruption_rate = 0.2;
    const SynthPair pair = Generate(spec);
    ASSERT_EQ(pair.plane_of.size(), pair.true_correspondences.size());
    for (std::size_t k = 0; k < pair.true_correspondences.size(); ++k) {
      const auto [ia, ib] = pair.true_correspondences[k];
      const Point2 pa = pair.a.keypoint(ia).location();
      EXPECT_EQ(pair.PlaneAt(pa.x), pair.plane_of[k]);
      const Point2 q = pair.transforms[pair.plane_of[k]].Apply(pa);
      const Keypoint& kb = pair.b.keypoint(ib);
      EXPECT_LE(std::hypot(q.x - kb.x, q.y - kb.y), 1.0);
    }
    std::size_t corrupted = std::count(pair.corrupted.begin(),
                                       pair.corrupted.end(), true);
    EXPECT_GT(corrupted, 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(AllRegimes, RegimeTest,
                         ::testing::Values(SynthRegime::kPlanar,
                                           SynthRegime::kMultiplane,
                                           SynthRegime::kRepeated));

// Least-squares affine through correspondences, or nullopt if degenerate.
std::optional<Affine2> FitAffine(const std::vector<Point2>& a,
                                 const std::vector<Point2>& b) {
  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, n = double(a.size());
  for (const auto& p : a) {
    sxx += p.x * p.x;
    sxy += p.x * p.y;
    syy += p.y * p.y;
    sx += p.x;
    sy += p.y;
  }
  // Normal equations with matrix [[sxx sxy sx][sxy syy sy][sx sy n]].
  const double m[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-9) return std::nullopt;
  Affine2 out;
  for (int row = 0; row < 2; ++row) {
    double r[3] = {0, 0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = row == 0 ? b[i].x : b[i].y;
      r[0] += a[i].x * v;
      r[1] += a[i].y * v;
      r[2] += v;
    }
    // Cramer's rule.
    for (int c = 0; c < 3; ++c) {
      double mc[3][3];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) mc[i][j] = j == c ? r[i] : m[i][j];
      }
      const double dc =
          mc[0][0] * (mc[1][1] * mc[2][2] - mc[1][2] * mc[2][1]) -
          mc[0][1] * (mc[1][0] * mc[2][2] - mc[1][2] * mc[2][0]) +
          mc[0][2] * (mc[1][0] * mc[2][1] - mc[1][1] * mc[2][0]);
      out.m[row * 3 + c] = dc / det;
    }
  }
  return out;
}

TEST(Generate, MultiplaneIsNotGloballyAffine) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthPair pair =
        Generate(testing::Spec(seed, SynthRegime::kMultiplane, 300));
    ASSERT_EQ(pair.transforms.size(), 2u);
    std::vector<Point2> a, b;
    for (const auto& [ia, ib] : pair.true_correspondences) {
      a.push_back(pair.a.keypoint(ia).location());
      b.push_back(pair.b.keypoint(ib).location());
    }
    auto fraction = [&](const Affine2& t) {
      std::size_t ok = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const Point2 q = t.Apply(a[i]);
        if (std::hypot(q.x - b[i].x, q.y - b[i].y) < 4.0) ++ok;
      }
      return double(ok) / double(a.size());
    };
    std::vector<Affine2> candidates(pair.transforms.begin(),
                                    pair.transforms.end());
    if (auto fit = FitAffine(a, b)) candidates.push_back(*fit);
    // Affines through random triples of correspondences.
    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
    for (int t = 0; t < 3000; ++t) {
      std::vector<Point2> ta, tb;
      for (int k = 0; k < 3; ++k) {
        const std::size_t i = pick(rng);
        ta.push_back(a[i]);
        tb.push_back(b[i]);
      }
      if (auto fit = FitAffine(ta, tb)) candidates.push_back(*fit);
    }
    for (const Affine2& t : candidates) EXPECT_LT(fraction(t), 0.8);
    // Each plane's own transform is exact on its points.
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Point2 q = pair.transforms[pair.plane_of[k]].Apply(a[k]);
      EXPECT_LT(std::hypot(q.x - b[k].x, q.y - b[k].y), 1.0);
    }
  }
}

TEST(Generate, PlanarCorrespondencesSurviveRatioTest) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthPair pair =
        Generate(testing::Spec(seed, SynthRegime::kPlanar, 300));
    std::map<std::size_t, std::size_t> found;
    for (const Match& m : RatioTestMatch(pair.a, pair.b, 0.8)) {
      found[m.idx1] = m.idx2;
    }
    for (const auto& [ia, ib] : pair.true_correspondences) {
      ASSERT_TRUE(found.count(ia));
      EXPECT_EQ(found[ia], ib);
    }
  }
}

TEST(Generate, RepeatedRegimeLuresMatchesToWrongLattice) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthPair pair =
        Generate(testing::Spec(seed, SynthRegime::kRepeated, 600));
    ASSERT_TRUE(pair.distractor.has_value());
    ASSERT_FALSE(pair.trap_correspondences.empty());
    std::map<std::size_t, std::size_t> truth(
        pair.true_correspondences.begin(), pair.true_correspondences.end());
    const std::set<std::size_t> wrong(pair.wrong_lattice.begin(),
                                      pair.wrong_lattice.end());
    std::size_t lured = 0;
    for (const Match& m : RatioTestMatch(pair.a, pair.b)) {
      if (wrong.count(m.idx2) && truth[m.idx1] != m.idx2) ++lured;
    }
    EXPECT_GE(double(lured), 0.2 * double(pair.a.size()));
    // The trap is an exact similarity copy.
    for (const auto& [ia, id] : pair.trap_correspondences) {
      const Point2 q =
          pair.trap_transform.Apply(pair.a.keypoint(ia).location());
      const Keypoint& kd = pair.distractor->keypoint(id);
      EXPECT_LT(std::hypot(q.x - kd.x, q.y - kd.y), 1e-9);
    }
  }
}

TEST(Generate, OverlapPolygonsAndGroundTruthJson) {
  SynthSpec spec = testing::Spec(3, SynthRegime::kMultiplane, 100);
  spec.translation_range = {0.2, 0.2};
  const SynthPair pair = Generate(spec);
  ASSERT_EQ(pair.overlap_polygons.size(), 2u);
  for (std::size_t k = 0; k < pair.true_correspondences.size(); ++k) {
    const Point2 pa =
        pair.a.keypoint(pair.true_correspondences[k].first).location();
    // Visible keypoints lie in (or on the border of) their plane's polygon.
    const auto& poly = pair.overlap_polygons[pair.plane_of[k]];
    EXPECT_TRUE(PointInPolygon(poly, pa));
  }
  const double total = PolygonArea(pair.overlap_polygons[0]) +
                       PolygonArea(pair.overlap_polygons[1]);
  EXPECT_GT(total, 0.3 * 1024 * 1024);
  EXPECT_LT(total, 1024.0 * 1024.0);
  const auto gt = pair.GroundTruthJson();
  EXPECT_EQ(gt["correspondences"].size(), pair.true_correspondences.size());
  EXPECT_EQ(gt["transforms"].size(), 2u);
  EXPECT_EQ(gt["overlap_polygons"].size(), 2u);
  EXPECT_FALSE(gt.contains("distractor"));
}

// ---------------------------------------------------------------------------
// Brute-force oracle

FoveaResult MaskDecision(bool accept, const Patch& r1) {
  FoveaResult res;
  res.r2_adjusted = r1;
  res.score = accept ? 1.0 : 0.0;
  res.verified = accept;
  res.matches.assign(4, Match{});
  return res;
}

PatchPair Seed(Point2 c) {
  return PatchPair{Patch{c, 10, 10}, Patch{c, 10, 10}, std::nullopt,
                   LocalMap{c, c, 1, 1}};
}

TEST(BruteForceRegion, AllAcceptSaturates3x3) {
  TopoConfig cfg;
  const auto all = BruteForceRegion(
      Seed({10, 10}), [](const Patch& r1) { return MaskDecision(true, r1); },
      {20, 20}, cfg);
  EXPECT_EQ(all.size(), 9u);
  const auto none = BruteForceRegion(
      Seed({10, 10}), [](const Patch& r1) { return MaskDecision(false, r1); },
      {20, 20}, cfg);
  EXPECT_TRUE(none.empty());
}

TEST(BruteForceRegion, RefusesLargeLattices) {
  EXPECT_THROW(BruteForceRegion(
                   Seed({10, 10}),
                   [](const Patch& r1) { return MaskDecision(true, r1); },
                   {700, 20}, TopoConfig{}),
               ParameterError);
}

TEST(BruteForceRegion, InconsistentDecisionsAreAnInvariantViolation) {
  // Every accepted r2 sits at the same place: r1 neighbors two strides
  // apart do not overlap while their r2 do.
  EXPECT_THROW(BruteForceRegion(
                   Seed({10, 10}),
                   [](const Patch& r1) {
                     FoveaResult res = MaskDecision(true, r1);
                     res.r2_adjusted = Patch{{0, 0}, 10, 10};
                     return res;
                   },
                   {20, 20}, TopoConfig{}),
               std::logic_error);
}

TEST(MemoizedFovea, CachesPerLatticeCellAndRethresholds) {
  TopoConfig cfg;
  int calls = 0;
  MemoizedFovea memo(Seed({20, 20}), cfg, [&](const PatchPair& c) {
    ++calls;
    FoveaResult res = MaskDecision(true, c.r1);
    res.score = 0.3;
    res.matches.assign(5, Match{});
    return res;
  });
  const PatchPair cand = Seed({30, 20});
  EXPECT_TRUE(memo.ForAlpha(0.2)(cand).verified);
  EXPECT_FALSE(memo.ForAlpha(0.4)(cand).verified);
  PatchPair nudged = cand;
  nudged.r1.center.x += 1e-9;
  memo.Lookup(nudged);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(memo.cached(), 1u);
}

std::set<std::pair<long, long>> Keys(const std::vector<PatchPair>& pairs) {
  std::set<std::pair<long, long>> out;
  for (const auto& p : pairs) {
    out.insert({std::lround(p.r1.center.x), std::lround(p.r1.center.y)});
  }
  return out;
}

TEST(BruteForceRegion, EqualsGrowRegionOnRandomMasks) {
  std::mt19937_64 rng(2024);
  TopoConfig cfg;
  cfg.skip_covered_seeds = false;
  const ImageBounds bounds{40, 40};
  for (int trial = 0; trial < 100; ++trial) {
    std::bernoulli_distribution accept(0.3 + 0.5 * (trial % 5) / 4.0);
    std::map<std::pair<long, long>, bool> mask;
    for (long y = 0; y <= 40; y += 10) {
      for (long x = 0; x <= 40; x += 10) mask[{x, y}] = accept(rng);
    }
    std::uniform_int_distribution<int> cell(0, 4);
    const Point2 c{10.0 * cell(rng), 10.0 * cell(rng)};
    LatticeDecision decide = [&](const Patch& r1) {
      return MaskDecision(
          mask.at({std::lround(r1.center.x), std::lround(r1.center.y)}), r1);
    };
    MemoizedFovea memo(Seed(c), cfg, [&](const PatchPair& cand) {
      return decide(cand.r1);
    });
    const auto brute = BruteForceRegion(Seed(c), decide, bounds, cfg);
    const auto grown =
        GrowRegionWith(Seed(c), memo.ForAlpha(cfg.alpha), cfg, bounds, bounds);
    EXPECT_EQ(Keys(brute), Keys(grown.pairs)) << "trial " << trial;
    EXPECT_EQ(brute.size(), grown.pairs.size());
  }
}

}  // namespace
}  // namespace topover
