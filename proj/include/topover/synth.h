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

#ifndef TOPOVER_SYNTH_H_
#define TOPOVER_SYNTH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "topover/features.h"
#include "topover/geometry.h"
#include "topover/topo.h"

namespace topover {

enum class SynthRegime { kPlanar, kMultiplane, kRepeated };

std::string ToString(SynthRegime regime);
// Accepts "planar", "multiplane", "repeated". Throws ParameterError.
SynthRegime ParseSynthRegime(const std::string& name);

// 2x3 affine map x' = A x + t, row-major {a, b, tx, c, d, ty}.
struct Affine2 {
  std::array<double, 6> m = {1, 0, 0, 0, 1, 0};

  Point2 Apply(const Point2& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }
  double Det() const { return m[0] * m[4] - m[1] * m[3]; }
  Affine2 Inverse() const;
};

struct SynthSpec {
  std::uint64_t seed = 7;
  SynthRegime regime = SynthRegime::kPlanar;
  std::size_t keypoint_count = 256;
  double image_size = 1024.0;
  std::size_t descriptor_dim = 128;
  // Approximate L2 perturbation of a matched descriptor (unit vectors).
  double descriptor_noise = 0.15;
  // Global zoom, drawn uniformly.
  std::pair<double, double> scale_range = {1.0, 1.0};
  // Horizontal over vertical scale (foreshortening), drawn uniformly.
  std::pair<double, double> anisotropy_range = {1.0, 1.0};
  // Offset of the mapped image center, as a fraction of image_size.
  std::pair<double, double> translation_range = {0.0, 0.0};
  // In-plane rotation in radians, drawn uniformly.
  std::pair<double, double> rotation_range = {0.0, 0.0};
  // Multiplane: number of vertical planes, horizontal compression of every
  // odd plane and the alternating vertical shear.
  std::size_t plane_count = 2;
  double fold_compression = 0.6;
  double fold_shear = 0.12;
  // Repeated: lattice period of the window motif in pixels (0 = 0.2 size).
  double pattern_period = 0.0;
  double corruption_rate = 0.0;
  // Unrelated keypoints added to image b, as a fraction of keypoint_count.
  double clutter_fraction = 0.0;

  void Validate() const;
};

struct SynthPair {
  FeatureSet a;
  FeatureSet b;
  // (index in a, index in b) for every keypoint of a visible in b.
  std::vector<std::pair<std::size_t, std::size_t>> true_correspondences;
  // Parallel to true_correspondences.
  std::vector<bool> corrupted;
  std::vector<std::size_t> plane_of;
  // One transform per plane; plane p covers x in [plane_x[p], plane_x[p+1]]
  // of image a.
  std::vector<Affine2> transforms;
  std::vector<double> plane_x;
  // Region of image a with valid counterparts, one convex piece per plane.
  std::vector<Polygon> overlap_polygons;
  // Rectangle of image a where keypoints were placed.
  Patch textured_area;

  // Repeated regime only: the wrong image of the pair family.
  std::optional<FeatureSet> distractor;
  // (index in a, index in distractor) for the trap structure.
  std::vector<std::pair<std::size_t, std::size_t>> trap_correspondences;
  Affine2 trap_transform;
  // Indices in b of the clean window duplicate at a wrong lattice slot.
  std::vector<std::size_t> wrong_lattice;

  // Plane of a location in image a.
  std::size_t PlaneAt(double x) const;
  nlohmann::json GroundTruthJson() const;
};

// Deterministic in spec.seed: the same spec yields bit-identical output.
// Image a is drawn first from the stream, so specs that differ only in
// the regime share image a.
SynthPair Generate(const SynthSpec& spec);

// Portable generator: mt19937_64 with hand-written distributions (the
// standard distributions are implementation-defined).
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double Uniform();  // [0, 1)
  double Uniform(double lo, double hi);
  double Normal();
  std::size_t Below(std::size_t n);  // [0, n)
  std::vector<float> UnitVector(std::size_t dim);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

// Memoized fovea over the r1 lattice of a seed: the first evaluation of a
// lattice cell is cached and replayed, with the acceptance re-thresholded
// at the alpha passed to ForAlpha.
class MemoizedFovea {
 public:
  MemoizedFovea(const PatchPair& seed, const TopoConfig& cfg, FoveaFn inner);

  FoveaFn ForAlpha(double alpha);
  const FoveaResult& Lookup(const PatchPair& candidate);
  std::size_t cached() const { return cache_.size(); }

 private:
  GrowthState lattice_;
  TopoConfig cfg_;
  FoveaFn inner_;
  std::map<std::pair<std::int64_t, std::int64_t>, FoveaResult> cache_;
};

// Decision oracle for the brute-force search, keyed by image-1 patch.
using LatticeDecision = std::function<FoveaResult(const Patch& r1)>;

// Exhaustive search over the seed's r1 lattice inside bounds1: the
// connected (r1-overlap) set of accepted cells containing the seed, which
// must satisfy topological consistency with the decision's r2 patches.
// Throws ParameterError on lattices above 64 x 64 cells and
// std::logic_error when the accepted component violates consistency.
std::vector<PatchPair> BruteForceRegion(const PatchPair& seed,
                                        const LatticeDecision& decisions,
                                        const ImageBounds& bounds1,
                                        const TopoConfig& cfg);

}  // namespace topover

#endif  // TOPOVER_SYNTH_H_
