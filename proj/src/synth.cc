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

#include "topover/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "topover/error.h"
#include "topover/spatial.h"

namespace topover {

std::string ToString(SynthRegime regime) {
  switch (regime) {
    case SynthRegime::kPlanar:
      return "planar";
    case SynthRegime::kMultiplane:
      return "multiplane";
    case SynthRegime::kRepeated:
      return "repeated";
  }
  return "planar";
}

SynthRegime ParseSynthRegime(const std::string& name) {
  if (name == "planar") return SynthRegime::kPlanar;
  if (name == "multiplane") return SynthRegime::kMultiplane;
  if (name == "repeated") return SynthRegime::kRepeated;
  throw ParameterError("unknown regime '" + name +
                       "' (expected planar, multiplane or repeated)");
}

Affine2 Affine2::Inverse() const {
  const double det = Det();
  if (std::abs(det) < 1e-12) throw std::logic_error("singular affine map");
  const double a = m[4] / det;
  const double b = -m[1] / det;
  const double c = -m[3] / det;
  const double d = m[0] / det;
  return Affine2{{a, b, -(a * m[2] + b * m[5]), c, d, -(c * m[2] + d * m[5])}};
}

void SynthSpec::Validate() const {
  auto range_ok = [](const std::pair<double, double>& r) {
    return std::isfinite(r.first) && std::isfinite(r.second) &&
           r.first <= r.second;
  };
  if (keypoint_count < 8) throw ParameterError("keypoint_count must be >= 8");
  if (!(corruption_rate >= 0.0 && corruption_rate < 1.0)) {
    throw ParameterError("corruption_rate must lie in [0, 1)");
  }
  if (!(image_size >= 16.0) || !std::isfinite(image_size)) {
    throw ParameterError("image_size must be >= 16");
  }
  if (descriptor_dim < 1) throw ParameterError("descriptor_dim must be >= 1");
  if (!(descriptor_noise >= 0.0)) {
    throw ParameterError("descriptor_noise must be >= 0");
  }
  if (!range_ok(scale_range) || !(scale_range.first > 0.0)) {
    throw ParameterError("scale_range must be a positive interval");
  }
  if (!range_ok(anisotropy_range) || !(anisotropy_range.first > 0.0)) {
    throw ParameterError("anisotropy_range must be a positive interval");
  }
  if (!range_ok(translation_range) || !range_ok(rotation_range)) {
    throw ParameterError("translation/rotation ranges must be intervals");
  }
  if (regime == SynthRegime::kMultiplane && plane_count < 2) {
    throw ParameterError("multiplane regime needs plane_count >= 2");
  }
  if (plane_count < 1) throw ParameterError("plane_count must be >= 1");
  if (!(fold_compression > 0.0) || !std::isfinite(fold_shear)) {
    throw ParameterError("fold parameters out of range");
  }
  if (!(pattern_period >= 0.0)) {
    throw ParameterError("pattern_period must be >= 0");
  }
  if (!(clutter_fraction >= 0.0)) {
    throw ParameterError("clutter_fraction must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// RNG

double SynthRng::Uniform() {
  return double(engine_() >> 11) * 0x1.0p-53;
}

double SynthRng::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

double SynthRng::Normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(t);
  return r * std::cos(t);
}

std::size_t SynthRng::Below(std::size_t n) {
  if (n <= 1) return 0;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

std::vector<float> SynthRng::UnitVector(std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = Normal();
      norm += x * x;
    }
  } while (norm <= 0.0);
  const double inv = 1.0 / std::sqrt(norm);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = float(v[i] * inv);
  return out;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

struct Point {
  Keypoint kp;
  std::vector<float> desc;
};

std::vector<float> Perturb(SynthRng& rng, const std::vector<float>& d,
                           double noise) {
  if (noise <= 0.0) return d;
  const double per_dim = noise / std::sqrt(double(d.size()));
  std::vector<double> v(d.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    v[i] = d[i] + per_dim * rng.Normal();
    norm += v[i] * v[i];
  }
  const double inv = norm > 0.0 ? 1.0 / std::sqrt(norm) : 1.0;
  std::vector<float> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = float(v[i] * inv);
  return out;
}

template <typename T>
void Shuffle(SynthRng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.Below(i)]);
  }
}

bool InsideImage(const Point2& p, double size) {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= size && p.y <= size;
}

Polygon RectPolygon(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Patch side the default topological configuration uses.
constexpr double kDefaultPatchFraction = 0.125;

// Descriptor noise of the repeated texture.
constexpr double kWindowNoiseA = 0.05;
constexpr double kWindowNoiseB = 0.3;
constexpr double kCleanWindowNoise = 0.02;
// Ratio of wrong-pair to correct-pair SP inliers the trap aims for.
constexpr double kTrapRatio = 1.22;

struct PlaneModel {
  std::vector<Affine2> transforms;
  std::vector<double> plane_x;
  double rotation = 0.0;

  std::size_t PlaneAt(double x) const {
    for (std::size_t p = 0; p + 1 < plane_x.size(); ++p) {
      if (x < plane_x[p + 1]) return p;
    }
    return transforms.size() - 1;
  }
};

PlaneModel DrawPlanes(SynthRng& rng, const SynthSpec& spec,
                      std::size_t planes) {
  const double size = spec.image_size;
  const double c = 0.5 * size;
  const double s = rng.Uniform(spec.scale_range.first, spec.scale_range.second);
  const double aniso =
      rng.Uniform(spec.anisotropy_range.first, spec.anisotropy_range.second);
  const double theta =
      rng.Uniform(spec.rotation_range.first, spec.rotation_range.second);
  const double tx = size * rng.Uniform(spec.translation_range.first,
                                       spec.translation_range.second);
  const double ty = size * rng.Uniform(spec.translation_range.first,
                                       spec.translation_range.second);
  PlaneModel model;
  if (planes <= 1) {
    const double sx = s * aniso;
    const double sy = s;
    const double co = std::cos(theta);
    const double sn = std::sin(theta);
    Affine2 t;
    t.m = {co * sx, -sn * sy, 0.0, sn * sx, co * sy, 0.0};
    t.m[2] = c + tx - (t.m[0] * c + t.m[1] * c);
    t.m[5] = c + ty - (t.m[3] * c + t.m[4] * c);
    model.transforms = {t};
    model.plane_x = {0.0, size};
    model.rotation = theta;
    return model;
  }
  // Folded surface: vertical planes with alternating horizontal
  // compression and vertical shear, continuous at every crease.
  for (std::size_t p = 0; p <= planes; ++p) {
    model.plane_x.push_back(size * double(p) / double(planes));
  }
  std::vector<double> slope_x(planes);
  std::vector<double> slope_y(planes);
  for (std::size_t p = 0; p < planes; ++p) {
    slope_x[p] = s * aniso * (p % 2 == 0 ? 1.0 : spec.fold_compression);
    slope_y[p] = (p % 2 == 0 ? 1.0 : -1.0) * spec.fold_shear;
  }
  // Cumulative offsets at each crease.
  std::vector<double> fx(planes + 1, 0.0);
  std::vector<double> gy(planes + 1, 0.0);
  for (std::size_t p = 0; p < planes; ++p) {
    const double w = model.plane_x[p + 1] - model.plane_x[p];
    fx[p + 1] = fx[p] + slope_x[p] * w;
    gy[p + 1] = gy[p] + slope_y[p] * w;
  }
  const double x_shift = 0.5 * (size - fx[planes]) + tx;
  const auto [gmin, gmax] = std::minmax_element(gy.begin(), gy.end());
  const double y_shift = -0.5 * (*gmin + *gmax) + ty + c - s * c;
  for (std::size_t p = 0; p < planes; ++p) {
    const double x0 = model.plane_x[p];
    Affine2 t;
    t.m = {slope_x[p], 0.0, x_shift + fx[p] - slope_x[p] * x0,
           slope_y[p], s,   y_shift + gy[p] - slope_y[p] * x0};
    model.transforms.push_back(t);
  }
  return model;
}

}  // namespace

std::size_t SynthPair::PlaneAt(double x) const {
  for (std::size_t p = 0; p + 1 < plane_x.size(); ++p) {
    if (x < plane_x[p + 1]) return p;
  }
  return transforms.empty() ? 0 : transforms.size() - 1;
}

SynthPair Generate(const SynthSpec& spec) {
  spec.Validate();
  SynthRng rng(spec.seed);
  const double size = spec.image_size;
  const double margin = 0.05 * size;
  const std::size_t n = spec.keypoint_count;
  const std::size_t dim = spec.descriptor_dim;

  // Image a.
  std::vector<Point> a(n);
  for (Point& p : a) {
    p.kp.x = rng.Uniform(margin, size - margin);
    p.kp.y = rng.Uniform(margin, size - margin);
    p.kp.scale = rng.Uniform(2.0, 8.0);
    p.kp.orientation = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    p.desc = rng.UnitVector(dim);
  }

  SynthPair out;
  out.textured_area = Patch::FromBox(margin, margin, size - margin,
                                     size - margin);

  // Repeated texture: the first `window_points` keypoints of a become
  // windows of a shared motif on a periodic lattice.
  const bool repeated = spec.regime == SynthRegime::kRepeated;
  const double period =
      spec.pattern_period > 0.0 ? spec.pattern_period : 0.2 * size;
  std::size_t window_points = 0;
  std::size_t motif_size = 0;
  std::vector<std::vector<float>> motif;
  std::vector<Point2> motif_offsets;
  std::vector<double> motif_scales;
  std::size_t cols = 0;
  std::size_t rows = 0;
  Point2 lattice_origin;
  if (repeated) {
    const double span = size - 2.0 * margin;
    cols = std::max<std::size_t>(1, std::size_t(span / period));
    rows = cols;
    const std::size_t slots = cols * rows;
    motif_size = std::clamp<std::size_t>(
        std::size_t(std::lround(0.4 * double(n) / double(slots))), 4, 24);
    while (motif_size > 1 && slots * motif_size > n / 2) --motif_size;
    window_points = slots * motif_size;
    lattice_origin = {margin + 0.5 * (span - double(cols) * period),
                      margin + 0.5 * (span - double(rows) * period)};
    const double box = 0.6 * period;
    for (std::size_t j = 0; j < motif_size; ++j) {
      motif.push_back(rng.UnitVector(dim));
      motif_offsets.push_back({rng.Uniform(0.0, box), rng.Uniform(0.0, box)});
      motif_scales.push_back(rng.Uniform(2.0, 8.0));
    }
    std::size_t idx = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const Point2 o{lattice_origin.x + (double(c) + 0.2) * period,
                       lattice_origin.y + (double(r) + 0.2) * period};
        for (std::size_t j = 0; j < motif_size; ++j, ++idx) {
          Point& p = a[idx];
          p.kp.x = o.x + motif_offsets[j].x + rng.Uniform(-1.0, 1.0);
          p.kp.y = o.y + motif_offsets[j].y + rng.Uniform(-1.0, 1.0);
          p.kp.scale = motif_scales[j];
          p.kp.orientation = 0.0;
          p.desc = Perturb(rng, motif[j], kWindowNoiseA);
        }
      }
    }
  }

  // Transforms.
  const std::size_t planes =
      spec.regime == SynthRegime::kPlanar ? 1
      : spec.regime == SynthRegime::kMultiplane
          ? spec.plane_count
          : spec.plane_count;  // repeated: fold when plane_count >= 2
  const PlaneModel model = DrawPlanes(rng, spec, planes);
  out.transforms = model.transforms;
  out.plane_x = model.plane_x;
  for (std::size_t p = 0; p < model.transforms.size(); ++p) {
    const Affine2 inv = model.transforms[p].Inverse();
    Polygon back;
    for (const Point2& q : RectPolygon(0, 0, size, size)) {
      back.push_back(inv.Apply(q));
    }
    Polygon strip =
        RectPolygon(model.plane_x[p], 0.0, model.plane_x[p + 1], size);
    out.overlap_polygons.push_back(ClipConvex(strip, back));
  }

  // Image b: visible keypoints of a, then clutter, then a shuffle.
  std::vector<std::size_t> kept;
  std::vector<Point> b_points;
  std::vector<std::size_t> kept_plane;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t plane = model.PlaneAt(a[i].kp.x);
    const Affine2& t = model.transforms[plane];
    const Point2 q = t.Apply(a[i].kp.location());
    if (!InsideImage(q, size)) continue;
    Point bp;
    bp.kp.x = q.x;
    bp.kp.y = q.y;
    bp.kp.scale = a[i].kp.scale * std::sqrt(std::abs(t.Det()));
    bp.kp.orientation = a[i].kp.orientation + model.rotation;
    kept.push_back(i);
    kept_plane.push_back(plane);
    b_points.push_back(std::move(bp));
  }
  // Corruption applies to the unique (non-window) keypoints.
  std::vector<std::size_t> corruptible;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (kept[k] >= window_points) corruptible.push_back(k);
  }
  const std::size_t corrupt_count = static_cast<std::size_t>(
      std::lround(spec.corruption_rate * double(corruptible.size())));
  Shuffle(rng, corruptible);
  std::vector<bool> corrupted(kept.size(), false);
  for (std::size_t c = 0; c < corrupt_count; ++c) {
    corrupted[corruptible[c]] = true;
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Point& src = a[kept[k]];
    if (corrupted[k]) {
      b_points[k].desc = rng.UnitVector(dim);
    } else if (kept[k] < window_points) {
      b_points[k].desc = Perturb(rng, src.desc, kWindowNoiseB);
    } else {
      b_points[k].desc = Perturb(rng, src.desc, spec.descriptor_noise);
    }
  }
  // One clean copy of a window, half a period off the true lattice.
  std::vector<std::size_t> clean_window;  // positions in b_points
  if (repeated) {
    const Point2 o{lattice_origin.x + 0.7 * period,
                   lattice_origin.y + 0.7 * period};
    for (std::size_t j = 0; j < motif_size; ++j) {
      const Point2 src{o.x + motif_offsets[j].x, o.y + motif_offsets[j].y};
      const Affine2& t = model.transforms[model.PlaneAt(src.x)];
      const Point2 q = t.Apply(src);
      if (!InsideImage(q, size)) continue;
      Point bp;
      bp.kp.x = q.x;
      bp.kp.y = q.y;
      bp.kp.scale = motif_scales[j] * std::sqrt(std::abs(t.Det()));
      bp.kp.orientation = model.rotation;
      bp.desc = Perturb(rng, motif[j], kCleanWindowNoise);
      clean_window.push_back(b_points.size());
      b_points.push_back(std::move(bp));
    }
  }
  const std::size_t clutter =
      static_cast<std::size_t>(std::lround(spec.clutter_fraction * double(n)));
  for (std::size_t c = 0; c < clutter; ++c) {
    Point bp;
    bp.kp.x = rng.Uniform(0.0, size);
    bp.kp.y = rng.Uniform(0.0, size);
    bp.kp.scale = rng.Uniform(2.0, 8.0);
    bp.kp.orientation = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    bp.desc = rng.UnitVector(dim);
    b_points.push_back(std::move(bp));
  }
  std::vector<std::size_t> order(b_points.size());
  std::iota(order.begin(), order.end(), 0);
  Shuffle(rng, order);
  std::vector<std::size_t> position(b_points.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;

  out.a = FeatureSet("synth_a", size, size, dim);
  for (const Point& p : a) out.a.Add(p.kp, p.desc);
  out.b = FeatureSet("synth_b", size, size, dim);
  for (std::size_t k : order) out.b.Add(b_points[k].kp, b_points[k].desc);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.true_correspondences.emplace_back(kept[k], position[k]);
    out.corrupted.push_back(corrupted[k]);
    out.plane_of.push_back(kept_plane[k]);
  }
  for (std::size_t k : clean_window) out.wrong_lattice.push_back(position[k]);
  std::sort(out.wrong_lattice.begin(), out.wrong_lattice.end());

  if (repeated) {
    // Wrong image: unrelated points, its own window lattice, and a sparse
    // trap of near-exact copies of a's unique descriptors placed under one
    // similarity, each surrounded by unrelated texture.
    // The trap outnumbers the correct pair's best single-similarity
    // consensus.
    const std::size_t consensus =
        SpatialVerify(out.a, out.b, SpatialConfig{}).inlier_count;
    const std::size_t target = static_cast<std::size_t>(
        std::ceil(kTrapRatio * double(std::max(motif_size, consensus))));
    Affine2 trap;
    trap.m = {1.0, 0.0, size * rng.Uniform(-0.1, 0.1),
              0.0, 1.0, size * rng.Uniform(-0.1, 0.1)};
    out.trap_transform = trap;

    std::vector<Point> d_points;
    std::vector<std::size_t> unique_idx;
    for (std::size_t i = window_points; i < n; ++i) unique_idx.push_back(i);
    Shuffle(rng, unique_idx);
    // Greedy isolated placement; the spacing shrinks until the trap is
    // large enough or no candidate is left.
    std::vector<std::size_t> trap_src;
    std::vector<bool> taken(n, false);
    for (double min_sep = 0.6 * kDefaultPatchFraction * size;
         trap_src.size() < target && min_sep > 1.0; min_sep *= 0.8) {
      for (std::size_t i : unique_idx) {
        if (trap_src.size() >= target) break;
        if (taken[i]) continue;
        const Point2 q = trap.Apply(a[i].kp.location());
        if (!InsideImage(q, size)) continue;
        bool far = true;
        for (std::size_t j : trap_src) {
          if (std::hypot(a[j].kp.x - a[i].kp.x, a[j].kp.y - a[i].kp.y) <
              min_sep) {
            far = false;
            break;
          }
        }
        if (far) {
          trap_src.push_back(i);
          taken[i] = true;
        }
      }
    }
    for (std::size_t i : trap_src) {
      Point dp;
      dp.kp = a[i].kp;
      const Point2 q = trap.Apply(a[i].kp.location());
      dp.kp.x = q.x;
      dp.kp.y = q.y;
      dp.desc = Perturb(rng, a[i].desc, spec.descriptor_noise);
      d_points.push_back(std::move(dp));
    }
    const double d_period = 1.3 * period;
    const std::size_t d_cols = std::max<std::size_t>(
        1, std::size_t((size - 2.0 * margin) / d_period));
    const Point2 d_origin{margin + rng.Uniform(0.0, 0.3) * d_period,
                          margin + rng.Uniform(0.0, 0.3) * d_period};
    for (std::size_t r = 0; r < d_cols; ++r) {
      for (std::size_t c = 0; c < d_cols; ++c) {
        for (std::size_t j = 0; j < motif_size; ++j) {
          Point dp;
          dp.kp.x = d_origin.x + double(c) * d_period + motif_offsets[j].x;
          dp.kp.y = d_origin.y + double(r) * d_period + motif_offsets[j].y;
          if (!InsideImage(dp.kp.location(), size)) continue;
          dp.kp.scale = motif_scales[j];
          dp.kp.orientation = 0.0;
          dp.desc = Perturb(rng, motif[j], kWindowNoiseB);
          d_points.push_back(std::move(dp));
        }
      }
    }
    while (d_points.size() < n) {
      Point dp;
      dp.kp.x = rng.Uniform(margin, size - margin);
      dp.kp.y = rng.Uniform(margin, size - margin);
      dp.kp.scale = rng.Uniform(2.0, 8.0);
      dp.kp.orientation = rng.Uniform(-std::numbers::pi, std::numbers::pi);
      dp.desc = rng.UnitVector(dim);
      d_points.push_back(std::move(dp));
    }
    std::vector<std::size_t> d_order(d_points.size());
    std::iota(d_order.begin(), d_order.end(), 0);
    Shuffle(rng, d_order);
    std::vector<std::size_t> d_pos(d_points.size());
    for (std::size_t k = 0; k < d_order.size(); ++k) d_pos[d_order[k]] = k;
    FeatureSet d("synth_distractor", size, size, dim);
    for (std::size_t k : d_order) d.Add(d_points[k].kp, d_points[k].desc);
    out.distractor = std::move(d);
    for (std::size_t t = 0; t < trap_src.size(); ++t) {
      out.trap_correspondences.emplace_back(trap_src[t], d_pos[t]);
    }
  }
  return out;
}

nlohmann::json SynthPair::GroundTruthJson() const {
  using nlohmann::json;
  json corr = json::array();
  for (std::size_t k = 0; k < true_correspondences.size(); ++k) {
    corr.push_back(json{{"a", true_correspondences[k].first},
                        {"b", true_correspondences[k].second},
                        {"plane", plane_of[k]},
                        {"corrupted", bool(corrupted[k])}});
  }
  json transforms_json = json::array();
  for (std::size_t p = 0; p < transforms.size(); ++p) {
    transforms_json.push_back(json{{"x_min", plane_x[p]},
                                   {"x_max", plane_x[p + 1]},
                                   {"affine", transforms[p].m}});
  }
  json polys = json::array();
  for (const Polygon& poly : overlap_polygons) {
    json pts = json::array();
    for (const Point2& q : poly) pts.push_back({q.x, q.y});
    polys.push_back(std::move(pts));
  }
  json doc{{"image_a", a.image_id()},
           {"image_b", b.image_id()},
           {"correspondences", std::move(corr)},
           {"transforms", std::move(transforms_json)},
           {"overlap_polygons", std::move(polys)},
           {"textured_area",
            {textured_area.left(), textured_area.top(), textured_area.right(),
             textured_area.bottom()}}};
  if (distractor) {
    json trap = json::array();
    for (const auto& [i, j] : trap_correspondences) {
      trap.push_back(json{{"a", i}, {"distractor", j}});
    }
    doc["distractor"] = json{{"image", distractor->image_id()},
                             {"trap", std::move(trap)},
                             {"trap_affine", trap_transform.m}};
    doc["wrong_lattice_b"] = wrong_lattice;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Oracles

MemoizedFovea::MemoizedFovea(const PatchPair& seed, const TopoConfig& cfg,
                             FoveaFn inner)
    : lattice_(GrowthState::Start(seed, cfg)),
      cfg_(cfg),
      inner_(std::move(inner)) {}

const FoveaResult& MemoizedFovea::Lookup(const PatchPair& candidate) {
  const auto key = lattice_.KeyOf(candidate.r1.center);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, inner_(candidate)).first;
  return it->second;
}

FoveaFn MemoizedFovea::ForAlpha(double alpha) {
  return [this, alpha](const PatchPair& candidate) {
    FoveaResult res = Lookup(candidate);
    res.verified = res.score >= alpha &&
                   res.matches.size() >= cfg_.min_keypoints_per_patch;
    return res;
  };
}

std::vector<PatchPair> BruteForceRegion(const PatchPair& seed,
                                        const LatticeDecision& decisions,
                                        const ImageBounds& bounds1,
                                        const TopoConfig& cfg) {
  const GrowthState lattice = GrowthState::Start(seed, cfg);
  const double hw = seed.r1.half_w;
  const double hh = seed.r1.half_h;
  auto axis_range = [](double origin, double stride, double half,
                       double extent) {
    const auto lo = std::int64_t(std::floor((-half - origin) / stride)) - 1;
    const auto hi =
        std::int64_t(std::ceil((extent + half - origin) / stride)) + 1;
    return std::pair{lo, hi};
  };
  const auto [ilo, ihi] =
      axis_range(lattice.origin.x, lattice.stride_x, hw, bounds1.width);
  const auto [jlo, jhi] =
      axis_range(lattice.origin.y, lattice.stride_y, hh, bounds1.height);

  struct Cell {
    std::int64_t i, j;
    Patch r1;
    FoveaResult res;
  };
  std::vector<Cell> cells;
  std::set<std::int64_t> used_cols;
  std::set<std::int64_t> used_rows;
  for (std::int64_t j = jlo; j <= jhi; ++j) {
    for (std::int64_t i = ilo; i <= ihi; ++i) {
      Patch r1{{lattice.origin.x + double(i) * lattice.stride_x,
                lattice.origin.y + double(j) * lattice.stride_y},
               hw,
               hh};
      if (!(i == 0 && j == 0) && !IntersectsImage(r1, bounds1)) continue;
      used_cols.insert(i);
      used_rows.insert(j);
      cells.push_back({i, j, r1, {}});
    }
  }
  if (used_cols.size() > 64 || used_rows.size() > 64) {
    throw ParameterError("brute-force lattice exceeds 64 x 64 cells");
  }
  for (Cell& c : cells) c.res = decisions(c.r1);

  std::size_t seed_cell = cells.size();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].i == 0 && cells[k].j == 0) seed_cell = k;
  }
  if (seed_cell == cells.size() || !cells[seed_cell].res.verified) return {};

  // Component of the seed in the accepted r1-overlap graph, by pairwise
  // geometric tests.
  std::vector<bool> in(cells.size(), false);
  std::vector<std::size_t> stack{seed_cell};
  in[seed_cell] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < cells.size(); ++v) {
      if (in[v] || !cells[v].res.verified) continue;
      if (Overlaps(cells[u].r1, cells[v].r1, cfg.min_overlap)) {
        in[v] = true;
        stack.push_back(v);
      }
    }
  }
  std::vector<PatchPair> out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!in[k]) continue;
    out.push_back(PatchPair{cells[k].r1, cells[k].res.r2_adjusted,
                            cells[k].res.score, cells[k].res.map});
  }
  for (std::size_t x = 0; x < out.size(); ++x) {
    for (std::size_t y = x + 1; y < out.size(); ++y) {
      if (Overlaps(out[x].r1, out[y].r1, cfg.min_overlap) !=
          Overlaps(out[x].r2, out[y].r2, cfg.min_overlap)) {
        throw std::logic_error(
            "brute-force oracle: accepted component is not topologically "
            "consistent under the supplied decisions");
      }
    }
  }
  return out;
}

}  // namespace topover
