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

#ifndef TOPOVER_GEOMETRY_H_
#define TOPOVER_GEOMETRY_H_

#include <cmath>
#include <span>
#include <vector>

namespace topover {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Image extent [0, width] x [0, height] in pixels.
struct ImageBounds {
  double width = 0.0;
  double height = 0.0;
};

// Axis-aligned rectangle stored as center and half extents.
struct Patch {
  Point2 center;
  double half_w = 0.0;
  double half_h = 0.0;

  double left() const { return center.x - half_w; }
  double right() const { return center.x + half_w; }
  double top() const { return center.y - half_h; }
  double bottom() const { return center.y + half_h; }
  double area() const { return 4.0 * half_w * half_h; }

  // Closed containment: points on the border are inside. Derived patches
  // often have a border exactly on a keypoint, so the test allows
  // kBorderSlack of rounding noise instead of letting it decide.
  static constexpr double kBorderSlack = 1e-6;
  bool Contains(double x, double y) const {
    return std::abs(x - center.x) <= half_w + kBorderSlack &&
           std::abs(y - center.y) <= half_h + kBorderSlack;
  }
  bool Contains(const Point2& p) const { return Contains(p.x, p.y); }

  bool IsValid() const;

  static Patch FromBox(double x0, double y0, double x1, double y1);

  friend bool operator==(const Patch&, const Patch&) = default;
};

// Two patches overlap when their intersection spans more than
// `min_fraction` of the smaller patch's extent along both axes. With
// min_fraction = 0 this is plain positive-area intersection.
bool Overlaps(const Patch& a, const Patch& b, double min_fraction = 0.0);

// Positive-area intersection with the image rectangle.
bool IntersectsImage(const Patch& p, const ImageBounds& bounds);

// Exact area of the union of rectangles (coordinate compression).
double UnionArea(std::span<const Patch> patches);

// Simple polygon helpers used by the synthetic ground truth.
using Polygon = std::vector<Point2>;

double PolygonArea(const Polygon& poly);
bool PointInPolygon(const Polygon& poly, const Point2& p);
// Clips a polygon against a convex clip polygon (Sutherland-Hodgman).
Polygon ClipConvex(const Polygon& subject, const Polygon& convex_clip);

}  // namespace topover

#endif  // TOPOVER_GEOMETRY_H_
