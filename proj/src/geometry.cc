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

#include "topover/geometry.h"

#include <algorithm>
#include <cmath>

namespace topover {

bool Patch::IsValid() const {
  return std::isfinite(center.x) && std::isfinite(center.y) &&
         std::isfinite(half_w) && std::isfinite(half_h) && half_w > 0.0 &&
         half_h > 0.0;
}

Patch Patch::FromBox(double x0, double y0, double x1, double y1) {
  return Patch{{0.5 * (x0 + x1), 0.5 * (y0 + y1)},
               0.5 * std::abs(x1 - x0),
               0.5 * std::abs(y1 - y0)};
}

bool Overlaps(const Patch& a, const Patch& b, double min_fraction) {
  const double ix =
      std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy =
      std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) return false;
  if (min_fraction <= 0.0) return true;
  const double wx = 2.0 * std::min(a.half_w, b.half_w);
  const double wy = 2.0 * std::min(a.half_h, b.half_h);
  return ix > min_fraction * wx && iy > min_fraction * wy;
}

bool IntersectsImage(const Patch& p, const ImageBounds& bounds) {
  const double ix = std::min(p.right(), bounds.width) - std::max(p.left(), 0.0);
  const double iy =
      std::min(p.bottom(), bounds.height) - std::max(p.top(), 0.0);
  return ix > 0.0 && iy > 0.0;
}

double UnionArea(std::span<const Patch> patches) {
  if (patches.empty()) return 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(2 * patches.size());
  ys.reserve(2 * patches.size());
  for (const auto& p : patches) {
    xs.push_back(p.left());
    xs.push_back(p.right());
    ys.push_back(p.top());
    ys.push_back(p.bottom());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mx = 0.5 * (xs[i] + xs[i + 1]);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double my = 0.5 * (ys[j] + ys[j + 1]);
      for (const auto& p : patches) {
        if (mx > p.left() && mx < p.right() && my > p.top() &&
            my < p.bottom()) {
          area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
          break;
        }
      }
    }
  }
  return area;
}

double PolygonArea(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

bool PointInPolygon(const Polygon& poly, const Point2& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

namespace {

double Cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Point2 LineIntersection(const Point2& p, const Point2& q, const Point2& a,
                        const Point2& b) {
  const double a1 = q.y - p.y;
  const double b1 = p.x - q.x;
  const double c1 = a1 * p.x + b1 * p.y;
  const double a2 = b.y - a.y;
  const double b2 = a.x - b.x;
  const double c2 = a2 * a.x + b2 * a.y;
  const double det = a1 * b2 - a2 * b1;
  return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

}  // namespace

Polygon ClipConvex(const Polygon& subject, const Polygon& convex_clip) {
  if (subject.empty() || convex_clip.size() < 3) return {};
  // Orientation of the clip polygon decides which side is inside.
  double signed_area = 0.0;
  for (std::size_t i = 0; i < convex_clip.size(); ++i) {
    const Point2& a = convex_clip[i];
    const Point2& b = convex_clip[(i + 1) % convex_clip.size()];
    signed_area += a.x * b.y - b.x * a.y;
  }
  const double sign = signed_area >= 0.0 ? 1.0 : -1.0;

  Polygon output = subject;
  for (std::size_t i = 0; i < convex_clip.size() && !output.empty(); ++i) {
    const Point2& a = convex_clip[i];
    const Point2& b = convex_clip[(i + 1) % convex_clip.size()];
    Polygon input = std::move(output);
    output.clear();
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Point2& cur = input[j];
      const Point2& prev = input[(j + input.size() - 1) % input.size()];
      const bool cur_in = sign * Cross(a, b, cur) >= 0.0;
      const bool prev_in = sign * Cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(LineIntersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(LineIntersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

}  // namespace topover
