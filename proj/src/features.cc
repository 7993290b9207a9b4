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

#include "topover/features.h"

#include <cmath>
#include <limits>
#include <string>

#include "topover/error.h"

namespace topover {

FeatureSet::FeatureSet(std::string image_id, double width, double height,
                       std::size_t descriptor_dim)
    : image_id_(std::move(image_id)),
      width_(width),
      height_(height),
      dim_(descriptor_dim) {}

void FeatureSet::Add(const Keypoint& kp, std::span<const float> descriptor) {
  if (descriptor.size() != dim_) {
    throw DimensionError("descriptor of keypoint " +
                         std::to_string(keypoints_.size()) + " has " +
                         std::to_string(descriptor.size()) +
                         " entries, expected " + std::to_string(dim_));
  }
  keypoints_.push_back(kp);
  descriptors_.insert(descriptors_.end(), descriptor.begin(),
                      descriptor.end());
}

void FeatureSet::Validate() const {
  if (!std::isfinite(width_) || !std::isfinite(height_) || width_ < 0.0 ||
      height_ < 0.0) {
    throw FormatError("image extent must be finite and non-negative");
  }
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    const Keypoint& kp = keypoints_[i];
    const std::string where = "keypoint " + std::to_string(i);
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y) ||
        !std::isfinite(kp.orientation) || !std::isfinite(kp.scale)) {
      throw FormatError(where + ": non-finite field");
    }
    if (kp.scale <= 0.0) throw FormatError(where + ": scale must be > 0");
    if (kp.x < 0.0 || kp.y < 0.0 || kp.x > width_ || kp.y > height_) {
      throw FormatError(where + ": location outside the image extent");
    }
    for (float v : descriptor(i)) {
      if (!std::isfinite(v)) {
        throw FormatError(where + ": non-finite descriptor entry");
      }
    }
  }
}

void FeatureSet::NormalizeDescriptors() {
  for (std::size_t i = 0; i < size(); ++i) {
    float* d = descriptors_.data() + i * dim_;
    double norm = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) norm += double(d[k]) * d[k];
    if (norm <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm);
    for (std::size_t k = 0; k < dim_; ++k) d[k] = float(d[k] * inv);
  }
}

FeatureSet FeatureSet::CropStrictlyInside(const Patch& box) const {
  FeatureSet out(image_id_, width_, height_, dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    const Keypoint& kp = keypoints_[i];
    if (kp.x > box.left() && kp.x < box.right() && kp.y > box.top() &&
        kp.y < box.bottom()) {
      out.Add(kp, descriptor(i));
    }
  }
  return out;
}

std::vector<std::size_t> FeatureSet::IndicesInside(const Patch& patch) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    if (patch.Contains(keypoints_[i].x, keypoints_[i].y)) out.push_back(i);
  }
  return out;
}

float SquaredDistance(std::span<const float> a, std::span<const float> b) {
  // Fixed-order partial sums: vectorizes without reassociation flags and
  // gives the same value on every run.
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  const std::size_t n = a.size();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    for (int j = 0; j < 8; ++j) {
      const float d = a[k + j] - b[k + j];
      acc[j] += d * d;
    }
  }
  float tail = 0.0f;
  for (; k < n; ++k) {
    const float d = a[k] - b[k];
    tail += d * d;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

namespace {

struct Nearest {
  std::size_t index = 0;
  float best = std::numeric_limits<float>::infinity();
  float second = std::numeric_limits<float>::infinity();
  bool found = false;
};

// Strict comparisons keep the lowest index on ties.
template <typename IndexRange>
Nearest FindNearest(std::span<const float> query, const FeatureSet& p2,
                    const IndexRange& candidates) {
  Nearest nn;
  for (std::size_t j : candidates) {
    const float d = SquaredDistance(query, p2.descriptor(j));
    if (!nn.found || d < nn.best) {
      nn.second = nn.best;
      nn.best = d;
      nn.index = j;
      nn.found = true;
    } else if (d < nn.second) {
      nn.second = d;
    }
  }
  return nn;
}

double RatioOf(const Nearest& nn) {
  if (!std::isfinite(nn.second)) return 0.0;
  if (nn.second <= 0.0f) return 1.0;  // both neighbors identical
  return std::sqrt(double(nn.best) / double(nn.second));
}

struct IotaRange {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() {
      ++i;
      return *this;
    }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

}  // namespace

std::vector<Match> RatioTestMatch(const FeatureSet& p1, const FeatureSet& p2,
                                  double ratio_threshold) {
  if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) {
    throw ParameterError("ratio threshold must lie in (0, 1]");
  }
  if (p2.size() < 2) {
    throw InsufficientFeaturesError(
        "ratio test needs at least two keypoints in the second set");
  }
  if (p1.dim() != p2.dim()) {
    throw DimensionError("descriptor dimensions differ: " +
                         std::to_string(p1.dim()) + " vs " +
                         std::to_string(p2.dim()));
  }
  std::vector<Match> out;
  const IotaRange all{p2.size()};
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const Nearest nn = FindNearest(p1.descriptor(i), p2, all);
    const double ratio = RatioOf(nn);
    if (ratio <= ratio_threshold) {
      out.push_back({i, nn.index, std::sqrt(double(nn.best)), ratio});
    }
  }
  return out;
}

std::vector<Match> RestrictedMatch(const FeatureSet& p1,
                                   std::span<const std::size_t> in_r1,
                                   const FeatureSet& p2,
                                   std::span<const std::size_t> in_r2) {
  std::vector<Match> out;
  if (in_r1.empty() || in_r2.empty()) return out;
  if (p1.dim() != p2.dim()) {
    throw DimensionError("descriptor dimensions differ");
  }
  out.reserve(in_r1.size());
  for (std::size_t i : in_r1) {
    const Nearest nn = FindNearest(p1.descriptor(i), p2, in_r2);
    out.push_back({i, nn.index, std::sqrt(double(nn.best)), RatioOf(nn)});
  }
  return out;
}

std::vector<Match> RestrictedMatch(const FeatureSet& p1, const Patch& r1,
                                   const FeatureSet& p2, const Patch& r2) {
  const auto in_r1 = p1.IndicesInside(r1);
  const auto in_r2 = p2.IndicesInside(r2);
  return RestrictedMatch(p1, in_r1, p2, in_r2);
}

}  // namespace topover
