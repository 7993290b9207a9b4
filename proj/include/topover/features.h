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

#ifndef TOPOVER_FEATURES_H_
#define TOPOVER_FEATURES_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topover/geometry.h"

namespace topover {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 1.0;        // characteristic radius in pixels
  double orientation = 0.0;  // radians

  Point2 location() const { return {x, y}; }
};

// Keypoints of one image with a parallel, row-major descriptor matrix.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::string image_id, double width, double height,
             std::size_t descriptor_dim);

  const std::string& image_id() const { return image_id_; }
  double width() const { return width_; }
  double height() const { return height_; }
  ImageBounds bounds() const { return {width_, height_}; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keypoints_.size(); }
  bool empty() const { return keypoints_.empty(); }

  const std::vector<Keypoint>& keypoints() const { return keypoints_; }
  const Keypoint& keypoint(std::size_t i) const { return keypoints_[i]; }
  std::span<const float> descriptor(std::size_t i) const {
    return {descriptors_.data() + i * dim_, dim_};
  }
  const std::vector<float>& descriptor_data() const { return descriptors_; }

  // Throws DimensionError when descriptor.size() != dim().
  void Add(const Keypoint& kp, std::span<const float> descriptor);

  void set_image_id(std::string id) { image_id_ = std::move(id); }
  void set_extent(double width, double height) {
    width_ = width;
    height_ = height;
  }

  // Throws FormatError naming the first offending keypoint.
  void Validate() const;

  // Rescales every descriptor to unit L2 norm (zero vectors untouched).
  void NormalizeDescriptors();

  // Keeps only keypoints strictly inside the rectangle.
  FeatureSet CropStrictlyInside(const Patch& box) const;

  // Indices of keypoints inside `patch` (closed), ascending.
  std::vector<std::size_t> IndicesInside(const Patch& patch) const;

 private:
  std::string image_id_;
  double width_ = 0.0;
  double height_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<Keypoint> keypoints_;
  std::vector<float> descriptors_;
};

struct Match {
  std::size_t idx1 = 0;
  std::size_t idx2 = 0;
  double distance = 0.0;
  double ratio = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

enum class FeatureFileFormat { kText, kBinary };

// Reads either feature file form; the binary form is recognized by its
// magic bytes. Binary files carry no image id or extent, so the id is the
// file stem and the extent is the keypoint bounding extent.
FeatureSet LoadFeatures(const std::filesystem::path& path);
void SaveFeatures(const FeatureSet& set, const std::filesystem::path& path,
                  FeatureFileFormat format);

// Serialized forms, exposed for in-memory round trips.
std::string EncodeFeaturesText(const FeatureSet& set);
std::string EncodeFeaturesBinary(const FeatureSet& set);
FeatureSet DecodeFeatures(const std::string& bytes,
                          const std::string& fallback_id);

// Squared L2 distance.
float SquaredDistance(std::span<const float> a, std::span<const float> b);

inline constexpr double kDefaultRatioThreshold = 0.8;

// Nearest / second-nearest ratio test. One match per accepted keypoint of
// p1, sorted by idx1. Nearest-neighbor ties go to the lowest p2 index.
std::vector<Match> RatioTestMatch(const FeatureSet& p1, const FeatureSet& p2,
                                  double ratio_threshold =
                                      kDefaultRatioThreshold);

// For each keypoint of p1 inside r1, its nearest neighbor among the
// keypoints of p2 inside r2. No ratio test; ratio is reported as
// nearest/second-nearest when a second neighbor exists, else 0.
std::vector<Match> RestrictedMatch(const FeatureSet& p1, const Patch& r1,
                                   const FeatureSet& p2, const Patch& r2);

// Same as RestrictedMatch with precomputed index lists (ascending).
std::vector<Match> RestrictedMatch(const FeatureSet& p1,
                                   std::span<const std::size_t> in_r1,
                                   const FeatureSet& p2,
                                   std::span<const std::size_t> in_r2);

}  // namespace topover

#endif  // TOPOVER_FEATURES_H_
