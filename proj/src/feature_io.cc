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
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "topover/error.h"
#include "topover/features.h"

namespace topover {

namespace {

constexpr std::string_view kMagic = "TPFV1";

template <typename T>
void AppendNumber(std::string& out, T value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  static_assert(sizeof(T) == 4);
  std::uint32_t bits;
  std::memcpy(&bits, &value, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) |
           ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  char bytes[4];
  std::memcpy(bytes, &bits, 4);
  out.append(bytes, 4);
}

template <typename T>
T ReadLittleEndian(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) |
           ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  T value;
  std::memcpy(&value, &bits, 4);
  return value;
}

// Whitespace tokenizer over one line.
class Tokens {
 public:
  explicit Tokens(std::string_view line) : line_(line) {}

  bool Next(std::string_view& tok) {
    while (pos_ < line_.size() && IsSpace(line_[pos_])) ++pos_;
    if (pos_ >= line_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < line_.size() && !IsSpace(line_[pos_])) ++pos_;
    tok = line_.substr(start, pos_ - start);
    return true;
  }

 private:
  static bool IsSpace(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
  }
  std::string_view line_;
  std::size_t pos_ = 0;
};

template <typename T>
bool ParseNumber(std::string_view tok, T& value) {
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto res = std::from_chars(first, tok.data() + tok.size(), value);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

FeatureSet DecodeText(const std::string& bytes) {
  std::vector<std::string_view> lines;
  {
    std::string_view all(bytes);
    std::size_t start = 0;
    while (start <= all.size()) {
      std::size_t end = all.find('\n', start);
      if (end == std::string_view::npos) end = all.size();
      lines.push_back(all.substr(start, end - start));
      start = end + 1;
    }
  }
  std::size_t li = 0;
  auto blank = [](std::string_view l) {
    return l.find_first_not_of(" \t\r") == std::string_view::npos;
  };
  while (li < lines.size() && blank(lines[li])) ++li;
  if (li >= lines.size()) throw FormatError("feature file: missing header");

  Tokens header(lines[li]);
  std::string_view id, tw, th, tc, td, extra;
  if (!header.Next(id) || !header.Next(tw) || !header.Next(th) ||
      !header.Next(tc) || !header.Next(td) || header.Next(extra)) {
    throw FormatError(
        "feature file header: expected 'image_id width height count dim'");
  }
  double width = 0.0;
  double height = 0.0;
  std::size_t count = 0;
  std::size_t dim = 0;
  if (!ParseNumber(tw, width) || !ParseNumber(th, height) ||
      !ParseNumber(tc, count) || !ParseNumber(td, dim)) {
    throw FormatError("feature file header: malformed number");
  }
  FeatureSet set(std::string(id), width, height, dim);
  std::vector<float> desc(dim);
  ++li;
  for (std::size_t rec = 0; rec < count; ++rec) {
    while (li < lines.size() && blank(lines[li])) ++li;
    if (li >= lines.size()) {
      throw FormatError("feature file: record " + std::to_string(rec + 1) +
                        " missing (header announces " + std::to_string(count) +
                        ")");
    }
    Tokens toks(lines[li++]);
    std::string_view tok;
    double fields[4];
    for (double& f : fields) {
      if (!toks.Next(tok) || !ParseNumber(tok, f)) {
        throw FormatError("feature file: record " + std::to_string(rec + 1) +
                          ": malformed keypoint field");
      }
    }
    std::size_t k = 0;
    while (toks.Next(tok)) {
      if (k >= dim) {
        throw DimensionError("feature file: record " + std::to_string(rec + 1) +
                             " has more than " + std::to_string(dim) +
                             " descriptor entries");
      }
      if (!ParseNumber(tok, desc[k])) {
        throw FormatError("feature file: record " + std::to_string(rec + 1) +
                          ": malformed descriptor entry " + std::to_string(k));
      }
      ++k;
    }
    if (k != dim) {
      throw DimensionError("feature file: record " + std::to_string(rec + 1) +
                           " has " + std::to_string(k) +
                           " descriptor entries, expected " +
                           std::to_string(dim));
    }
    set.Add({fields[0], fields[1], fields[2], fields[3]}, desc);
  }
  while (li < lines.size() && blank(lines[li])) ++li;
  if (li < lines.size()) {
    throw FormatError("feature file: unexpected content after record " +
                      std::to_string(count));
  }
  return set;
}

FeatureSet DecodeBinary(const std::string& bytes, const std::string& id) {
  const std::size_t header = kMagic.size() + 8;
  if (bytes.size() < header) throw FormatError("binary features: truncated");
  const auto count = ReadLittleEndian<std::uint32_t>(bytes.data() + 5);
  const auto dim = ReadLittleEndian<std::uint32_t>(bytes.data() + 9);
  const std::size_t record = 4u * (4u + std::size_t(dim));
  if (bytes.size() != header + record * count) {
    throw FormatError("binary features: size " + std::to_string(bytes.size()) +
                      " does not match count " + std::to_string(count) +
                      " and dim " + std::to_string(dim));
  }
  FeatureSet set(id, 0.0, 0.0, dim);
  std::vector<float> desc(dim);
  double max_x = 0.0;
  double max_y = 0.0;
  const char* p = bytes.data() + header;
  for (std::uint32_t rec = 0; rec < count; ++rec) {
    Keypoint kp;
    kp.x = ReadLittleEndian<float>(p);
    kp.y = ReadLittleEndian<float>(p + 4);
    kp.scale = ReadLittleEndian<float>(p + 8);
    kp.orientation = ReadLittleEndian<float>(p + 12);
    p += 16;
    for (std::uint32_t k = 0; k < dim; ++k, p += 4) {
      desc[k] = ReadLittleEndian<float>(p);
    }
    if (std::isfinite(kp.x)) max_x = std::max(max_x, kp.x);
    if (std::isfinite(kp.y)) max_y = std::max(max_y, kp.y);
    set.Add(kp, desc);
  }
  set.set_extent(std::ceil(max_x), std::ceil(max_y));
  return set;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string EncodeFeaturesText(const FeatureSet& set) {
  if (set.image_id().empty() ||
      set.image_id().find_first_of(" \t\r\n") != std::string::npos) {
    throw FormatError("image id must be a non-empty token without spaces");
  }
  std::string out = set.image_id();
  out += ' ';
  AppendNumber(out, set.width());
  out += ' ';
  AppendNumber(out, set.height());
  out += ' ';
  AppendNumber(out, set.size());
  out += ' ';
  AppendNumber(out, set.dim());
  out += '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Keypoint& kp = set.keypoint(i);
    AppendNumber(out, kp.x);
    out += ' ';
    AppendNumber(out, kp.y);
    out += ' ';
    AppendNumber(out, kp.scale);
    out += ' ';
    AppendNumber(out, kp.orientation);
    for (float v : set.descriptor(i)) {
      out += ' ';
      AppendNumber(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string EncodeFeaturesBinary(const FeatureSet& set) {
  std::string out(kMagic);
  out.reserve(kMagic.size() + 8 + set.size() * 4 * (4 + set.dim()));
  AppendLittleEndian(out, static_cast<std::uint32_t>(set.size()));
  AppendLittleEndian(out, static_cast<std::uint32_t>(set.dim()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Keypoint& kp = set.keypoint(i);
    AppendLittleEndian(out, static_cast<float>(kp.x));
    AppendLittleEndian(out, static_cast<float>(kp.y));
    AppendLittleEndian(out, static_cast<float>(kp.scale));
    AppendLittleEndian(out, static_cast<float>(kp.orientation));
    for (float v : set.descriptor(i)) AppendLittleEndian(out, v);
  }
  return out;
}

FeatureSet DecodeFeatures(const std::string& bytes,
                          const std::string& fallback_id) {
  FeatureSet set = bytes.compare(0, kMagic.size(), kMagic) == 0
                       ? DecodeBinary(bytes, fallback_id)
                       : DecodeText(bytes);
  set.Validate();
  return set;
}

FeatureSet LoadFeatures(const std::filesystem::path& path) {
  const std::string bytes = ReadFile(path);
  try {
    return DecodeFeatures(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

void SaveFeatures(const FeatureSet& set, const std::filesystem::path& path,
                  FeatureFileFormat format) {
  const std::string bytes = format == FeatureFileFormat::kText
                                ? EncodeFeaturesText(set)
                                : EncodeFeaturesBinary(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace topover
