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

#ifndef TOPOVER_RETRIEVAL_H_
#define TOPOVER_RETRIEVAL_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topover/features.h"
#include "topover/spatial.h"
#include "topover/topo.h"

namespace topover {

struct QueryTruth {
  std::string id;
  std::optional<Patch> bbox;
  std::set<std::string> easy;
  std::set<std::string> hard;
  std::set<std::string> junk;
};

class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(std::vector<QueryTruth> queries);

  // JSON: {"queries": [{"id", "bbox"?: [x0,y0,x1,y1], "easy": [],
  // "hard": [], "junk": []}]}. Throws FormatError.
  static GroundTruth Load(const std::filesystem::path& path);
  static GroundTruth FromJson(const std::string& text);

  const QueryTruth* Find(const std::string& id) const;
  const std::vector<QueryTruth>& queries() const { return queries_; }

 private:
  std::vector<QueryTruth> queries_;
};

struct Candidate {
  std::string id;
  std::optional<double> score;
};

struct RankedList {
  std::string query_id;
  std::vector<Candidate> candidates;

  std::vector<std::string> Ids() const;
};

// Text form, one query per line: "query_id: img1 img2 ...".
std::vector<RankedList> ParseRankings(const std::string& text);
std::vector<RankedList> LoadRankings(const std::filesystem::path& path);
std::string FormatRankings(const std::vector<RankedList>& lists);

enum class Protocol { kMedium, kHard };
std::string ToString(Protocol p);
Protocol ParseProtocol(const std::string& name);

// Non-interpolated AP: junk ids are dropped, then AP is the mean over all
// positives of the precision at their rank (0 for positives not listed).
// Throws UndefinedQueryError on an empty positive set.
double AveragePrecision(const std::vector<std::string>& ranked,
                        const std::set<std::string>& positives,
                        const std::set<std::string>& junk);

struct QueryAp {
  std::string query_id;
  double ap = 0.0;
  bool included = false;  // false when the protocol leaves no positive
};

struct MapReport {
  Protocol protocol = Protocol::kMedium;
  double map = 0.0;
  std::size_t evaluated = 0;
  std::vector<QueryAp> per_query;

  // "query_id,ap,included" rows followed by "mAP <protocol> <value>".
  std::string ToCsv() const;
};

// Throws MissingGroundTruthError naming the first unknown query.
MapReport MapEval(const std::vector<RankedList>& results,
                  const GroundTruth& gt, Protocol protocol);

enum class ScorerKind { kTp, kSp };
std::string ToString(ScorerKind s);
ScorerKind ParseScorer(const std::string& name);

struct PairScoring {
  ScorerKind scorer = ScorerKind::kTp;
  TopoConfig topo;
  SpatialConfig spatial;
  double ratio_threshold = kDefaultRatioThreshold;
};

// Similarity of one image pair under the chosen verifier.
double ScorePair(const FeatureSet& query, const FeatureSet& candidate,
                 const PairScoring& scoring);

using FeatureResolver =
    std::function<std::optional<FeatureSet>(const std::string& id)>;

struct RerankResult {
  RankedList list;
  std::vector<std::string> skipped;  // unresolvable candidate ids
};

// Rescores the top-k candidates against the query (cropped to bbox when
// given), sorts them by score with ties kept in initial order, and
// appends the untouched tail. Unresolvable candidates keep their initial
// position within the block.
RerankResult Rerank(const FeatureSet& query, const RankedList& initial,
                    const FeatureResolver& store, std::size_t k,
                    const PairScoring& scoring,
                    const std::optional<Patch>& query_bbox = std::nullopt,
                    int threads = 1);

// Looks up "<dir>/<id>.tpf", "<dir>/<id>.txt" and "<dir>/<id>" in order.
FeatureResolver DirectoryStore(const std::filesystem::path& dir);

}  // namespace topover

#endif  // TOPOVER_RETRIEVAL_H_
