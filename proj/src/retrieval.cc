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

#include "topover/retrieval.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "topover/error.h"
#include "topover/parallel.h"

namespace topover {

namespace {

std::set<std::string> IdSet(const nlohmann::json& q, const char* key,
                            const std::string& qid) {
  std::set<std::string> out;
  if (!q.contains(key)) return out;
  const auto& arr = q.at(key);
  if (!arr.is_array()) {
    throw FormatError("query '" + qid + "': '" + key + "' must be an array");
  }
  for (const auto& v : arr) {
    if (!v.is_string()) {
      throw FormatError("query '" + qid + "': '" + key +
                        "' must hold string ids");
    }
    out.insert(v.get<std::string>());
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::fixed, 6);
  return std::string(buf, end);
}

}  // namespace

GroundTruth::GroundTruth(std::vector<QueryTruth> queries)
    : queries_(std::move(queries)) {}

GroundTruth GroundTruth::FromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("ground truth is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object() || !doc.contains("queries") ||
      !doc["queries"].is_array()) {
    throw FormatError("ground truth needs a 'queries' array");
  }
  std::vector<QueryTruth> queries;
  std::set<std::string> seen;
  for (const auto& q : doc["queries"]) {
    if (!q.is_object() || !q.contains("id") || !q["id"].is_string()) {
      throw FormatError("ground truth query without a string 'id'");
    }
    QueryTruth t;
    t.id = q["id"].get<std::string>();
    if (!seen.insert(t.id).second) {
      throw FormatError("duplicate ground truth for query '" + t.id + "'");
    }
    t.easy = IdSet(q, "easy", t.id);
    t.hard = IdSet(q, "hard", t.id);
    t.junk = IdSet(q, "junk", t.id);
    for (const auto& id : t.easy) {
      if (t.hard.count(id) || t.junk.count(id)) {
        throw FormatError("query '" + t.id + "': '" + id +
                          "' appears in more than one label set");
      }
    }
    for (const auto& id : t.hard) {
      if (t.junk.count(id)) {
        throw FormatError("query '" + t.id + "': '" + id +
                          "' appears in more than one label set");
      }
    }
    if (q.contains("bbox") && !q["bbox"].is_null()) {
      const auto& b = q["bbox"];
      if (!b.is_array() || b.size() != 4 ||
          !std::all_of(b.begin(), b.end(),
                       [](const auto& v) { return v.is_number(); })) {
        throw FormatError("query '" + t.id +
                          "': bbox must be [x0, y0, x1, y1]");
      }
      const double x0 = b[0].get<double>(), y0 = b[1].get<double>();
      const double x1 = b[2].get<double>(), y1 = b[3].get<double>();
      if (!(x1 > x0 && y1 > y0)) {
        throw FormatError("query '" + t.id + "': empty bbox");
      }
      t.bbox = Patch::FromBox(x0, y0, x1, y1);
    }
    queries.push_back(std::move(t));
  }
  return GroundTruth(std::move(queries));
}

GroundTruth GroundTruth::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ground truth '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return FromJson(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

const QueryTruth* GroundTruth::Find(const std::string& id) const {
  for (const auto& q : queries_) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

std::vector<std::string> RankedList::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(candidates.size());
  for (const auto& c : candidates) ids.push_back(c.id);
  return ids;
}

std::vector<RankedList> ParseRankings(const std::string& text) {
  std::vector<RankedList> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw FormatError("ranking line " + std::to_string(line_no) +
                        ": expected 'query_id: img1 img2 ...'");
    }
    RankedList list;
    std::istringstream head(line.substr(0, colon));
    head >> list.query_id;
    std::string extra;
    if (list.query_id.empty() || (head >> extra)) {
      throw FormatError("ranking line " + std::to_string(line_no) +
                        ": malformed query id");
    }
    std::istringstream rest(line.substr(colon + 1));
    std::string id;
    while (rest >> id) list.candidates.push_back({id, std::nullopt});
    out.push_back(std::move(list));
  }
  return out;
}

std::vector<RankedList> LoadRankings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ranking file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseRankings(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string FormatRankings(const std::vector<RankedList>& lists) {
  std::string out;
  for (const auto& list : lists) {
    out += list.query_id;
    out += ':';
    for (const auto& c : list.candidates) {
      out += ' ';
      out += c.id;
    }
    out += '\n';
  }
  return out;
}

std::string ToString(Protocol p) {
  return p == Protocol::kMedium ? "medium" : "hard";
}

Protocol ParseProtocol(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (lower == "medium" || lower == "m") return Protocol::kMedium;
  if (lower == "hard" || lower == "h") return Protocol::kHard;
  throw ParameterError("unknown protocol '" + name +
                       "' (expected medium or hard)");
}

double AveragePrecision(const std::vector<std::string>& ranked,
                        const std::set<std::string>& positives,
                        const std::set<std::string>& junk) {
  if (positives.empty()) {
    throw UndefinedQueryError("average precision needs at least one positive");
  }
  std::set<std::string> found;
  std::size_t rank = 0;
  double sum = 0.0;
  for (const auto& id : ranked) {
    if (junk.count(id)) continue;
    ++rank;
    if (positives.count(id) && found.insert(id).second) {
      sum += double(found.size()) / double(rank);
    }
  }
  return sum / double(positives.size());
}

MapReport MapEval(const std::vector<RankedList>& results,
                  const GroundTruth& gt, Protocol protocol) {
  MapReport report;
  report.protocol = protocol;
  double sum = 0.0;
  for (const auto& list : results) {
    const QueryTruth* q = gt.Find(list.query_id);
    if (q == nullptr) {
      throw MissingGroundTruthError("no ground truth for query '" +
                                    list.query_id + "'");
    }
    std::set<std::string> positives = q->hard;
    std::set<std::string> junk = q->junk;
    if (protocol == Protocol::kMedium) {
      positives.insert(q->easy.begin(), q->easy.end());
    } else {
      junk.insert(q->easy.begin(), q->easy.end());
    }
    QueryAp row;
    row.query_id = list.query_id;
    if (!positives.empty()) {
      row.ap = AveragePrecision(list.Ids(), positives, junk);
      row.included = true;
      sum += row.ap;
      ++report.evaluated;
    }
    report.per_query.push_back(std::move(row));
  }
  report.map = report.evaluated ? sum / double(report.evaluated) : 0.0;
  return report;
}

std::string MapReport::ToCsv() const {
  std::string out = "query_id,ap,included\n";
  for (const auto& row : per_query) {
    out += row.query_id + "," + FormatDouble(row.ap) + "," +
           (row.included ? "1" : "0") + "\n";
  }
  out += "mAP " + ToString(protocol) + " " + FormatDouble(map) + "\n";
  return out;
}

std::string ToString(ScorerKind s) { return s == ScorerKind::kTp ? "tp" : "sp"; }

ScorerKind ParseScorer(const std::string& name) {
  if (name == "tp") return ScorerKind::kTp;
  if (name == "sp") return ScorerKind::kSp;
  throw ParameterError("unknown scorer '" + name + "' (expected tp or sp)");
}

double ScorePair(const FeatureSet& query, const FeatureSet& candidate,
                 const PairScoring& scoring) {
  if (scoring.scorer == ScorerKind::kSp) {
    return double(SpatialVerify(query, candidate, scoring.spatial,
                                scoring.ratio_threshold)
                      .inlier_count);
  }
  return TopoVerify(query, candidate, scoring.topo, scoring.ratio_threshold)
      .score;
}

RerankResult Rerank(const FeatureSet& query, const RankedList& initial,
                    const FeatureResolver& store, std::size_t k,
                    const PairScoring& scoring,
                    const std::optional<Patch>& query_bbox, int threads) {
  RerankResult result;
  result.list.query_id = initial.query_id;
  const std::size_t block = std::min(k, initial.candidates.size());
  if (block == 0) {
    result.list = initial;
    return result;
  }
  const FeatureSet q =
      query_bbox ? query.CropStrictlyInside(*query_bbox) : query;

  std::vector<std::optional<FeatureSet>> features(block);
  for (std::size_t i = 0; i < block; ++i) {
    features[i] = store(initial.candidates[i].id);
    if (!features[i]) result.skipped.push_back(initial.candidates[i].id);
  }
  std::vector<double> scores(block, 0.0);
  ParallelFor(block, threads, [&](std::size_t i) {
    if (features[i]) scores[i] = ScorePair(q, *features[i], scoring);
  });

  // Resolved candidates are sorted among the slots they occupy; skipped
  // ones stay where they were.
  std::vector<std::size_t> resolved;
  for (std::size_t i = 0; i < block; ++i) {
    if (features[i]) resolved.push_back(i);
  }
  std::vector<std::size_t> sorted = resolved;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t x, std::size_t y) {
                     return scores[x] > scores[y];
                   });
  std::vector<Candidate> out(initial.candidates.begin(),
                             initial.candidates.end());
  for (std::size_t s = 0; s < resolved.size(); ++s) {
    const std::size_t from = sorted[s];
    out[resolved[s]] = {initial.candidates[from].id, scores[from]};
  }
  result.list.candidates = std::move(out);
  return result;
}

FeatureResolver DirectoryStore(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("feature store '" + dir.string() + "' is not a directory");
  }
  return [dir](const std::string& id) -> std::optional<FeatureSet> {
    for (const char* suffix : {".tpf", ".txt", ""}) {
      const auto path = dir / (id + suffix);
      std::error_code ec2;
      if (std::filesystem::is_regular_file(path, ec2)) {
        FeatureSet set = LoadFeatures(path);
        set.set_image_id(id);
        return set;
      }
    }
    return std::nullopt;
  };
}

}  // namespace topover
