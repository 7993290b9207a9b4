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

#include "topover/cli.h"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "topover/config.h"
#include "topover/error.h"
#include "topover/features.h"
#include "topover/overlay.h"
#include "topover/retrieval.h"
#include "topover/spatial.h"
#include "topover/synth.h"
#include "topover/topo.h"

namespace topover {

namespace {

std::string Fixed(double v) {
  char buf[64];
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return std::string(buf, end);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

// Options shared by the verifying commands. Enum-valued settings are
// captured as strings and applied after the config file.
struct SharedOptions {
  RunConfig cfg;
  std::string config_path;
  std::string metric = ToString(ScoreMetric::kPatchCount);
  std::string scorer = ToString(ScorerKind::kTp);
  CLI::App* app = nullptr;

  void Add(CLI::App* sub, bool retrieval) {
    app = sub;
    TopoConfig& t = cfg.topo;
    SpatialConfig& s = cfg.spatial;
    sub->add_option("--config", config_path,
                    "key = value file; flags given on the command line win");
    sub->add_option("--ratio", cfg.ratio_threshold, "Ratio-test threshold");
    sub->add_option("--normalize-descriptors", cfg.normalize_descriptors,
                    "Rescale descriptors to unit L2 norm on load");
    sub->add_option("--epsilon", s.epsilon, "SP inlier distance (pixels)");
    sub->add_option("--sp-max-hypotheses", s.max_hypotheses,
                    "SP hypotheses tested");
    sub->add_option("--ignore-rotation", s.ignore_rotation,
                    "SP hypotheses ignore keypoint orientation");
    sub->add_option("--alpha", t.alpha, "Fovea acceptance threshold");
    sub->add_option("--grid", t.grid, "Sub-patch grid order");
    sub->add_option("--patch-fraction", t.patch_fraction,
                    "Patch side as a fraction of min(width, height)");
    sub->add_option("--overlap-step", t.overlap_step,
                    "Saccade stride as a fraction of the patch side");
    sub->add_option("--max-hypotheses", t.max_hypotheses,
                    "TP seeds tried, in ratio order");
    sub->add_option("--min-keypoints", t.min_keypoints_per_patch,
                    "Matches a patch needs to be verified");
    sub->add_option("--min-overlap", t.min_overlap,
                    "Per-axis shared fraction that counts as overlap");
    sub->add_option("--skip-covered-seeds", t.skip_covered_seeds,
                    "Skip seeds inside an already found region");
    sub->add_option("--skip-min-pairs", t.skip_min_pairs,
                    "Region size that enables seed skipping");
    sub->add_option("--prefilter-sp", t.prefilter_with_sp,
                    "Keep only TP seeds that are SP inliers");
    sub->add_option("--metric", metric, "TP score: patches|keypoints|area")
        ->check(CLI::IsMember({"patches", "keypoints", "area"}));
    if (retrieval) {
      sub->add_option("--scorer", scorer, "Pair scorer: tp|sp")
          ->check(CLI::IsMember({"tp", "sp"}));
      sub->add_option("--k", cfg.k, "Candidates reranked per query");
    }
    sub->add_option("--threads", cfg.threads, "Worker threads");
  }

  // Config file values fill every setting not given as a flag.
  RunConfig Resolve() {
    if (!config_path.empty()) {
      for (const auto& [key, value] : LoadKeyValues(config_path)) {
        CLI::Option* opt = app->get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) continue;
        ApplySetting(cfg, key, value);
      }
    }
    if (app->count("--metric") > 0) ApplySetting(cfg, "metric", metric);
    if (app->get_option_no_throw("--scorer") != nullptr &&
        app->count("--scorer") > 0) {
      ApplySetting(cfg, "scorer", scorer);
    }
    cfg.SyncThreads();
    cfg.Validate();
    return cfg;
  }
};

FeatureSet Load(const std::string& path, const RunConfig& cfg) {
  FeatureSet set = LoadFeatures(path);
  if (cfg.normalize_descriptors) set.NormalizeDescriptors();
  return set;
}

int VerifyPair(const std::string& path1, const std::string& path2,
               const std::string& overlay_path, bool all_regions,
               RunConfig cfg, std::ostream& out) {
  const FeatureSet p1 = Load(path1, cfg);
  const FeatureSet p2 = Load(path2, cfg);
  const bool enough = !p1.empty() && p2.size() >= 2;
  std::vector<Match> matches;
  if (enough) matches = RatioTestMatch(p1, p2, cfg.ratio_threshold);
  const SpResult sp = SpatialVerifyMatches(matches, p1, p2, cfg.spatial);
  TopoConfig topo = cfg.topo;
  topo.record_trace = !overlay_path.empty();
  topo.keep_all_regions = all_regions;
  TpResult tp;
  if (enough) {
    tp = TopoVerifyMatches(matches, p1, p2, topo);
  } else {
    tp.metric = topo.metric;
  }

  out << "image1 " << p1.image_id() << " keypoints " << p1.size() << "\n";
  out << "image2 " << p2.image_id() << " keypoints " << p2.size() << "\n";
  out << "matches " << matches.size() << "\n";
  out << "sp_inliers " << sp.inlier_count << "\n";
  out << "tp_score " << Fixed(tp.score) << " " << ToString(tp.metric) << "\n";
  out << "tp_pairs " << tp.best.pairs.size() << "\n";
  out << "tp_keypoints " << tp.best.matched_keypoints.size() << "\n";
  out << "tp_seeds_tried " << tp.seeds_tried << "\n";
  out << "tp_seeds_skipped " << tp.seeds_skipped << "\n";
  if (all_regions) {
    for (std::size_t r = 0; r < tp.all_regions.size(); ++r) {
      const auto& region = tp.all_regions[r];
      out << "region " << r << " seed " << region.seed
          << " pairs " << region.pairs.size() << "\n";
    }
  }
  if (!overlay_path.empty()) {
    WriteOverlay(OverlayJson(tp, p1, p2, sp), overlay_path);
  }
  return kExitOk;
}

int RerankCmd(const std::string& ranking_path, const std::string& store_dir,
              const std::string& query_dir, const std::string& gt_path,
              const std::string& output, RunConfig cfg, std::ostream& out,
              std::ostream& err) {
  const auto lists = LoadRankings(ranking_path);
  const FeatureResolver store = DirectoryStore(store_dir);
  const FeatureResolver queries =
      query_dir.empty() ? store : DirectoryStore(query_dir);
  std::optional<GroundTruth> gt;
  if (!gt_path.empty()) gt = GroundTruth::Load(gt_path);

  PairScoring scoring = cfg.Scoring();
  // Parallelism goes across candidates.
  scoring.topo.threads = 1;
  scoring.spatial.threads = 1;
  FeatureResolver resolver = store;
  if (cfg.normalize_descriptors) {
    resolver = [store](const std::string& id) {
      auto set = store(id);
      if (set) set->NormalizeDescriptors();
      return set;
    };
  }

  std::vector<RankedList> reranked;
  for (const auto& list : lists) {
    std::optional<FeatureSet> q = queries(list.query_id);
    if (!q) {
      err << "warning: query " << list.query_id
          << " not found in store; ranking kept\n";
      reranked.push_back(list);
      continue;
    }
    if (cfg.normalize_descriptors) q->NormalizeDescriptors();
    std::optional<Patch> bbox;
    if (gt) {
      if (const QueryTruth* t = gt->Find(list.query_id)) bbox = t->bbox;
    }
    RerankResult r =
        Rerank(*q, list, resolver, cfg.k, scoring, bbox, cfg.threads);
    for (const auto& id : r.skipped) {
      err << "warning: query " << list.query_id << ": candidate " << id
          << " not found in store\n";
    }
    reranked.push_back(std::move(r.list));
  }
  const std::string text = FormatRankings(reranked);
  if (output.empty() || output == "-") {
    out << text;
  } else {
    WriteText(output, text);
  }
  return kExitOk;
}

int EvalCmd(const std::string& ranking_path, const std::string& gt_path,
            const std::string& protocol, const std::string& output,
            std::ostream& out) {
  const auto lists = LoadRankings(ranking_path);
  const GroundTruth gt = GroundTruth::Load(gt_path);
  std::vector<Protocol> protocols;
  if (protocol == "both") {
    protocols = {Protocol::kMedium, Protocol::kHard};
  } else {
    protocols = {ParseProtocol(protocol)};
  }
  std::string text;
  for (Protocol p : protocols) text += MapEval(lists, gt, p).ToCsv();
  out << text;
  if (!output.empty()) WriteText(output, text);
  return kExitOk;
}

struct SynthOptions {
  SynthSpec spec;
  std::string regime = "planar";
  std::string out_dir = ".";
  std::string name = "synth";
  std::string format = "text";
};

int SynthCmd(SynthOptions opts, std::ostream& out) {
  opts.spec.regime = ParseSynthRegime(opts.regime);
  if (opts.format != "text" && opts.format != "binary") {
    throw ParameterError("unknown format '" + opts.format +
                         "' (expected text or binary)");
  }
  const FeatureFileFormat format = opts.format == "text"
                                       ? FeatureFileFormat::kText
                                       : FeatureFileFormat::kBinary;
  const std::string ext = opts.format == "text" ? ".txt" : ".tpf";
  std::error_code ec;
  if (!std::filesystem::is_directory(opts.out_dir, ec)) {
    throw IoError("output directory '" + opts.out_dir + "' does not exist");
  }
  SynthPair pair = Generate(opts.spec);
  const std::filesystem::path dir(opts.out_dir);
  pair.a.set_image_id(opts.name + "_a");
  pair.b.set_image_id(opts.name + "_b");
  SaveFeatures(pair.a, dir / (opts.name + "_a" + ext), format);
  SaveFeatures(pair.b, dir / (opts.name + "_b" + ext), format);
  out << (dir / (opts.name + "_a" + ext)).string() << "\n";
  out << (dir / (opts.name + "_b" + ext)).string() << "\n";
  if (pair.distractor) {
    pair.distractor->set_image_id(opts.name + "_distractor");
    const auto path = dir / (opts.name + "_distractor" + ext);
    SaveFeatures(*pair.distractor, path, format);
    out << path.string() << "\n";
  }
  const auto gt_path = dir / (opts.name + "_gt.json");
  WriteText(gt_path, pair.GroundTruthJson().dump(1) + "\n");
  out << gt_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Topological and spatial verification of local-feature "
               "matches"};
  app.name("topover");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // verify-pair
  auto* verify = app.add_subcommand("verify-pair",
                                    "Score one image pair with SP and TP");
  std::string v_a, v_b, overlay;
  bool all_regions = false;
  SharedOptions v_opts;
  verify->add_option("features1", v_a, "Feature file of image 1")->required();
  verify->add_option("features2", v_b, "Feature file of image 2")->required();
  verify->add_option("--overlay", overlay, "Write the overlay JSON here");
  verify->add_flag("--all-regions", all_regions,
                   "List every grown region");
  v_opts.Add(verify, false);

  // rerank
  auto* rerank = app.add_subcommand("rerank",
                                    "Rerank the top-k of initial rankings");
  std::string r_ranking, r_store, r_queries, r_gt, r_out;
  SharedOptions r_opts;
  rerank->add_option("--ranking", r_ranking, "Initial ranking file")
      ->required();
  rerank->add_option("--store", r_store, "Directory of candidate features")
      ->required();
  rerank->add_option("--query-store", r_queries,
                     "Directory of query features (default: --store)");
  rerank->add_option("--gt", r_gt, "Ground truth file supplying query bboxes");
  rerank->add_option("--output", r_out, "Reranked list file (default: stdout)");
  r_opts.Add(rerank, true);

  // eval
  auto* eval = app.add_subcommand("eval", "Medium/Hard mAP of rankings");
  std::string e_ranking, e_gt, e_protocol = "both", e_out;
  eval->add_option("--ranking", e_ranking, "Ranking file")->required();
  eval->add_option("--gt", e_gt, "Ground truth JSON")->required();
  eval->add_option("--protocol", e_protocol, "medium|hard|both")
      ->check(CLI::IsMember({"medium", "hard", "both"}));
  eval->add_option("--output", e_out, "Also write the CSV here");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic fixture");
  SynthOptions s;
  synth->add_option("--seed", s.spec.seed, "Generator seed");
  synth->add_option("--regime", s.regime, "planar|multiplane|repeated");
  synth->add_option("--count", s.spec.keypoint_count, "Keypoints in image a");
  synth->add_option("--size", s.spec.image_size, "Image side (pixels)");
  synth->add_option("--dim", s.spec.descriptor_dim, "Descriptor dimension");
  synth->add_option("--noise", s.spec.descriptor_noise,
                    "Descriptor perturbation (L2)");
  synth->add_option("--scale", s.spec.scale_range, "Scale range lo hi");
  synth->add_option("--anisotropy", s.spec.anisotropy_range,
                    "Horizontal/vertical scale ratio range lo hi");
  synth->add_option("--rotation", s.spec.rotation_range,
                    "Rotation range lo hi (radians)");
  synth->add_option("--translation", s.spec.translation_range,
                    "Translation range lo hi (fraction of size)");
  synth->add_option("--planes", s.spec.plane_count,
                    "Planes of the folded surface");
  synth->add_option("--fold-compression", s.spec.fold_compression,
                    "Horizontal compression of odd planes");
  synth->add_option("--fold-shear", s.spec.fold_shear,
                    "Vertical shear per plane");
  synth->add_option("--period", s.spec.pattern_period,
                    "Repeated-pattern period (0: 0.2 * size)");
  synth->add_option("--corruption", s.spec.corruption_rate,
                    "Fraction of correspondences given random descriptors");
  synth->add_option("--clutter", s.spec.clutter_fraction,
                    "Unmatched keypoints added to b, as a fraction of count");
  synth->add_option("--out-dir", s.out_dir, "Output directory");
  synth->add_option("--name", s.name, "File name prefix");
  synth->add_option("--format", s.format, "text|binary");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (verify->parsed()) {
      return VerifyPair(v_a, v_b, overlay, all_regions, v_opts.Resolve(), out);
    }
    if (rerank->parsed()) {
      return RerankCmd(r_ranking, r_store, r_queries, r_gt, r_out,
                       r_opts.Resolve(), out, err);
    }
    if (eval->parsed()) return EvalCmd(e_ranking, e_gt, e_protocol, e_out, out);
    if (synth->parsed()) return SynthCmd(s, out);
    err << "error: no command given\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace topover
