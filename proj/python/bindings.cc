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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "topover/cli.h"
#include "topover/error.h"
#include "topover/features.h"
#include "topover/retrieval.h"
#include "topover/spatial.h"
#include "topover/synth.h"
#include "topover/topo.h"

namespace py = pybind11;
using namespace topover;

namespace {

// keypoints: (n, 4) x y scale orientation; descriptors: (n, dim).
FeatureSet MakeFeatures(const std::string& image_id, double width,
                        double height,
                        py::array_t<double, py::array::c_style |
                                                py::array::forcecast>
                            keypoints,
                        py::array_t<float, py::array::c_style |
                                               py::array::forcecast>
                            descriptors) {
  if (keypoints.ndim() != 2 || keypoints.shape(1) != 4) {
    throw DimensionError("keypoints must have shape (n, 4)");
  }
  if (descriptors.ndim() != 2 || descriptors.shape(0) != keypoints.shape(0)) {
    throw DimensionError("descriptors must have shape (n, dim)");
  }
  const auto n = keypoints.shape(0);
  const auto dim = std::size_t(descriptors.shape(1));
  FeatureSet set(image_id, width, height, dim);
  auto k = keypoints.unchecked<2>();
  const float* d = descriptors.data();
  for (py::ssize_t i = 0; i < n; ++i) {
    set.Add({k(i, 0), k(i, 1), k(i, 2), k(i, 3)},
            std::span<const float>(d + i * dim, dim));
  }
  set.Validate();
  return set;
}

py::array_t<double> KeypointArray(const FeatureSet& set) {
  py::array_t<double> out({py::ssize_t(set.size()), py::ssize_t(4)});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Keypoint& k = set.keypoint(i);
    o(i, 0) = k.x;
    o(i, 1) = k.y;
    o(i, 2) = k.scale;
    o(i, 3) = k.orientation;
  }
  return out;
}

py::array_t<float> DescriptorArray(const FeatureSet& set) {
  py::array_t<float> out({py::ssize_t(set.size()), py::ssize_t(set.dim())});
  std::copy(set.descriptor_data().begin(), set.descriptor_data().end(),
            out.mutable_data());
  return out;
}

py::list MatchList(const std::vector<Match>& matches) {
  py::list out;
  for (const Match& m : matches) {
    out.append(py::make_tuple(m.idx1, m.idx2, m.distance, m.ratio));
  }
  return out;
}

py::dict RegionDict(const HomeomorphismRegion& r) {
  py::list pairs;
  for (const auto& p : r.pairs) {
    pairs.append(py::make_tuple(
        py::make_tuple(p.r1.center.x, p.r1.center.y, p.r1.half_w,
                       p.r1.half_h),
        py::make_tuple(p.r2.center.x, p.r2.center.y, p.r2.half_w,
                       p.r2.half_h),
        p.score.value_or(0.0)));
  }
  py::dict d;
  d["seed"] = r.seed;
  d["pairs"] = pairs;
  d["matched_keypoints"] = r.matched_keypoints.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topological verification of local feature matches";

  static py::exception<Error> error(m, "TopoverError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<FeatureSet>(m, "FeatureSet")
      .def(py::init(&MakeFeatures), py::arg("image_id"), py::arg("width"),
           py::arg("height"), py::arg("keypoints"), py::arg("descriptors"))
      .def_property_readonly("image_id", &FeatureSet::image_id)
      .def_property_readonly("width", &FeatureSet::width)
      .def_property_readonly("height", &FeatureSet::height)
      .def_property_readonly("dim", &FeatureSet::dim)
      .def_property_readonly("keypoints", &KeypointArray)
      .def_property_readonly("descriptors", &DescriptorArray)
      .def("__len__", &FeatureSet::size)
      .def("__repr__", [](const FeatureSet& s) {
        std::ostringstream o;
        o << "<FeatureSet " << s.image_id() << " " << s.size()
          << " keypoints dim " << s.dim() << ">";
        return o.str();
      });

  m.def("load_features", &LoadFeatures, py::arg("path"));
  m.def(
      "save_features",
      [](const FeatureSet& s, const std::filesystem::path& path, bool binary) {
        SaveFeatures(s, path,
                     binary ? FeatureFileFormat::kBinary
                            : FeatureFileFormat::kText);
      },
      py::arg("features"), py::arg("path"), py::arg("binary") = false);

  m.def(
      "ratio_test_match",
      [](const FeatureSet& a, const FeatureSet& b, double ratio) {
        return MatchList(RatioTestMatch(a, b, ratio));
      },
      py::arg("a"), py::arg("b"), py::arg("ratio") = kDefaultRatioThreshold,
      "List of (idx1, idx2, distance, ratio).");

  m.def(
      "spatial_verify",
      [](const FeatureSet& a, const FeatureSet& b, double epsilon,
         double ratio, int threads) {
        SpatialConfig cfg;
        cfg.epsilon = epsilon;
        cfg.threads = threads;
        py::gil_scoped_release release;
        const SpResult r = SpatialVerify(a, b, cfg, ratio);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["inliers"] = r.inlier_count;
        d["matches"] = r.match_count;
        d["transform"] = r.best.m;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("epsilon") = 8.0,
      py::arg("ratio") = kDefaultRatioThreshold, py::arg("threads") = 1);

  m.def(
      "topo_verify",
      [](const FeatureSet& a, const FeatureSet& b, double alpha,
         const std::string& metric, double ratio, bool all_regions,
         int threads) {
        TopoConfig cfg;
        cfg.alpha = alpha;
        cfg.metric = ParseScoreMetric(metric);
        cfg.keep_all_regions = all_regions;
        cfg.threads = threads;
        TpResult r;
        {
          py::gil_scoped_release release;
          r = TopoVerify(a, b, cfg, ratio);
        }
        py::dict d;
        d["score"] = r.score;
        d["metric"] = ToString(r.metric);
        d["best"] = RegionDict(r.best);
        d["seeds_tried"] = r.seeds_tried;
        d["seeds_skipped"] = r.seeds_skipped;
        py::list regions;
        for (const auto& reg : r.all_regions) regions.append(RegionDict(reg));
        d["all_regions"] = regions;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("alpha") = 0.2,
      py::arg("metric") = "patches",
      py::arg("ratio") = kDefaultRatioThreshold,
      py::arg("all_regions") = false, py::arg("threads") = 1);

  m.def(
      "synth",
      [](std::uint64_t seed, const std::string& regime, std::size_t count,
         double corruption, double clutter) {
        SynthSpec spec;
        spec.seed = seed;
        spec.regime = ParseSynthRegime(regime);
        spec.keypoint_count = count;
        spec.corruption_rate = corruption;
        spec.clutter_fraction = clutter;
        SynthPair p = Generate(spec);
        py::dict d;
        d["a"] = p.a;
        d["b"] = p.b;
        d["correspondences"] = p.true_correspondences;
        if (p.distractor) d["distractor"] = *p.distractor;
        d["ground_truth"] = p.GroundTruthJson().dump();
        return d;
      },
      py::arg("seed") = 7, py::arg("regime") = "planar",
      py::arg("count") = 256, py::arg("corruption") = 0.0,
      py::arg("clutter") = 0.0);

  m.def(
      "average_precision",
      [](const std::vector<std::string>& ranked,
         const std::set<std::string>& positives,
         const std::set<std::string>& junk) {
        return AveragePrecision(ranked, positives, junk);
      },
      py::arg("ranked"), py::arg("positives"),
      py::arg("junk") = std::set<std::string>{});

  m.def(
      "map_eval",
      [](const std::filesystem::path& ranking,
         const std::filesystem::path& gt, const std::string& protocol) {
        const MapReport r = MapEval(LoadRankings(ranking), GroundTruth::Load(gt),
                                    ParseProtocol(protocol));
        py::dict per_query;
        for (const auto& q : r.per_query) {
          per_query[py::str(q.query_id)] =
              q.included ? py::object(py::float_(q.ap)) : py::none();
        }
        py::dict d;
        d["map"] = r.map;
        d["evaluated"] = r.evaluated;
        d["per_query"] = per_query;
        return d;
      },
      py::arg("ranking"), py::arg("gt"), py::arg("protocol") = "medium");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "topover");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = RunCli(int(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in process.");
}
