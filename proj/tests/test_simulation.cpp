// Copyright 2026 The bgskip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bgskip/error.hpp"
#include "bgskip/simulation.hpp"
#include "support/oracles.hpp"

using namespace bgskip;

namespace {

double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("scenes are reproducible per index") {
  SceneConfig cfg;
  const Scene a = generate_scene(cfg, 17);
  const Scene b = generate_scene(cfg, 17);
  CHECK(a.image == b.image);
  REQUIRE(a.objects.size() == b.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) CHECK(a.objects[i].box == b.objects[i].box);
  CHECK(a.image.image_id == "synth_000017");

  const auto corpus = generate_corpus(cfg, 20);
  CHECK(corpus[17].objects.size() == a.objects.size());
  cfg.seed = 2;
  const Scene c = generate_scene(cfg, 17);
  CHECK((c.objects.size() != a.objects.size() || !(c.objects.front().box == a.objects.front().box)));
}

TEST_CASE("zero object rate gives empty scenes") {
  SceneConfig cfg;
  cfg.objects_per_image = 0;
  for (int i = 0; i < 10; ++i) CHECK(generate_scene(cfg, i).objects.empty());
}

TEST_CASE("objects lie inside the image with the configured aspect") {
  SceneConfig cfg;
  for (int i = 0; i < 200; ++i) {
    for (const auto& g : generate_scene(cfg, i).objects) {
      CHECK(contains(Box{0, 0, 2048, 1024}, g.box));
      CHECK(g.box.width() == doctest::Approx(0.41 * g.box.height()).epsilon(0.01));
    }
  }
}

TEST_CASE("object heights follow the configured log-normal") {
  SceneConfig cfg;
  cfg.cluster_fraction = 0.0;
  std::vector<double> heights;
  for (int i = 0; i < 10000; ++i) {
    for (const auto& g : generate_scene(cfg, i).objects) heights.push_back(g.box.height());
  }
  REQUIRE(heights.size() > 50000);
  const double d = oracle::ks_lognormal(heights, cfg.height_log_mu, cfg.height_log_sigma);
  CHECK(d < oracle::ks_critical_001(heights.size()));

  std::size_t small = 0;
  for (double h : heights) small += h < 100.0;
  CHECK(double(small) / double(heights.size()) == doctest::Approx(0.70).epsilon(0.03));
}

TEST_CASE("noiseless proposer returns the ground-truth boxes") {
  SceneConfig sc;
  const OracleProposer proposer(OracleConfig{}, sc);
  for (int i = 0; i < 20; ++i) {
    const Scene scene = generate_scene(sc, i);
    const auto props = proposer.propose(scene);
    REQUIRE(props.size() == scene.objects.size());
    for (std::size_t k = 0; k < props.size(); ++k) {
      CHECK(props[k].box == scene.objects[k].box);
      CHECK(props[k].id == ProposalId(k));
      CHECK(props[k].score >= 0.6);
    }
  }
}

TEST_CASE("proposer with miss probability one returns nothing") {
  SceneConfig sc;
  OracleConfig cfg;
  cfg.miss_prob = 1.0;
  const OracleProposer proposer(cfg, sc);
  for (int i = 0; i < 20; ++i) CHECK(proposer.propose(generate_scene(sc, i)).empty());
}

TEST_CASE("false-positive proposals stay inside the image with low scores") {
  SceneConfig sc;
  OracleConfig cfg;
  cfg.fp_rate = 5;
  const OracleProposer proposer(cfg, sc);
  std::size_t extra = 0;
  for (int i = 0; i < 50; ++i) {
    const Scene scene = generate_scene(sc, i);
    const auto props = proposer.propose(scene);
    extra += props.size() - scene.objects.size();
    for (std::size_t k = scene.objects.size(); k < props.size(); ++k) {
      CHECK(contains(scene.image.bounds(), props[k].box));
      CHECK(props[k].score <= 0.8);
    }
  }
  CHECK(double(extra) / 50.0 == doctest::Approx(5.0).epsilon(0.2));
}

TEST_CASE("detector on a full-scale crop") {
  Scene scene{{"s", 2048, 1024}, {{{100, 100, 140, 200}, false, {}}}};
  MRoi crop;
  crop.box = {50, 50, 250, 300};
  crop.member_ids = {0};
  crop.scale = 1.0;
  crop.scaled_width_px = 200;
  crop.scaled_height_px = 250;
  const auto dets = OracleDetector(OracleConfig{}).detect(crop, scene);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].box == Box{50, 50, 90, 150});
}

TEST_CASE("detector misses objects that shrink below its minimum height") {
  Scene scene{{"s", 2048, 1024}, {{{100, 100, 140, 200}, false, {}}}};
  MRoi crop;
  crop.box = {50, 50, 250, 300};
  crop.member_ids = {0};
  crop.scale = 0.5;
  crop.scaled_width_px = 100;
  crop.scaled_height_px = 125;
  OracleConfig cfg;
  cfg.min_detectable_height_px = 60;
  CHECK(OracleDetector(cfg).detect(crop, scene).empty());
  cfg.min_detectable_height_px = 50;
  CHECK(OracleDetector(cfg).detect(crop, scene).size() == 1);
}

TEST_CASE("detector ignores objects mostly outside the crop") {
  Scene scene{{"s", 2048, 1024}, {{{100, 100, 140, 200}, false, {}}}};
  MRoi crop;
  crop.box = {120, 50, 400, 300};
  crop.member_ids = {0};
  crop.scaled_width_px = 280;
  crop.scaled_height_px = 250;
  CHECK(OracleDetector(OracleConfig{}).detect(crop, scene).empty());
}

TEST_CASE("first-stage misses show up in sensitivity") {
  SceneConfig sc;
  sc.cluster_fraction = 0.0;
  const auto scenes = generate_corpus(sc, 400);
  OracleConfig cfg;
  cfg.miss_prob = 0.1;
  const auto res = run_dataset(OracleProposer(cfg, sc), OracleDetector(OracleConfig{}), scenes, PipelineParams{});
  const auto& s = *res.eval.sensitivity;
  REQUIRE(s.total >= 2000);
  CHECK(std::abs(*s.overall() - 0.9) <= 3.0 * binomial_sigma(0.9, double(s.total)));
}

TEST_CASE("shrinking h below the detector's minimum height raises MR-2") {
  SceneConfig sc;
  const auto scenes = generate_corpus(sc, 150);
  OracleConfig det;
  det.min_detectable_height_px = 60;
  const OracleProposer proposer(OracleConfig{}, sc);
  const OracleDetector detector(det);
  std::vector<double> mr;
  for (double h : {128.0, 64.0, 48.0, 32.0, 24.0}) {
    PipelineParams params;
    params.pcmad.h = h;
    mr.push_back(run_dataset(proposer, detector, scenes, params).eval.mr2.at("reasonable").value());
  }
  for (std::size_t i = 1; i < mr.size(); ++i) CHECK(mr[i] >= mr[i - 1]);
  CHECK(mr.back() > mr.front() + 0.1);
}

TEST_CASE("clustering produces more merges") {
  SceneConfig loose;
  loose.cluster_fraction = 0.0;
  SceneConfig tight = loose;
  tight.cluster_fraction = 0.8;
  tight.cluster_spread = 0.2;
  auto ratio = [](const SceneConfig& sc) {
    const auto scenes = generate_corpus(sc, 200);
    return *run_dataset(OracleProposer(OracleConfig{}, sc), OracleDetector(OracleConfig{}), scenes, PipelineParams{})
                .eval.mroi_per_object;
  };
  CHECK(ratio(tight) < ratio(loose));
}

TEST_CASE("configuration validation") {
  SceneConfig sc;
  sc.cluster_fraction = 1.5;
  CHECK_THROWS_AS(generate_scene(sc, 0), Error);
  OracleConfig oc;
  oc.miss_prob = -0.1;
  CHECK_THROWS_AS(oc.validate(), Error);
}

}  // TEST_SUITE
