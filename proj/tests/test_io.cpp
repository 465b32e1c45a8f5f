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

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bgskip/error.hpp"
#include "bgskip/io.hpp"
#include "bgskip/run_config.hpp"
#include "bgskip/sweep.hpp"
#include "support/oracles.hpp"

using namespace bgskip;
using io::Json;

namespace {

struct TempFile {
  explicit TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
  std::string path;
};

std::string data_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    return e.what();
  }
  FAIL("expected a data error");
  return {};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("annotation records round-trip with unknown fields") {
  const std::string line =
      R"({"image_id":"frankfurt_000001","width":2048,"height":1024,"city":"frankfurt",)"
      R"("gt":[{"box":[1.5,2.0,31.5,82.0],"ignore":false,"occlusion":0.25},{"box":[100.0,0.0,140.0,90.0],"ignore":true}],)"
      R"("proposals":[{"id":3,"box":[0.0,0.0,30.0,80.0],"score":0.75}],"meta":{"camera":2}})";
  const auto rec = io::annotation_from_json(Json::parse(line));
  CHECK(rec.image.image_id == "frankfurt_000001");
  REQUIRE(rec.gt.has_value());
  CHECK(rec.gt->size() == 2);
  CHECK(rec.gt->at(0).occlusion == 0.25);
  CHECK(rec.gt->at(1).ignore);
  REQUIRE(rec.proposals.has_value());
  CHECK(rec.proposals->at(0).id == 3);
  CHECK(rec.extra.at("city") == "frankfurt");

  const Json again = io::annotation_to_json(rec);
  const auto rec2 = io::annotation_from_json(again);
  CHECK(io::annotation_to_json(rec2) == again);
  CHECK(again.at("meta").at("camera") == 2);
}

TEST_CASE("optional lists stay absent") {
  const auto rec = io::annotation_from_json(Json::parse(R"({"image_id":"a","width":10,"height":10})"));
  CHECK_FALSE(rec.gt.has_value());
  CHECK_FALSE(rec.proposals.has_value());
  const Json j = io::annotation_to_json(rec);
  CHECK_FALSE(j.contains("gt"));
  CHECK_FALSE(j.contains("proposals"));
}

TEST_CASE("random records survive parse and serialize") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    io::AnnotationRecord rec;
    rec.image = {"img_" + std::to_string(i), 640 + int(u(rng) * 2000), 480 + int(u(rng) * 1000)};
    rec.gt.emplace();
    rec.proposals.emplace();
    const int n = int(u(rng) * 6);
    for (int k = 0; k < n; ++k) {
      const double x = u(rng) * 500, y = u(rng) * 300;
      const Box b{x, y, x + 1 + u(rng) * 90, y + 1 + u(rng) * 200};
      GtBox g{b, u(rng) < 0.2, {}};
      if (u(rng) < 0.5) g.occlusion = u(rng);
      rec.gt->push_back(g);
      rec.proposals->push_back({k * 7, b, u(rng)});
    }
    if (i % 3 == 0) rec.extra["note"] = "x" + std::to_string(i);
    const std::string text = io::dump_line(io::annotation_to_json(rec));
    const auto back = io::annotation_from_json(Json::parse(text));
    CHECK(io::dump_line(io::annotation_to_json(back)) == text);
    REQUIRE(back.gt->size() == rec.gt->size());
    for (std::size_t k = 0; k < rec.gt->size(); ++k) {
      CHECK(back.gt->at(k).box == rec.gt->at(k).box);
      CHECK(back.gt->at(k).occlusion == rec.gt->at(k).occlusion);
      CHECK(back.proposals->at(k) == rec.proposals->at(k));
    }

    io::DetectionRecord det{rec.image.image_id, {}};
    for (const auto& p : *rec.proposals) det.detections.push_back({p.box, p.score});
    const auto det_back = io::detections_from_json(Json::parse(io::dump_line(io::detections_to_json(det))));
    CHECK(det_back.detections == det.detections);

    const CropPlan plan = pcmad(*rec.proposals, rec.image, PcmadParams{});
    const CropPlan plan_back = io::plan_from_json(Json::parse(io::dump_line(io::plan_to_json(plan))));
    CHECK(io::plan_to_json(plan_back) == io::plan_to_json(plan));
    CHECK(plan_back.m_pixels == plan.m_pixels);
  }
}

TEST_CASE("parse errors report the line") {
  std::istringstream in(
      "{\"image_id\":\"a\",\"width\":10,\"height\":10}\n\n"
      "{\"image_id\":\"b\",\"width\":10}\n");
  const auto msg = data_error([&] { io::read_annotations(in, "ann.jsonl"); });
  CHECK(msg.find("ann.jsonl:3:") == 0);
  CHECK(msg.find("height") != std::string::npos);

  std::istringstream bad_json("{\"image_id\":\"a\",\"width\":10,\"height\":10}\n{not json\n");
  CHECK(data_error([&] { io::read_annotations(bad_json, "x.jsonl"); }).find("x.jsonl:2:") == 0);

  std::istringstream bad_box(R"({"image_id":"a","width":10,"height":10,"gt":[{"box":[5,5,1,1]}]})");
  CHECK(data_error([&] { io::read_annotations(bad_box, "y.jsonl"); }).find("y.jsonl:1:") == 0);
}

TEST_CASE("duplicate image ids are rejected") {
  std::istringstream in(
      "{\"image_id\":\"a\",\"width\":10,\"height\":10}\n"
      "{\"image_id\":\"a\",\"width\":10,\"height\":10}\n");
  CHECK(data_error([&] { io::read_annotations(in, "dup.jsonl"); }).find("duplicate image_id 'a'") != std::string::npos);

  TempFile dets("bgskip_test_dets.jsonl", "{\"image_id\":\"a\",\"detections\":[]}\n{\"image_id\":\"a\",\"detections\":[]}\n");
  CHECK(data_error([&] { io::read_detections_file(dets.path); }).find("duplicate") != std::string::npos);
}

TEST_CASE("plan records are checked for consistency") {
  const std::string line =
      R"({"image_id":"a","width":100,"height":100,"m_pixels":7,"m_over_n":0.0007,)"
      R"("mrois":[{"box":[0,0,10,10],"members":[1],"bucket":0,"scale":1.0,"scaled_width":10,"scaled_height":10}]})";
  CHECK(data_error([&] { io::plan_from_json(Json::parse(line)); }).find("m_pixels") != std::string::npos);
}

TEST_CASE("missing files are configuration errors") {
  try {
    io::read_annotations_file("no/such/file.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("text tables align columns") {
  io::TextTable t({"name", "value"});
  t.add_row({"a", "1.00"});
  t.add_row({"longer", "12.50"});
  const std::string s = t.render();
  CHECK(s.find("longer") != std::string::npos);
  std::istringstream lines(s);
  std::string first, rule;
  std::getline(lines, first);
  std::getline(lines, rule);
  CHECK(rule.size() == first.size());
  CHECK(io::fmt_fixed(0.12345, 3) == "0.123");
  CHECK(io::fmt_opt(std::nullopt, 2) == "-");
}

}  // TEST_SUITE

TEST_SUITE("run_config") {

TEST_CASE("configuration round-trips through JSON") {
  RunConfig cfg;
  cfg.pipeline.pcmad.p = 0.15;
  cfg.scene.objects_per_image = 12;
  cfg.detector.fp_rate = 0.2;
  cfg.p_sweep = {0.05, 0.1};
  cfg.grid.h = {128};
  const Json j = to_json(cfg);
  const RunConfig back = run_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.pipeline.pcmad.p == 0.15);
}

TEST_CASE("partial configs overlay the defaults") {
  const RunConfig cfg = run_config_from_json(Json::parse(R"({"pcmad":{"p":0.2},"scene":{"seed":9}})"));
  CHECK(cfg.pipeline.pcmad.p == 0.2);
  CHECK(cfg.pipeline.pcmad.h == 256.0);
  CHECK(cfg.scene.seed == 9);
  CHECK(cfg.num_images == 500);
}

TEST_CASE("unknown keys and bad values are configuration errors") {
  for (const char* text : {R"({"pcmad":{"q":1}})", R"({"bogus":1})", R"({"pcmad":{"p":-1}})",
                           R"({"pcmad":{"bucket_preset":"other"}})", R"({"num_images":0})"}) {
    try {
      run_config_from_json(Json::parse(text));
      FAIL("expected an error for " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }
}

TEST_CASE("published preset disables merging in the gap buckets") {
  const RunConfig cfg = run_config_from_json(Json::parse(R"({"pcmad":{"bucket_preset":"published"}})"));
  CHECK(cfg.pipeline.pcmad.no_merge_buckets == std::set<int>{2, 5});
}

TEST_CASE("the stage-2 profile supplies h unless it is given") {
  const auto reg = ProfileRegistry::bundled();
  RunConfig cfg = run_config_from_json(Json::parse(R"j({"profiles":{"stage2":"APD(DLA34)"}})j"));
  cfg.resolve(reg);
  CHECK(cfg.pipeline.pcmad.h == 384.0);
  RunConfig pinned = run_config_from_json(Json::parse(R"j({"profiles":{"stage2":"APD(DLA34)"},"pcmad":{"h":200}})j"));
  pinned.resolve(reg);
  CHECK(pinned.pipeline.pcmad.h == 200.0);
  RunConfig unknown = run_config_from_json(Json::parse(R"({"profiles":{"stage1":"Nope"}})"));
  CHECK_THROWS_AS(unknown.resolve(reg), Error);
}

}  // TEST_SUITE

TEST_SUITE("sweep") {

TEST_CASE("two points, one dominating") {
  CHECK(pareto_efficient({{1, 1}, {2, 2}}) == std::vector<bool>{true, false});
  CHECK(pareto_efficient({{1, 2}, {2, 1}}) == std::vector<bool>{true, true});
  CHECK(pareto_efficient({{1, 1}, {1, 1}}) == std::vector<bool>{true, true});
  CHECK(pareto_efficient({}).empty());
}

TEST_CASE("Pareto flags match pairwise dominance") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> v(0, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<double>> obj(std::size_t(1 + v(rng) * 3));
    for (auto& o : obj) o = {double(v(rng)), double(v(rng)), double(v(rng))};
    CHECK(pareto_efficient(obj) == oracle::brute_pareto(obj));
  }
}

TEST_CASE("sweep rows use GFLOPs, MR-2 and missed fraction") {
  std::vector<SweepRow> rows(3);
  rows[0].gflops = 50;
  rows[0].mr2 = 0.2;
  rows[0].sensitivity = 0.99;
  rows[1].gflops = 60;
  rows[1].mr2 = 0.2;
  rows[1].sensitivity = 0.99;
  rows[2].gflops = 70;
  rows[2].mr2 = 0.1;
  rows[2].sensitivity = 0.98;
  flag_pareto(rows);
  CHECK(rows[0].pareto);
  CHECK_FALSE(rows[1].pareto);
  CHECK(rows[2].pareto);
}

}  // TEST_SUITE
