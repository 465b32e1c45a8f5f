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

// Exercises the shared library strictly through its C interface.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "bgskip/bgskip.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kFixture = std::string(BGSKIP_DATA_DIR) + "/citypersons_like_corpus.jsonl";

struct Session {
  explicit Session(const char* config = nullptr) {
    char* err = nullptr;
    const auto st = bgskip_session_create(config, nullptr, &s, &err);
    if (st != BGSKIP_OK) {
      const std::string msg = err ? err : "";
      bgskip_free(err);
      FAIL("session creation failed: " << msg);
    }
  }
  ~Session() { bgskip_session_destroy(s); }
  operator bgskip_session*() const { return s; }
  bgskip_session* s = nullptr;
};

// Takes ownership of a library-allocated string.
std::string take(char* p) {
  std::string out = p ? p : "";
  bgskip_free(p);
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bgskip_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallRun = R"({"num_images":40})";

}  // namespace

TEST_CASE("version and profile listing") {
  CHECK(std::string(bgskip_version()) == "0.1.0");
  Session s;
  char* out = nullptr;
  REQUIRE(bgskip_list_profiles(s, &out) == BGSKIP_OK);
  const Json profiles = Json::parse(take(out));
  REQUIRE(profiles.is_array());
  CHECK(profiles.size() == 18);
  CHECK(profiles[2]["name"] == "Pedestron(HRNet)");
}

TEST_CASE("session configuration is echoed back in full") {
  Session s(R"j({"pcmad":{"p":0.2},"profiles":{"stage2":"ACSP(RN101)"}})j");
  char* out = nullptr;
  REQUIRE(bgskip_session_config(s, &out) == BGSKIP_OK);
  const Json cfg = Json::parse(take(out));
  CHECK(cfg["pcmad"]["p"] == 0.2);
  CHECK(cfg["pcmad"]["h"] == 320.0);
  CHECK(cfg["profiles"]["stage2"] == "ACSP(RN101)");
}

TEST_CASE("creation errors map to status codes") {
  bgskip_session* s = nullptr;
  char* err = nullptr;
  CHECK(bgskip_session_create("{not json", nullptr, &s, &err) == BGSKIP_ERROR_CONFIG);
  CHECK(s == nullptr);
  CHECK_FALSE(take(err).empty());
  CHECK(bgskip_session_create(nullptr, "/no/such/profiles.csv", &s, nullptr) == BGSKIP_ERROR_CONFIG);
  CHECK(bgskip_session_create(nullptr, nullptr, nullptr, nullptr) == BGSKIP_ERROR_CONFIG);
}

TEST_CASE("file-level plan agrees with per-record planning") {
  Session s;
  const fs::path dir = scratch_dir("plan");
  char* summary = nullptr;
  REQUIRE(bgskip_plan(s, kFixture.c_str(), (dir / "plans.jsonl").c_str(), &summary) == BGSKIP_OK);
  const Json sum = Json::parse(take(summary));
  CHECK(sum["images"] == 500);

  std::ifstream in(kFixture);
  std::string line;
  double total = 0;
  int n = 0;
  while (std::getline(in, line)) {
    char* plan = nullptr;
    REQUIRE(bgskip_plan_record(s, line.c_str(), &plan) == BGSKIP_OK);
    total += Json::parse(take(plan))["m_over_n"].get<double>();
    ++n;
  }
  CHECK(n == 500);
  CHECK(sum["avg_m_over_n"].get<double>() == total / n);
  CHECK(fs::file_size(dir / "plans.jsonl") > 0);
  fs::remove_all(dir);
}

TEST_CASE("cost of a plan file") {
  Session s;
  const fs::path dir = scratch_dir("cost");
  REQUIRE(bgskip_plan(s, kFixture.c_str(), (dir / "plans.jsonl").c_str(), nullptr) == BGSKIP_OK);
  char* report = nullptr;
  char* table = nullptr;
  REQUIRE(bgskip_cost(s, (dir / "plans.jsonl").c_str(), &report, &table) == BGSKIP_OK);
  const Json rep = Json::parse(take(report));
  CHECK(rep["images"].size() == 500);
  const double m_over_n = rep["dataset"]["m_over_n"];
  CHECK(rep["dataset"]["bltnet_gflops"].get<double>() == doctest::Approx(27.5 + m_over_n * 596.8));
  CHECK(take(table).find("reduction factor") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simulation is byte-identical across runs and thread counts") {
  Session s(kSmallRun);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(bgskip_simulate(s, nullptr, 1, &a, nullptr) == BGSKIP_OK);
  REQUIRE(bgskip_simulate(s, nullptr, 3, &b, nullptr) == BGSKIP_OK);
  const std::string ra = take(a);
  CHECK(ra == take(b));
  const Json rep = Json::parse(ra);
  CHECK(rep["tool"] == "bgskip");
  CHECK(rep["command"] == "simulate");
  CHECK(rep["config"]["num_images"] == 40);
}

TEST_CASE("evaluating the exported files reproduces the simulation metrics") {
  Session s(kSmallRun);
  const fs::path dir = scratch_dir("sim");
  char* report = nullptr;
  REQUIRE(bgskip_simulate(s, dir.c_str(), 0, &report, nullptr) == BGSKIP_OK);
  const Json sim = Json::parse(take(report));
  for (const char* f : {"corpus.jsonl", "plans.jsonl", "detections.jsonl", "report.json", "report.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  char* ev = nullptr;
  REQUIRE(bgskip_eval(s, (dir / "detections.jsonl").c_str(), (dir / "corpus.jsonl").c_str(),
                      (dir / "plans.jsonl").c_str(), &ev, nullptr) == BGSKIP_OK);
  CHECK(Json::parse(take(ev))["eval"] == sim["eval"]);
  fs::remove_all(dir);
}

TEST_CASE("a one-point sweep repeats the simulation") {
  Session s(R"({"num_images":40,"grid":{"p":[0.1],"h":[256],"k":[0.85],"score_threshold":[0.5]}})");
  char* sim = nullptr;
  char* sweep = nullptr;
  REQUIRE(bgskip_simulate(s, nullptr, 0, &sim, nullptr) == BGSKIP_OK);
  REQUIRE(bgskip_sweep(s, nullptr, 0, &sweep, nullptr) == BGSKIP_OK);
  const Json a = Json::parse(take(sim));
  const Json b = Json::parse(take(sweep));
  REQUIRE(b["rows"].size() == 1);
  const Json& row = b["rows"][0];
  CHECK(row["avg_m_over_n"] == a["eval"]["m_over_n"]["avg"]);
  CHECK(row["sensitivity"] == a["eval"]["sensitivity"]["overall"]);
  CHECK(row["mr2"] == a["eval"]["mr2"]["reasonable"]);
  CHECK(row["gflops"] == a["cost"]["bltnet_gflops"]);
  CHECK(row["reduction_factor"] == a["cost"]["reduction_factor"]);
  CHECK(row["pareto"] == true);
}

TEST_CASE("an empty sweep grid is a configuration error") {
  Session s(R"({"grid":{"p":[]}})");
  char* out = nullptr;
  CHECK(bgskip_sweep(s, nullptr, 0, &out, nullptr) == BGSKIP_ERROR_CONFIG);
  CHECK(out == nullptr);
  CHECK(std::string(bgskip_last_error(s)).find("grid") != std::string::npos);
}

TEST_CASE("mismatched image ids are reported") {
  Session s;
  const fs::path dir = scratch_dir("eval");
  std::ofstream(dir / "ann.jsonl") << R"({"image_id":"a","width":100,"height":100,"gt":[]})" << "\n"
                                   << R"({"image_id":"b","width":100,"height":100,"gt":[]})" << "\n";
  std::ofstream(dir / "det.jsonl") << R"({"image_id":"a","detections":[]})" << "\n"
                                   << R"({"image_id":"c","detections":[]})" << "\n";
  CHECK(bgskip_eval(s, (dir / "det.jsonl").c_str(), (dir / "ann.jsonl").c_str(), nullptr, nullptr, nullptr) ==
        BGSKIP_ERROR_DATA);
  const std::string msg = bgskip_last_error(s);
  CHECK(msg.find("b") != std::string::npos);
  CHECK(msg.find("c") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("malformed input files are data errors with line numbers") {
  Session s;
  const fs::path dir = scratch_dir("bad");
  std::ofstream(dir / "ann.jsonl") << R"({"image_id":"a","width":100,"height":100,"proposals":[]})" << "\n"
                                   << R"({"image_id":"b","width":100,"height":100,"proposals":[{"id":1,"box":[0,0,5]}]})" << "\n";
  CHECK(bgskip_plan(s, (dir / "ann.jsonl").c_str(), nullptr, nullptr) == BGSKIP_ERROR_DATA);
  CHECK(std::string(bgskip_last_error(s)).find("ann.jsonl:2:") != std::string::npos);
  fs::remove_all(dir);
}
