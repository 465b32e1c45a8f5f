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

// Command-line front end. Everything goes through the C API of libbgskip.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bgskip/bgskip.h"

namespace {

using Json = nlohmann::ordered_json;

struct SessionDeleter {
  void operator()(bgskip_session* s) const { bgskip_session_destroy(s); }
};
using Session = std::unique_ptr<bgskip_session, SessionDeleter>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { bgskip_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct CommonFlags {
  std::string config_path;
  std::string profiles_path;
  std::optional<double> p;
  std::optional<double> h;
  std::optional<double> k;
  std::optional<double> score_threshold;
  std::optional<double> nms_iou;
  std::vector<double> bucket_edges;
  std::string bucket_preset;
  bool no_downscale = false;
  std::string profile_stage1;
  std::string profile_stage2;
  std::string report_path;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration file");
  cmd->add_option("--profiles", f.profiles_path, "detector profile file (default: $BGSKIP_PROFILES or bundled)");
  cmd->add_option("--p", f.p, "proposal extension fraction");
  cmd->add_option("--h", f.h, "target crop height in pixels");
  cmd->add_option("--k", f.k, "coverage threshold for sensitivity");
  cmd->add_option("--score-threshold", f.score_threshold, "minimum proposal score");
  cmd->add_option("--nms-iou", f.nms_iou, "IoU threshold of the global NMS");
  cmd->add_option("--bucket-edges", f.bucket_edges, "height bucket edges in multiples of h")->delimiter(',');
  cmd->add_option("--bucket-preset", f.bucket_preset, "contiguous | published")
      ->check(CLI::IsMember({"contiguous", "published"}));
  cmd->add_flag("--no-downscale", f.no_downscale, "keep every crop at scale 1");
  cmd->add_option("--profile-stage1", f.profile_stage1, "first-stage detector profile");
  cmd->add_option("--profile-stage2", f.profile_stage2, "second-stage detector profile");
  cmd->add_option("--report", f.report_path, "write the JSON report to this file");
}

Json build_config(const CommonFlags& f) {
  Json cfg = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + f.config_path);
    try {
      cfg = Json::parse(in);
    } catch (const Json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
  }
  auto& pc = cfg["pcmad"];
  if (pc.is_null()) pc = Json::object();
  if (!f.bucket_preset.empty()) pc["bucket_preset"] = f.bucket_preset;
  if (f.p) pc["p"] = *f.p;
  if (f.h) pc["h"] = *f.h;
  if (f.score_threshold) pc["score_threshold"] = *f.score_threshold;
  if (!f.bucket_edges.empty()) pc["bucket_edges"] = f.bucket_edges;
  if (f.no_downscale) pc["adaptive_scaling"] = false;
  if (f.k) {
    if (cfg["eval"].is_null()) cfg["eval"] = Json::object();
    cfg["eval"]["k"] = *f.k;
  }
  if (f.nms_iou) cfg["nms_iou"] = *f.nms_iou;
  if (!f.profile_stage1.empty() || !f.profile_stage2.empty()) {
    if (cfg["profiles"].is_null()) cfg["profiles"] = Json::object();
    if (!f.profile_stage1.empty()) cfg["profiles"]["stage1"] = f.profile_stage1;
    if (!f.profile_stage2.empty()) cfg["profiles"]["stage2"] = f.profile_stage2;
  }
  return cfg;
}

int fail(bgskip_status st, const std::string& msg) {
  std::cerr << "bgskip: error: " << msg << "\n";
  return int(st);
}

Session open_session(const Json& cfg, const CommonFlags& f, bgskip_status& st, std::string& err) {
  bgskip_session* raw = nullptr;
  OwnedString e;
  st = bgskip_session_create(cfg.dump().c_str(), f.profiles_path.empty() ? nullptr : f.profiles_path.c_str(), &raw,
                             &e.ptr);
  err = e.str();
  return Session(raw);
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return bool(out);
}

int emit(const CommonFlags& f, const OwnedString& report, const OwnedString& table, bool json_stdout) {
  if (!f.report_path.empty() && !write_file(f.report_path, report.str()))
    return fail(BGSKIP_ERROR_CONFIG, "cannot write " + f.report_path);
  std::cout << (json_stdout ? report.str() : table.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crop planning, FLOPs cost model and evaluation for background-skipping detection"};
  // `--h` is the crop height, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", bgskip_version());
  app.require_subcommand(1);

  CommonFlags flags;
  bool json_stdout = false;
  std::string annotations;
  std::string detections;
  std::string plans;
  std::string out_path;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::size_t> num_images;
  std::optional<std::uint64_t> seed;
  std::vector<double> p_sweep;
  std::vector<double> grid_p, grid_h, grid_k, grid_thr;

  auto* plan = app.add_subcommand("plan", "merge recorded proposals into downscaled crops");
  add_common(plan, flags);
  plan->add_option("--annotations", annotations, "annotation JSONL with proposals")->required();
  plan->add_option("--out", out_path, "crop-plan JSONL to write");

  auto* cost = app.add_subcommand("cost", "FLOPs of full-image vs two-stage inference for a crop-plan file");
  add_common(cost, flags);
  cost->add_option("--plans", plans, "crop-plan JSONL")->required();
  cost->add_flag("--json", json_stdout, "print the JSON report instead of the table");

  auto* eval = app.add_subcommand("eval", "sensitivity, processed area and MR-2 of a detection file");
  add_common(eval, flags);
  eval->add_option("--detections", detections, "detections JSONL")->required();
  eval->add_option("--annotations", annotations, "annotation JSONL with ground truth")->required();
  eval->add_option("--plans", plans, "crop-plan JSONL (enables first-stage metrics)");
  eval->add_flag("--json", json_stdout, "print the JSON report instead of the table");

  auto* sim = app.add_subcommand("simulate", "synthetic corpus through oracle stages, full report");
  add_common(sim, flags);
  sim->add_option("--out-dir", out_dir, "directory for corpus, plans, detections and report");
  sim->add_option("--num-images", num_images, "number of synthetic images");
  sim->add_option("--seed", seed, "scene seed");
  sim->add_option("--p-sweep", p_sweep, "extra rows for these p values")->delimiter(',');
  sim->add_option("--threads", threads, "worker threads (0 = all cores)");
  sim->add_flag("--json", json_stdout, "print the JSON report instead of the table");

  auto* sweep = app.add_subcommand("sweep", "grid sweep over p, h, k and score threshold with Pareto flags");
  add_common(sweep, flags);
  sweep->add_option("--grid-p", grid_p, "p values")->delimiter(',');
  sweep->add_option("--grid-h", grid_h, "h values")->delimiter(',');
  sweep->add_option("--grid-k", grid_k, "k values")->delimiter(',');
  sweep->add_option("--grid-score-threshold", grid_thr, "score thresholds")->delimiter(',');
  sweep->add_option("--annotations", annotations, "use recorded proposals instead of the synthetic corpus");
  sweep->add_option("--num-images", num_images, "number of synthetic images");
  sweep->add_option("--seed", seed, "scene seed");
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  sweep->add_flag("--json", json_stdout, "print the JSON report instead of the table");

  auto* profiles = app.add_subcommand("profiles", "list detector profiles");
  profiles->add_option("--profiles", flags.profiles_path, "detector profile file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Json cfg;
  try {
    cfg = build_config(flags);
  } catch (const CLI::Error& e) {
    return fail(BGSKIP_ERROR_CONFIG, e.what());
  }
  if (num_images) cfg["num_images"] = *num_images;
  if (seed) {
    if (cfg["scene"].is_null()) cfg["scene"] = Json::object();
    cfg["scene"]["seed"] = *seed;
  }
  if (!p_sweep.empty()) cfg["p_sweep"] = p_sweep;
  if (!grid_p.empty() || !grid_h.empty() || !grid_k.empty() || !grid_thr.empty()) {
    if (cfg["grid"].is_null()) cfg["grid"] = Json::object();
    if (!grid_p.empty()) cfg["grid"]["p"] = grid_p;
    if (!grid_h.empty()) cfg["grid"]["h"] = grid_h;
    if (!grid_k.empty()) cfg["grid"]["k"] = grid_k;
    if (!grid_thr.empty()) cfg["grid"]["score_threshold"] = grid_thr;
  }

  bgskip_status st = BGSKIP_OK;
  std::string err;
  Session session = open_session(cfg, flags, st, err);
  if (st != BGSKIP_OK) return fail(st, err);
  auto last = [&] { return std::string(bgskip_last_error(session.get())); };

  OwnedString report;
  OwnedString table;
  if (*plan) {
    st = bgskip_plan(session.get(), annotations.c_str(), out_path.empty() ? nullptr : out_path.c_str(), &report.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    if (!flags.report_path.empty() && !write_file(flags.report_path, report.str() + "\n"))
      return fail(BGSKIP_ERROR_CONFIG, "cannot write " + flags.report_path);
    std::cout << report.str() << "\n";
    return 0;
  }
  if (*cost) {
    st = bgskip_cost(session.get(), plans.c_str(), &report.ptr, &table.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    return emit(flags, report, table, json_stdout);
  }
  if (*eval) {
    st = bgskip_eval(session.get(), detections.c_str(), annotations.c_str(), plans.empty() ? nullptr : plans.c_str(),
                     &report.ptr, &table.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    return emit(flags, report, table, json_stdout);
  }
  if (*sim) {
    st = bgskip_simulate(session.get(), out_dir.empty() ? nullptr : out_dir.c_str(), threads, &report.ptr, &table.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    return emit(flags, report, table, json_stdout);
  }
  if (*sweep) {
    st = bgskip_sweep(session.get(), annotations.empty() ? nullptr : annotations.c_str(), threads, &report.ptr,
                      &table.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    return emit(flags, report, table, json_stdout);
  }
  if (*profiles) {
    st = bgskip_list_profiles(session.get(), &report.ptr);
    if (st != BGSKIP_OK) return fail(st, last());
    std::cout << report.str();
    return 0;
  }
  return fail(BGSKIP_ERROR_CONFIG, "no subcommand");
}
