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

#include "bgskip/run_config.hpp"

#include <set>

#include "bgskip/error.hpp"

namespace bgskip {

using io::Json;

OracleConfig RunConfig::default_proposer() {
  OracleConfig c;
  c.miss_prob = 0.01;
  c.center_jitter_sigma = 0.02;
  c.height_jitter_sigma = 0.05;
  c.fp_rate = 2.0;
  c.min_detectable_height_px = 0.0;
  c.tp_score_min = 0.6;
  c.fp_score_max = 0.8;
  c.seed = 2;
  return c;
}

OracleConfig RunConfig::default_detector() {
  OracleConfig c;
  c.miss_prob = 0.03;
  c.center_jitter_sigma = 0.03;
  c.height_jitter_sigma = 0.03;
  c.fp_rate = 0.05;
  c.min_detectable_height_px = 30.0;
  c.tp_score_min = 0.5;
  c.fp_score_max = 0.8;
  c.seed = 3;
  return c;
}

void RunConfig::validate() const {
  pipeline.validate();
  scene.validate();
  proposer.validate();
  detector.validate();
  if (bucket_preset != "contiguous" && bucket_preset != "published")
    throw_config("bucket_preset must be 'contiguous' or 'published'");
  if (num_images == 0) throw_config("num_images must be positive");
  for (double p : p_sweep) {
    if (!(p >= 0.0)) throw_config("p_sweep values must be >= 0");
  }
}

StageProfiles RunConfig::resolve(const ProfileRegistry& registry) {
  StageProfiles out{registry.find(profile_stage1), registry.find(profile_stage2)};
  if (!h_explicit && out.stage2.required_crop_height_h) pipeline.pcmad.h = *out.stage2.required_crop_height_h;
  h_explicit = true;
  return out;
}

void RunConfig::apply_profile_h(const ProfileRegistry& registry) {
  if (h_explicit) return;
  if (const auto* p = registry.try_find(profile_stage2); p && p->required_crop_height_h) {
    pipeline.pcmad.h = *p->required_crop_height_h;
    h_explicit = true;
  }
}

namespace {

Json oracle_to_json(const OracleConfig& c) {
  Json j;
  j["miss_prob"] = c.miss_prob;
  j["center_jitter_sigma"] = c.center_jitter_sigma;
  j["height_jitter_sigma"] = c.height_jitter_sigma;
  j["fp_rate"] = c.fp_rate;
  j["min_detectable_height_px"] = c.min_detectable_height_px;
  j["min_visible_fraction"] = c.min_visible_fraction;
  j["tp_score_min"] = c.tp_score_min;
  j["fp_score_max"] = c.fp_score_max;
  j["seed"] = c.seed;
  return j;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw_config(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) throw_config("unknown config key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw_config("config key '" + where + "." + key + "' has the wrong type");
  }
}

void read_oracle(const Json& j, OracleConfig& c, const std::string& where) {
  check_keys(j,
             {"miss_prob", "center_jitter_sigma", "height_jitter_sigma", "fp_rate", "min_detectable_height_px",
              "min_visible_fraction", "tp_score_min", "fp_score_max", "seed"},
             where);
  read(j, "miss_prob", c.miss_prob, where);
  read(j, "center_jitter_sigma", c.center_jitter_sigma, where);
  read(j, "height_jitter_sigma", c.height_jitter_sigma, where);
  read(j, "fp_rate", c.fp_rate, where);
  read(j, "min_detectable_height_px", c.min_detectable_height_px, where);
  read(j, "min_visible_fraction", c.min_visible_fraction, where);
  read(j, "tp_score_min", c.tp_score_min, where);
  read(j, "fp_score_max", c.fp_score_max, where);
  read(j, "seed", c.seed, where);
}

}  // namespace

Json to_json(const RunConfig& cfg) {
  const auto& pc = cfg.pipeline.pcmad;
  Json pcmad;
  pcmad["p"] = pc.p;
  pcmad["h"] = pc.h;
  pcmad["bucket_preset"] = cfg.bucket_preset;
  pcmad["bucket_edges"] = pc.bucket_edges;
  pcmad["no_merge_buckets"] = std::vector<int>(pc.no_merge_buckets.begin(), pc.no_merge_buckets.end());
  pcmad["score_threshold"] = pc.score_threshold;
  pcmad["adaptive_scaling"] = pc.adaptive_scaling;

  const auto& ev = cfg.pipeline.eval;
  Json eval;
  eval["k"] = ev.k;
  eval["match_iou"] = ev.match_iou;
  eval["fppi_points"] = ev.fppi_points;
  eval["reasonable_min_height_px"] = ev.reasonable_min_height_px;
  eval["small_large_split_px"] = ev.small_large_split_px;

  Json scene;
  scene["width_px"] = cfg.scene.width_px;
  scene["height_px"] = cfg.scene.height_px;
  scene["objects_per_image"] = cfg.scene.objects_per_image;
  scene["height_log_mu"] = cfg.scene.height_log_mu;
  scene["height_log_sigma"] = cfg.scene.height_log_sigma;
  scene["aspect"] = cfg.scene.aspect;
  scene["cluster_fraction"] = cfg.scene.cluster_fraction;
  scene["cluster_spread"] = cfg.scene.cluster_spread;
  scene["max_overlap_iou"] = cfg.scene.max_overlap_iou;
  scene["seed"] = cfg.scene.seed;

  Json j;
  j["pcmad"] = std::move(pcmad);
  j["nms_iou"] = cfg.pipeline.nms_iou;
  j["eval"] = std::move(eval);
  j["profiles"] = Json{{"stage1", cfg.profile_stage1}, {"stage2", cfg.profile_stage2}};
  j["scene"] = std::move(scene);
  j["proposer"] = oracle_to_json(cfg.proposer);
  j["detector"] = oracle_to_json(cfg.detector);
  j["num_images"] = cfg.num_images;
  j["p_sweep"] = cfg.p_sweep;
  j["grid"] = Json{{"p", cfg.grid.p}, {"h", cfg.grid.h}, {"k", cfg.grid.k}, {"score_threshold", cfg.grid.score_threshold}};
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  if (j.is_null()) return cfg;
  check_keys(j, {"pcmad", "nms_iou", "eval", "profiles", "scene", "proposer", "detector", "num_images", "p_sweep", "grid"},
             "config");

  if (auto it = j.find("pcmad"); it != j.end()) {
    const Json& pc = *it;
    const std::string w = "pcmad";
    check_keys(pc, {"p", "h", "bucket_preset", "bucket_edges", "no_merge_buckets", "score_threshold", "adaptive_scaling"}, w);
    auto& out = cfg.pipeline.pcmad;
    read(pc, "bucket_preset", cfg.bucket_preset, w);
    if (cfg.bucket_preset == "published") out.no_merge_buckets = published_bucket_preset().no_merge_buckets;
    read(pc, "p", out.p, w);
    if (pc.contains("h") && !pc["h"].is_null()) {
      read(pc, "h", out.h, w);
      cfg.h_explicit = true;
    }
    read(pc, "bucket_edges", out.bucket_edges, w);
    std::vector<int> no_merge;
    if (pc.contains("no_merge_buckets") && !pc["no_merge_buckets"].is_null()) {
      read(pc, "no_merge_buckets", no_merge, w);
      out.no_merge_buckets = std::set<int>(no_merge.begin(), no_merge.end());
    }
    read(pc, "score_threshold", out.score_threshold, w);
    read(pc, "adaptive_scaling", out.adaptive_scaling, w);
  }
  read(j, "nms_iou", cfg.pipeline.nms_iou, "config");
  if (auto it = j.find("eval"); it != j.end()) {
    const std::string w = "eval";
    check_keys(*it, {"k", "match_iou", "fppi_points", "reasonable_min_height_px", "small_large_split_px"}, w);
    auto& ev = cfg.pipeline.eval;
    read(*it, "k", ev.k, w);
    read(*it, "match_iou", ev.match_iou, w);
    read(*it, "fppi_points", ev.fppi_points, w);
    read(*it, "reasonable_min_height_px", ev.reasonable_min_height_px, w);
    read(*it, "small_large_split_px", ev.small_large_split_px, w);
  }
  if (auto it = j.find("profiles"); it != j.end()) {
    check_keys(*it, {"stage1", "stage2"}, "profiles");
    read(*it, "stage1", cfg.profile_stage1, "profiles");
    read(*it, "stage2", cfg.profile_stage2, "profiles");
  }
  if (auto it = j.find("scene"); it != j.end()) {
    const std::string w = "scene";
    check_keys(*it, {"width_px", "height_px", "objects_per_image", "height_log_mu", "height_log_sigma", "aspect",
                     "cluster_fraction", "cluster_spread", "max_overlap_iou", "seed"},
               w);
    auto& s = cfg.scene;
    read(*it, "width_px", s.width_px, w);
    read(*it, "height_px", s.height_px, w);
    read(*it, "objects_per_image", s.objects_per_image, w);
    read(*it, "height_log_mu", s.height_log_mu, w);
    read(*it, "height_log_sigma", s.height_log_sigma, w);
    read(*it, "aspect", s.aspect, w);
    read(*it, "cluster_fraction", s.cluster_fraction, w);
    read(*it, "cluster_spread", s.cluster_spread, w);
    read(*it, "max_overlap_iou", s.max_overlap_iou, w);
    read(*it, "seed", s.seed, w);
  }
  if (auto it = j.find("proposer"); it != j.end()) read_oracle(*it, cfg.proposer, "proposer");
  if (auto it = j.find("detector"); it != j.end()) read_oracle(*it, cfg.detector, "detector");
  read(j, "num_images", cfg.num_images, "config");
  read(j, "p_sweep", cfg.p_sweep, "config");
  if (auto it = j.find("grid"); it != j.end()) {
    check_keys(*it, {"p", "h", "k", "score_threshold"}, "grid");
    read(*it, "p", cfg.grid.p, "grid");
    read(*it, "h", cfg.grid.h, "grid");
    read(*it, "k", cfg.grid.k, "grid");
    read(*it, "score_threshold", cfg.grid.score_threshold, "grid");
  }
  cfg.validate();
  return cfg;
}

}  // namespace bgskip
