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

#include "bgskip/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "bgskip/error.hpp"

namespace bgskip {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a 64-bit hash.
double unit_interval(std::uint64_t x) { return double(splitmix64(x) >> 11) * 0x1.0p-53; }

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

struct Draws {
  std::mt19937_64& rng;
  std::uniform_real_distribution<double> u{0.0, 1.0};
  std::normal_distribution<double> n{0.0, 1.0};

  double uniform() { return u(rng); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u(rng); }
  double normal() { return n(rng); }
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<int>(mean)(rng);
  }
};

// Annotation precision of generated boxes: 0.01 px.
double snap(double v) { return std::round(v * 100.0) / 100.0; }

Box snapped(const Box& b) { return {snap(b.x_min), snap(b.y_min), snap(b.x_max), snap(b.y_max)}; }

Box place_inside(double cx, double cy, double w, double h, const ImageMeta& img) {
  w = std::min(w, double(img.width_px));
  h = std::min(h, double(img.height_px));
  const double x0 = std::clamp(cx - 0.5 * w, 0.0, img.width_px - w);
  const double y0 = std::clamp(cy - 0.5 * h, 0.0, img.height_px - h);
  return snapped({x0, y0, x0 + w, y0 + h});
}

}  // namespace

void SceneConfig::validate() const {
  if (width_px <= 0 || height_px <= 0) throw_config("scene size must be positive");
  if (!nonneg(objects_per_image)) throw_config("objects_per_image must be >= 0");
  if (!std::isfinite(height_log_mu) || !positive(height_log_sigma)) throw_config("height distribution must be finite with sigma > 0");
  if (!positive(aspect)) throw_config("aspect must be positive");
  if (!(cluster_fraction >= 0.0 && cluster_fraction <= 1.0)) throw_config("cluster_fraction must lie in [0, 1]");
  if (!positive(cluster_spread)) throw_config("cluster_spread must be positive");
  if (!(max_overlap_iou > 0.0 && max_overlap_iou <= 1.0)) throw_config("max_overlap_iou must lie in (0, 1]");
}

void OracleConfig::validate() const {
  if (!(miss_prob >= 0.0 && miss_prob <= 1.0)) throw_config("miss_prob must lie in [0, 1]");
  if (!nonneg(center_jitter_sigma) || !nonneg(height_jitter_sigma)) throw_config("jitter sigmas must be >= 0");
  if (!nonneg(fp_rate)) throw_config("fp_rate must be >= 0");
  if (!nonneg(min_detectable_height_px)) throw_config("min_detectable_height_px must be >= 0");
  if (!(min_visible_fraction >= 0.0 && min_visible_fraction <= 1.0)) throw_config("min_visible_fraction must lie in [0, 1]");
  if (!(tp_score_min >= 0.0 && tp_score_min <= 1.0)) throw_config("tp_score_min must lie in [0, 1]");
  if (!(fp_score_max >= 0.0 && fp_score_max <= 1.0)) throw_config("fp_score_max must lie in [0, 1]");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
  std::seed_seq seq{std::uint32_t(s), std::uint32_t(s >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t image_index) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, image_index);
  Draws draw{rng};

  Scene scene;
  char id[32];
  std::snprintf(id, sizeof id, "synth_%06llu", static_cast<unsigned long long>(image_index));
  scene.image = {id, cfg.width_px, cfg.height_px};

  const int count = draw.poisson(cfg.objects_per_image);
  const double max_h = 0.95 * cfg.height_px;
  for (int i = 0; i < count; ++i) {
    double h = 0.0;
    for (int tries = 0; tries < 100; ++tries) {
      h = std::exp(cfg.height_log_mu + cfg.height_log_sigma * draw.normal());
      if (h <= max_h) break;
    }
    h = std::min(h, max_h);
    const double w = cfg.aspect * h;
    const double u_cluster = draw.uniform();
    const double u_side = draw.uniform();
    const double u_gap = draw.uniform();
    const double u_x = draw.uniform();
    const double u_y = draw.uniform();

    Box box;
    if (!scene.objects.empty() && u_cluster < cfg.cluster_fraction) {
      // Next to the previous object, feet roughly level.
      const Box& anchor = scene.objects.back().box;
      const double gap = -std::log1p(-u_gap) * cfg.cluster_spread * w;
      const double cx = u_side < 0.5 ? anchor.x_min - gap - 0.5 * w : anchor.x_max + gap + 0.5 * w;
      const double cy = anchor.y_max - 0.5 * h;
      box = place_inside(cx, cy, w, h, scene.image);
    } else {
      const double x0 = u_x * (cfg.width_px - w);
      const double y0 = u_y * (cfg.height_px - h);
      box = snapped({x0, y0, x0 + w, y0 + h});
    }
    if (area(box) <= 0.0) continue;
    // Pairs this close cannot both survive NMS, even from a perfect detector.
    const bool crowded = std::any_of(scene.objects.begin(), scene.objects.end(),
                                     [&](const GtBox& g) { return iou(g.box, box) >= cfg.max_overlap_iou; });
    if (crowded) continue;
    scene.objects.push_back({box, false, std::nullopt});
  }
  return scene;
}

std::vector<Scene> generate_corpus(const SceneConfig& cfg, std::size_t n_images) {
  std::vector<Scene> out;
  out.reserve(n_images);
  for (std::size_t i = 0; i < n_images; ++i) out.push_back(generate_scene(cfg, i));
  return out;
}

OracleProposer::OracleProposer(OracleConfig cfg, SceneConfig scene_cfg)
    : cfg_(std::move(cfg)), scene_cfg_(std::move(scene_cfg)) {
  cfg_.validate();
  scene_cfg_.validate();
}

std::vector<Proposal> OracleProposer::propose(const Scene& scene) const {
  auto rng = make_rng(cfg_.seed, hash_string(scene.image.image_id), 1);
  Draws draw{rng};
  std::vector<Proposal> out;
  ProposalId next_id = 0;

  for (const auto& obj : scene.objects) {
    // Fixed number of draws per object keeps the streams aligned across
    // parameter changes.
    const double u_miss = draw.uniform();
    const double n_cx = draw.normal();
    const double n_cy = draw.normal();
    const double n_h = draw.normal();
    const double u_score = draw.uniform();
    if (obj.ignore) continue;
    const ProposalId id = next_id++;
    if (u_miss < cfg_.miss_prob) continue;

    const double h0 = obj.box.height();
    Box box = obj.box;
    if (cfg_.center_jitter_sigma > 0.0 || cfg_.height_jitter_sigma > 0.0) {
      const double ratio = std::exp(cfg_.height_jitter_sigma * n_h);
      const double cx = obj.box.center_x() + cfg_.center_jitter_sigma * h0 * n_cx;
      const double cy = obj.box.center_y() + cfg_.center_jitter_sigma * h0 * n_cy;
      box = place_inside(cx, cy, obj.box.width() * ratio, h0 * ratio, scene.image);
    }
    out.push_back({id, box, cfg_.tp_score_min + (1.0 - cfg_.tp_score_min) * u_score});
  }

  const int n_fp = draw.poisson(cfg_.fp_rate);
  for (int i = 0; i < n_fp; ++i) {
    const double h = std::min(std::exp(scene_cfg_.height_log_mu + scene_cfg_.height_log_sigma * draw.normal()),
                              0.95 * scene.image.height_px);
    const double w = scene_cfg_.aspect * h;
    const double cx = draw.uniform(0.5 * w, scene.image.width_px - 0.5 * w);
    const double cy = draw.uniform(0.5 * h, scene.image.height_px - 0.5 * h);
    const double score = cfg_.fp_score_max * draw.uniform();
    out.push_back({ProposalId(scene.objects.size()) + i, place_inside(cx, cy, w, h, scene.image), score});
  }
  return out;
}

OracleDetector::OracleDetector(OracleConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<Detection> OracleDetector::detect(const MRoi& crop, const Scene& scene) const {
  auto rng = make_rng(cfg_.seed, hash_string(scene.image.image_id),
                      std::uint64_t(crop.member_ids.empty() ? 0 : crop.member_ids.front()) + 2);
  Draws draw{rng};
  const Box frame{0.0, 0.0, double(crop.scaled_width_px), double(crop.scaled_height_px)};
  auto to_crop = [&](const Box& b) {
    return Box{(b.x_min - crop.box.x_min) * crop.scale, (b.y_min - crop.box.y_min) * crop.scale,
               (b.x_max - crop.box.x_min) * crop.scale, (b.y_max - crop.box.y_min) * crop.scale};
  };

  const std::uint64_t image_key = splitmix64(cfg_.seed) ^ hash_string(scene.image.image_id);
  std::vector<Detection> out;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& obj = scene.objects[k];
    const double u_miss = draw.uniform();
    const double n_cx = draw.normal();
    const double n_cy = draw.normal();
    const double n_h = draw.normal();
    if (obj.ignore) continue;
    const double visible = intersection_over_first(obj.box, crop.box);
    if (visible < cfg_.min_visible_fraction) continue;
    if (area(obj.box) <= 0.0 || obj.box.height() * crop.scale < cfg_.min_detectable_height_px) continue;
    if (u_miss < cfg_.miss_prob) continue;

    Box b = obj.box;
    if (cfg_.center_jitter_sigma > 0.0 || cfg_.height_jitter_sigma > 0.0) {
      const double h0 = obj.box.height();
      const double ratio = std::exp(cfg_.height_jitter_sigma * n_h);
      const double cx = obj.box.center_x() + cfg_.center_jitter_sigma * h0 * n_cx;
      const double cy = obj.box.center_y() + cfg_.center_jitter_sigma * h0 * n_cy;
      const double w = obj.box.width() * ratio;
      const double h = h0 * ratio;
      b = {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    }
    const auto local = intersect(to_crop(b), frame);
    if (!local || area(*local) <= 0.0) continue;
    // One confidence per object, shared by every crop that sees it; truncated
    // views score lower so the complete view wins the global NMS.
    const double u_score = unit_interval(image_key ^ splitmix64(k));
    out.push_back({*local, visible * (cfg_.tp_score_min + (1.0 - cfg_.tp_score_min) * u_score)});
  }

  const int n_fp = draw.poisson(cfg_.fp_rate);
  for (int i = 0; i < n_fp; ++i) {
    const double h = draw.uniform(0.2, 1.0) * frame.y_max;
    const double w = std::min(0.41 * h, frame.x_max);
    const double x0 = draw.uniform(0.0, frame.x_max - w);
    const double y0 = draw.uniform(0.0, frame.y_max - h);
    out.push_back({Box{x0, y0, x0 + w, y0 + h}, cfg_.fp_score_max * draw.uniform()});
  }
  return out;
}

}  // namespace bgskip
