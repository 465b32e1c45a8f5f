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

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bgskip/pipeline.hpp"

namespace bgskip {

/// Synthetic street-scene generator. Object heights are log-normal; the
/// defaults put about 70% of objects below 100 px.
struct SceneConfig {
  int width_px = 2048;
  int height_px = 1024;
  double objects_per_image = 7.0;  // Poisson mean
  double height_log_mu = 4.2906;   // ln(px)
  double height_log_sigma = 0.6;
  double aspect = 0.41;            // width / height
  double cluster_fraction = 0.3;   // share of objects placed beside an earlier one
  double cluster_spread = 0.5;     // mean horizontal gap, in object widths
  double max_overlap_iou = 0.5;    // objects overlapping an earlier one at this IoU or more are dropped
  std::uint64_t seed = 1;

  void validate() const;
};

/// Error model shared by the synthetic proposer and detector.
struct OracleConfig {
  double miss_prob = 0.0;
  double center_jitter_sigma = 0.0;  // fraction of object height
  double height_jitter_sigma = 0.0;  // sigma of the log height ratio
  double fp_rate = 0.0;              // Poisson mean, per image (proposer) or per crop (detector)
  double min_detectable_height_px = 0.0;
  /// Detector only: share of the object that must lie inside the crop.
  double min_visible_fraction = 0.85;
  double tp_score_min = 0.6;  // true-positive scores ~ U(tp_score_min, 1), times visible fraction for crops
  double fp_score_max = 0.8;  // false-positive scores ~ U(0, fp_score_max)
  std::uint64_t seed = 2;

  void validate() const;
};

/// Stateless counter-based seeding: the stream of (seed, a, b) does not
/// depend on which thread or in which order it is requested.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
std::uint64_t hash_string(const std::string& s);

Scene generate_scene(const SceneConfig& cfg, std::uint64_t image_index);
std::vector<Scene> generate_corpus(const SceneConfig& cfg, std::size_t n_images);

class OracleProposer final : public Proposer {
 public:
  OracleProposer(OracleConfig cfg, SceneConfig scene_cfg);
  std::vector<Proposal> propose(const Scene& scene) const override;

 private:
  OracleConfig cfg_;
  SceneConfig scene_cfg_;
};

class OracleDetector final : public CropDetector {
 public:
  explicit OracleDetector(OracleConfig cfg);
  std::vector<Detection> detect(const MRoi& crop, const Scene& scene) const override;

 private:
  OracleConfig cfg_;
};

}  // namespace bgskip
