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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgskip/cost_model.hpp"
#include "bgskip/metrics.hpp"
#include "bgskip/pcmad.hpp"

namespace bgskip {

/// One image as seen by the stages. The planner only reads `image`; the
/// content is for the stages (synthetic stages read the annotated objects).
struct Scene {
  ImageMeta image;
  std::vector<GtBox> objects;
};

/// First stage: locates candidate objects and estimates their scale.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual std::vector<Proposal> propose(const Scene& scene) const = 0;
  /// False when the implementation must not be called from several threads.
  virtual bool concurrent_safe() const { return true; }
};

/// Second stage: runs on one downscaled crop and reports detections in the
/// crop's scaled pixel frame, i.e. inside [0, scaled_width] x [0, scaled_height].
class CropDetector {
 public:
  virtual ~CropDetector() = default;
  virtual std::vector<Detection> detect(const MRoi& crop, const Scene& scene) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

/// Replays proposals recorded per image id.
class RecordedProposer final : public Proposer {
 public:
  explicit RecordedProposer(std::map<std::string, std::vector<Proposal>> by_image) : by_image_(std::move(by_image)) {}
  std::vector<Proposal> propose(const Scene& scene) const override;

 private:
  std::map<std::string, std::vector<Proposal>> by_image_;
};

struct PipelineParams {
  PcmadParams pcmad;
  double nms_iou = 0.5;
  EvalParams eval;

  void validate() const;
};

/// Maps a crop-frame detection back to image coordinates. Throws Error(Data)
/// when the detection lies outside the scaled crop.
Detection remap_detection(const Detection& d, const MRoi& m);

/// Greedy suppression in order of score, then larger area, then input order:
/// a detection is dropped when its IoU with a kept one reaches the threshold.
std::vector<Detection> global_nms(const std::vector<Detection>& dets, double iou_threshold);

struct ImageResult {
  CropPlan plan;
  std::vector<Detection> detections;
};

ImageResult run_image(const Proposer& proposer, const CropDetector& detector, const Scene& scene,
                      const PipelineParams& params);

struct StageProfiles {
  DetectorProfile stage1;
  DetectorProfile stage2;
};

/// Dataset-level cost from the mean pixel count and the mean M/N.
CostReport dataset_cost(const StageProfiles& profiles, const std::vector<CropPlan>& plans);

struct DatasetResult {
  std::vector<ImageResult> images;  // same order as the input scenes
  EvalReport eval;
  std::optional<CostReport> cost;
};

/// Runs every scene on a pool of `threads` workers (0 = hardware
/// concurrency) and aggregates metrics and cost. Results do not depend on the
/// worker count or scheduling.
DatasetResult run_dataset(const Proposer& proposer, const CropDetector& detector, const std::vector<Scene>& scenes,
                          const PipelineParams& params, const std::optional<StageProfiles>& profiles = std::nullopt,
                          unsigned threads = 0);

}  // namespace bgskip
