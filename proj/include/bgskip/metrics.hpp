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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgskip/geometry.hpp"
#include "bgskip/pcmad.hpp"

namespace bgskip {

struct GtBox {
  Box box;
  /// Crowd or unclear regions: neither a miss nor a source of false positives.
  bool ignore = false;
  /// Occluded fraction in [0, 1] when annotated.
  std::optional<double> occlusion;

  double height_px() const noexcept { return box.height(); }
};

struct Detection {
  Box box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct EvalParams {
  double k = 0.85;
  double match_iou = 0.5;
  std::vector<double> fppi_points = default_fppi_points();
  double reasonable_min_height_px = 50.0;
  double small_large_split_px = 100.0;

  void validate() const;
  /// Nine log-spaced points from 1e-2 to 1e0.
  static std::vector<double> default_fppi_points();
};

/// Ground truth of one image.
struct AnnotatedImage {
  ImageMeta image;
  std::vector<GtBox> gt;
};

struct SensitivityReport {
  std::int64_t total = 0;
  std::int64_t covered = 0;
  std::int64_t small_total = 0;
  std::int64_t small_covered = 0;
  std::int64_t large_total = 0;
  std::int64_t large_covered = 0;

  std::optional<double> overall() const;
  std::optional<double> small() const;
  std::optional<double> large() const;
};

/// Fraction of a GT box covered by the union of the crop boxes.
double coverage_fraction(const Box& gt, const std::vector<MRoi>& mrois);

/// Share of non-ignore GT boxes whose covered fraction reaches k. Plans are
/// looked up by image id; an image with GT but no plan is an Error(Data).
SensitivityReport sensitivity(const std::vector<AnnotatedImage>& images, const std::vector<CropPlan>& plans,
                              const EvalParams& params);

struct ProcessedArea {
  double avg = 0.0;
  double max = 0.0;
};

ProcessedArea relative_processed_area(const std::vector<CropPlan>& plans);

enum class MatchStatus { TruePositive, FalsePositive, Ignored };

struct Matching {
  std::vector<MatchStatus> status;  // per detection, input order
  std::vector<int> matched_gt;      // GT index for true positives, else -1
  std::int64_t gt_count = 0;        // non-ignore GT
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t ignored = 0;

  std::int64_t misses() const noexcept { return gt_count - true_positives; }
};

/// Greedy score-descending matching. A detection claims the unmatched
/// non-ignore GT of highest IoU >= match_iou; failing that, a detection whose
/// intersection-over-own-area with an ignore region reaches match_iou is
/// neutral; anything else is a false positive.
Matching match_detections(const std::vector<Detection>& dets, const std::vector<GtBox>& gts,
                          const EvalParams& params);

struct CurvePoint {
  double fppi = 0.0;
  double miss_rate = 1.0;
  double score_threshold = 0.0;
};

/// Miss rate vs false positives per image, one point per distinct score
/// (plus the empty-detection point at FPPI 0, miss rate 1).
std::vector<CurvePoint> miss_rate_curve(const std::vector<std::vector<Detection>>& dets,
                                        const std::vector<std::vector<GtBox>>& gts, const EvalParams& params);

/// Log-average miss rate over params.fppi_points, as a fraction. Miss rates
/// are clamped at 1e-4 before averaging; a curve that is zero at every
/// reference point reports 0. Throws Error(Data) without non-ignore GT.
double mr2(const std::vector<std::vector<Detection>>& dets, const std::vector<std::vector<GtBox>>& gts,
           const EvalParams& params);

/// Marks GT outside `keep` as ignore, so detections on them become neutral.
std::vector<std::vector<GtBox>> restrict_gt(const std::vector<std::vector<GtBox>>& gts,
                                            const std::function<bool(const GtBox&)>& keep);

double mroi_per_object(const std::vector<CropPlan>& plans, const std::vector<AnnotatedImage>& images);

struct EvalReport {
  std::int64_t images = 0;
  std::int64_t gt_count = 0;
  std::optional<SensitivityReport> sensitivity;
  std::optional<ProcessedArea> processed_area;
  std::optional<double> mroi_per_object;
  /// Log-average miss rate per evaluation subset (all, reasonable, small,
  /// large; bare/partial/heavy when occlusion is annotated). Absent entries
  /// mean no GT in that subset.
  std::map<std::string, std::optional<double>> mr2;
};

/// Full report. `detections` (aligned with `images`) and `plans` are optional
/// inputs; metrics that need a missing input are left empty.
EvalReport evaluate(const std::vector<AnnotatedImage>& images,
                    const std::vector<std::vector<Detection>>* detections, const std::vector<CropPlan>* plans,
                    const EvalParams& params);

}  // namespace bgskip
