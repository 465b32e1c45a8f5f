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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bgskip/geometry.hpp"

namespace bgskip {

using ProposalId = std::int64_t;

/// First-stage candidate: a box whose height is the object-scale estimate.
struct Proposal {
  ProposalId id = 0;
  Box box;
  double score = 1.0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Parameters of the merge-and-downscale planner.
///
/// Height buckets are derived from `bucket_edges` (multiples of `h`):
///   bucket 0           = [0, edges[0]*h)            never scaled
///   bucket i (1..E-1)  = [edges[i-1]*h, edges[i]*h) scale 1/edges[i-1]
///   bucket E           = [edges[E-1]*h, inf)         scale 1/edges[E-1]
/// Buckets listed in `no_merge_buckets` keep every proposal as its own crop.
struct PcmadParams {
  double p = 0.10;
  double h = 256.0;
  std::vector<double> bucket_edges{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::set<int> no_merge_buckets;
  double score_threshold = 0.5;
  /// When false every crop keeps scale 1 (ablation of the downscaling step).
  bool adaptive_scaling = true;

  /// Throws Error(Config) on inconsistent values.
  void validate() const;
  int bucket_count() const noexcept { return int(bucket_edges.size()) + 1; }
  /// Lower and upper height bound of a bucket in pixels (upper may be inf).
  std::pair<double, double> bucket_range_px(int bucket) const;
};

/// Contiguous ranges {1, 1.5, ..., 4} (the default).
PcmadParams contiguous_bucket_preset();
/// The four published ranges [h,1.5h), [2h,2.5h), [2.5h,3h), [3.5h,4h); heights
/// falling in the gaps [1.5h,2h) and [3h,3.5h) are kept but never merged.
PcmadParams published_bucket_preset();

struct ExtendedRoi {
  Box box;
  std::vector<ProposalId> member_ids;  // sorted ascending
  Box member_bbox;

  ProposalId min_id() const { return member_ids.front(); }
};

struct MRoi {
  Box box;
  std::vector<ProposalId> member_ids;  // sorted ascending
  int bucket_index = 0;
  double scale = 1.0;
  int scaled_width_px = 1;
  int scaled_height_px = 1;

  std::int64_t scaled_pixels() const noexcept { return std::int64_t{scaled_width_px} * scaled_height_px; }
};

struct CropPlan {
  ImageMeta image;
  std::vector<MRoi> mrois;
  std::int64_t m_pixels = 0;
  double m_over_n = 0.0;
  /// Non-fatal per-proposal notes (rejected or clipped proposals).
  std::vector<std::string> diagnostics;
};

struct MergeStats {
  std::int64_t criterion_evaluations = 0;
  std::int64_t merges = 0;
};

/// Maps each proposal to the bucket containing its box height.
std::map<int, std::vector<Proposal>> assign_buckets(const std::vector<Proposal>& proposals,
                                                    const PcmadParams& params);

/// Index of the bucket containing `height_px`.
int bucket_of(double height_px, const PcmadParams& params);

double scale_factor(int bucket_index, const PcmadParams& params);

/// Greedy merge of the ROIs of one height bucket. Pairs whose merged,
/// re-extended bounding box is smaller than the sum of their areas are merged
/// closest-centers-first (ties by the smallest member ids) until no pair
/// qualifies. Output is sorted by smallest member id.
std::vector<ExtendedRoi> merge_bucket(std::vector<ExtendedRoi> rois, const ImageMeta& bounds, double p,
                                      MergeStats* stats = nullptr);

/// Merge criterion for two live ROIs.
bool merge_feasible(const ExtendedRoi& a, const ExtendedRoi& b, const ImageMeta& bounds, double p);

ExtendedRoi make_roi(const Proposal& prop, const ImageMeta& bounds, double p);

/// Full planner: score filter, extension, bucketing, merging, downscaling.
CropPlan pcmad(const std::vector<Proposal>& proposals, const ImageMeta& image, const PcmadParams& params,
               MergeStats* stats = nullptr);

/// ceil(scale * extent) with a relative guard against representation error,
/// never below one pixel.
int scaled_extent(double extent, double scale);

}  // namespace bgskip
