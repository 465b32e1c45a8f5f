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

#include "bgskip/pcmad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "bgskip/error.hpp"

namespace bgskip {

void PcmadParams::validate() const {
  if (!std::isfinite(p) || p < 0.0) throw_config("p must be finite and >= 0");
  if (!std::isfinite(h) || h <= 0.0) throw_config("h must be a positive number of pixels");
  if (bucket_edges.empty()) throw_config("bucket_edges must not be empty");
  if (bucket_edges.front() != 1.0) throw_config("bucket_edges must start at 1.0 (the first explicit range starts at h)");
  for (std::size_t i = 1; i < bucket_edges.size(); ++i) {
    if (!(bucket_edges[i] > bucket_edges[i - 1]) || !std::isfinite(bucket_edges[i]))
      throw_config("bucket_edges must be finite and strictly increasing");
  }
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) throw_config("score_threshold must lie in [0, 1]");
  for (int b : no_merge_buckets) {
    if (b < 0 || b >= bucket_count()) throw_config("no_merge_buckets index out of range");
  }
}

std::pair<double, double> PcmadParams::bucket_range_px(int bucket) const {
  const int e = int(bucket_edges.size());
  if (bucket < 0 || bucket > e) throw_config("bucket index out of range");
  const double lo = bucket == 0 ? 0.0 : bucket_edges[bucket - 1] * h;
  const double hi = bucket == e ? std::numeric_limits<double>::infinity() : bucket_edges[bucket] * h;
  return {lo, hi};
}

PcmadParams contiguous_bucket_preset() { return PcmadParams{}; }

PcmadParams published_bucket_preset() {
  PcmadParams params;
  // Edges {1, 1.5, 2, 2.5, 3, 3.5, 4}: buckets 2 = [1.5h, 2h) and 5 = [3h, 3.5h)
  // are the unlisted gaps.
  params.no_merge_buckets = {2, 5};
  return params;
}

int bucket_of(double height_px, const PcmadParams& params) {
  const auto& edges = params.bucket_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (height_px < edges[i] * params.h) return int(i);
  }
  return int(edges.size());
}

std::map<int, std::vector<Proposal>> assign_buckets(const std::vector<Proposal>& proposals,
                                                    const PcmadParams& params) {
  std::map<int, std::vector<Proposal>> out;
  for (const auto& prop : proposals) out[bucket_of(prop.box.height(), params)].push_back(prop);
  return out;
}

double scale_factor(int bucket_index, const PcmadParams& params) {
  params.bucket_range_px(bucket_index);  // range check
  if (bucket_index == 0) return 1.0;
  // Objects at the lower edge of the bucket land exactly at height h.
  return std::min(1.0, 1.0 / params.bucket_edges[bucket_index - 1]);
}

int scaled_extent(double extent, double scale) {
  const double v = extent * scale;
  const double c = std::ceil(v - 1e-9 * std::max(1.0, v));
  return std::max(1, int(c));
}

ExtendedRoi make_roi(const Proposal& prop, const ImageMeta& bounds, double p) {
  return ExtendedRoi{extend(prop.box, p, bounds), {prop.id}, prop.box};
}

bool merge_feasible(const ExtendedRoi& a, const ExtendedRoi& b, const ImageMeta& bounds, double p) {
  const Box merged = extend(bounding_box(a.member_bbox, b.member_bbox), p, bounds);
  return area(merged) < area(a.box) + area(b.box);
}

namespace {

struct Candidate {
  std::size_t first;   // node with the smaller min member id
  std::size_t second;
  double dist;
  ProposalId first_id;
  ProposalId second_id;

  auto key() const { return std::tie(dist, first_id, second_id); }
};

Candidate make_candidate(const std::vector<ExtendedRoi>& nodes, std::size_t a, std::size_t b) {
  if (nodes[b].min_id() < nodes[a].min_id()) std::swap(a, b);
  const double dist = std::abs(nodes[a].box.center_x() - nodes[b].box.center_x());
  return {a, b, dist, nodes[a].min_id(), nodes[b].min_id()};
}

}  // namespace

std::vector<ExtendedRoi> merge_bucket(std::vector<ExtendedRoi> rois, const ImageMeta& bounds, double p,
                                      MergeStats* stats) {
  MergeStats local;
  std::vector<ExtendedRoi> nodes = std::move(rois);
  std::vector<bool> alive(nodes.size(), true);
  std::vector<Candidate> queue;

  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      ++local.criterion_evaluations;
      if (merge_feasible(nodes[a], nodes[b], bounds, p)) queue.push_back(make_candidate(nodes, a, b));
    }
  }

  while (!queue.empty()) {
    auto best = std::min_element(queue.begin(), queue.end(),
                                 [](const Candidate& l, const Candidate& r) { return l.key() < r.key(); });
    const Candidate pick = *best;
    queue.erase(best);

    // Pairs are dropped as soon as one side merges, so a popped pair is live;
    // the criterion is still re-checked against the current ROIs.
    ++local.criterion_evaluations;
    if (!merge_feasible(nodes[pick.first], nodes[pick.second], bounds, p)) continue;

    ExtendedRoi merged;
    merged.member_bbox = bounding_box(nodes[pick.first].member_bbox, nodes[pick.second].member_bbox);
    merged.box = extend(merged.member_bbox, p, bounds);
    merged.member_ids = nodes[pick.first].member_ids;
    merged.member_ids.insert(merged.member_ids.end(), nodes[pick.second].member_ids.begin(),
                             nodes[pick.second].member_ids.end());
    std::sort(merged.member_ids.begin(), merged.member_ids.end());
    alive[pick.first] = false;
    alive[pick.second] = false;
    ++local.merges;

    std::erase_if(queue, [&](const Candidate& c) {
      return c.first == pick.first || c.first == pick.second || c.second == pick.first ||
             c.second == pick.second;
    });

    const std::size_t idx = nodes.size();
    nodes.push_back(std::move(merged));
    alive.push_back(true);
    // Every other live ROI is re-tested, including ROIs that had no partner so
    // far: a grown ROI can become mergeable with them.
    for (std::size_t c = 0; c < idx; ++c) {
      if (!alive[c]) continue;
      ++local.criterion_evaluations;
      if (merge_feasible(nodes[idx], nodes[c], bounds, p)) queue.push_back(make_candidate(nodes, idx, c));
    }
  }

  std::vector<ExtendedRoi> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (alive[i]) out.push_back(std::move(nodes[i]));
  }
  std::sort(out.begin(), out.end(), [](const ExtendedRoi& l, const ExtendedRoi& r) { return l.min_id() < r.min_id(); });
  if (stats) {
    stats->criterion_evaluations += local.criterion_evaluations;
    stats->merges += local.merges;
  }
  return out;
}

CropPlan pcmad(const std::vector<Proposal>& proposals, const ImageMeta& image, const PcmadParams& params,
               MergeStats* stats) {
  params.validate();
  if (image.width_px <= 0 || image.height_px <= 0)
    throw_data("image '" + image.image_id + "' has non-positive dimensions");

  CropPlan plan;
  plan.image = image;

  std::vector<Proposal> retained;
  std::unordered_set<ProposalId> seen;
  for (const auto& prop : proposals) {
    if (!seen.insert(prop.id).second) {
      std::ostringstream os;
      os << "image '" << image.image_id << "': duplicate proposal id " << prop.id;
      throw_data(os.str());
    }
    if (prop.score < params.score_threshold) continue;
    if (!prop.box.valid() || area(prop.box) <= 0.0) {
      std::ostringstream os;
      os << "proposal " << prop.id << " rejected: degenerate box";
      plan.diagnostics.push_back(os.str());
      continue;
    }
    const auto inside = intersect(prop.box, image.bounds());
    if (!inside || area(*inside) <= 0.0) {
      std::ostringstream os;
      os << "proposal " << prop.id << " rejected: outside the image";
      plan.diagnostics.push_back(os.str());
      continue;
    }
    Proposal kept = prop;
    if (!(*inside == prop.box)) {
      kept.box = *inside;
      std::ostringstream os;
      os << "proposal " << prop.id << " clipped to the image";
      plan.diagnostics.push_back(os.str());
    }
    retained.push_back(kept);
  }

  for (const auto& [bucket, members] : assign_buckets(retained, params)) {
    std::vector<ExtendedRoi> rois;
    rois.reserve(members.size());
    for (const auto& prop : members) rois.push_back(make_roi(prop, image, params.p));
    if (!params.no_merge_buckets.contains(bucket)) rois = merge_bucket(std::move(rois), image, params.p, stats);
    std::sort(rois.begin(), rois.end(), [](const ExtendedRoi& l, const ExtendedRoi& r) { return l.min_id() < r.min_id(); });

    const double scale = params.adaptive_scaling ? scale_factor(bucket, params) : 1.0;
    for (auto& roi : rois) {
      MRoi m;
      m.box = roi.box;
      m.member_ids = std::move(roi.member_ids);
      m.bucket_index = bucket;
      m.scale = scale;
      m.scaled_width_px = scaled_extent(m.box.width(), scale);
      m.scaled_height_px = scaled_extent(m.box.height(), scale);
      plan.m_pixels += m.scaled_pixels();
      plan.mrois.push_back(std::move(m));
    }
  }
  plan.m_over_n = double(plan.m_pixels) / double(image.pixels());
  return plan;
}

}  // namespace bgskip
