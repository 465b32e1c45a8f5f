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

#include "bgskip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bgskip/error.hpp"

namespace bgskip {

namespace {

constexpr double kMissRateFloor = 1e-4;

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return double(num) / double(den);
}

}  // namespace

std::vector<double> EvalParams::default_fppi_points() {
  std::vector<double> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(std::pow(10.0, -2.0 + 0.25 * i));
  return pts;
}

void EvalParams::validate() const {
  if (!(k > 0.0 && k <= 1.0)) throw_config("k must lie in (0, 1]");
  if (!(match_iou > 0.0 && match_iou <= 1.0)) throw_config("match_iou must lie in (0, 1]");
  if (fppi_points.empty()) throw_config("fppi_points must not be empty");
  for (std::size_t i = 0; i < fppi_points.size(); ++i) {
    if (!(fppi_points[i] > 0.0) || !std::isfinite(fppi_points[i])) throw_config("fppi_points must be positive");
    if (i > 0 && !(fppi_points[i] > fppi_points[i - 1])) throw_config("fppi_points must be strictly increasing");
  }
  if (!(reasonable_min_height_px >= 0.0)) throw_config("reasonable_min_height_px must be >= 0");
  if (!(small_large_split_px > 0.0)) throw_config("small_large_split_px must be positive");
}

std::optional<double> SensitivityReport::overall() const { return ratio(covered, total); }
std::optional<double> SensitivityReport::small() const { return ratio(small_covered, small_total); }
std::optional<double> SensitivityReport::large() const { return ratio(large_covered, large_total); }

double coverage_fraction(const Box& gt, const std::vector<MRoi>& mrois) {
  const double a = area(gt);
  if (a <= 0.0) throw_data("coverage of a zero-area GT box");
  std::vector<Box> pieces;
  for (const auto& m : mrois) {
    if (auto inter = intersect(gt, m.box)) pieces.push_back(*inter);
  }
  return union_area(pieces) / a;
}

SensitivityReport sensitivity(const std::vector<AnnotatedImage>& images, const std::vector<CropPlan>& plans,
                              const EvalParams& params) {
  params.validate();
  std::unordered_map<std::string, const CropPlan*> by_id;
  for (const auto& plan : plans) by_id[plan.image.image_id] = &plan;

  SensitivityReport rep;
  for (const auto& img : images) {
    const bool has_gt = std::any_of(img.gt.begin(), img.gt.end(), [](const GtBox& g) { return !g.ignore; });
    if (!has_gt) continue;
    auto it = by_id.find(img.image.image_id);
    if (it == by_id.end()) throw_data("no crop plan for image '" + img.image.image_id + "'");
    for (const auto& g : img.gt) {
      if (g.ignore) continue;
      const bool covered = coverage_fraction(g.box, it->second->mrois) >= params.k;
      const bool small = g.height_px() < params.small_large_split_px;
      ++rep.total;
      rep.covered += covered;
      if (small) {
        ++rep.small_total;
        rep.small_covered += covered;
      } else {
        ++rep.large_total;
        rep.large_covered += covered;
      }
    }
  }
  return rep;
}

ProcessedArea relative_processed_area(const std::vector<CropPlan>& plans) {
  if (plans.empty()) throw_config("relative processed area of an empty dataset");
  ProcessedArea out;
  double sum = 0.0;
  for (const auto& p : plans) {
    sum += p.m_over_n;
    out.max = std::max(out.max, p.m_over_n);
  }
  out.avg = sum / double(plans.size());
  return out;
}

Matching match_detections(const std::vector<Detection>& dets, const std::vector<GtBox>& gts,
                          const EvalParams& params) {
  Matching m;
  m.status.assign(dets.size(), MatchStatus::FalsePositive);
  m.matched_gt.assign(dets.size(), -1);
  for (const auto& g : gts) m.gt_count += !g.ignore;

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<bool> taken(gts.size(), false);
  for (std::size_t di : order) {
    const Box& d = dets[di].box;
    int best = -1;
    double best_iou = params.match_iou;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gts[gi].ignore || taken[gi]) continue;
      const double v = iou(d, gts[gi].box);
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = int(gi);
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[best] = true;
      m.status[di] = MatchStatus::TruePositive;
      m.matched_gt[di] = best;
      ++m.true_positives;
      continue;
    }
    const bool on_ignore = std::any_of(gts.begin(), gts.end(), [&](const GtBox& g) {
      return g.ignore && intersection_over_first(d, g.box) >= params.match_iou;
    });
    if (on_ignore) {
      m.status[di] = MatchStatus::Ignored;
      ++m.ignored;
    } else {
      ++m.false_positives;
    }
  }
  return m;
}

std::vector<CurvePoint> miss_rate_curve(const std::vector<std::vector<Detection>>& dets,
                                        const std::vector<std::vector<GtBox>>& gts, const EvalParams& params) {
  params.validate();
  if (dets.size() != gts.size()) throw_data("detections and ground truth cover different image counts");
  if (gts.empty()) throw_data("miss-rate curve needs at least one image");

  struct Scored {
    double score;
    bool tp;
  };
  std::vector<Scored> scored;
  std::int64_t gt_total = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const Matching m = match_detections(dets[i], gts[i], params);
    gt_total += m.gt_count;
    for (std::size_t d = 0; d < dets[i].size(); ++d) {
      if (m.status[d] == MatchStatus::Ignored) continue;
      scored.push_back({dets[i][d].score, m.status[d] == MatchStatus::TruePositive});
    }
  }
  if (gt_total == 0) throw_data("miss rate needs at least one non-ignore GT box");
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double n_images = double(gts.size());
  std::vector<CurvePoint> curve;
  curve.push_back({0.0, 1.0, std::numeric_limits<double>::infinity()});
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (std::size_t i = 0; i < scored.size();) {
    const double s = scored[i].score;
    for (; i < scored.size() && scored[i].score == s; ++i) {
      if (scored[i].tp) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.push_back({double(fp) / n_images, 1.0 - double(tp) / double(gt_total), s});
  }
  return curve;
}

double mr2(const std::vector<std::vector<Detection>>& dets, const std::vector<std::vector<GtBox>>& gts,
           const EvalParams& params) {
  const auto curve = miss_rate_curve(dets, gts, params);
  double log_sum = 0.0;
  bool all_zero = true;
  for (double ref : params.fppi_points) {
    double best = 1.0;
    for (const auto& pt : curve) {
      if (pt.fppi <= ref) best = std::min(best, pt.miss_rate);
    }
    all_zero = all_zero && best <= 0.0;
    log_sum += std::log(std::max(best, kMissRateFloor));
  }
  if (all_zero) return 0.0;
  return std::exp(log_sum / double(params.fppi_points.size()));
}

std::vector<std::vector<GtBox>> restrict_gt(const std::vector<std::vector<GtBox>>& gts,
                                            const std::function<bool(const GtBox&)>& keep) {
  auto out = gts;
  for (auto& img : out) {
    for (auto& g : img) {
      if (!keep(g)) g.ignore = true;
    }
  }
  return out;
}

double mroi_per_object(const std::vector<CropPlan>& plans, const std::vector<AnnotatedImage>& images) {
  std::int64_t gt = 0;
  for (const auto& img : images) {
    for (const auto& g : img.gt) gt += !g.ignore;
  }
  if (gt == 0) throw_data("mROI-per-object ratio needs at least one non-ignore GT box");
  std::int64_t n = 0;
  for (const auto& p : plans) n += std::int64_t(p.mrois.size());
  return double(n) / double(gt);
}

EvalReport evaluate(const std::vector<AnnotatedImage>& images,
                    const std::vector<std::vector<Detection>>* detections, const std::vector<CropPlan>* plans,
                    const EvalParams& params) {
  params.validate();
  EvalReport rep;
  rep.images = std::int64_t(images.size());
  for (const auto& img : images) {
    for (const auto& g : img.gt) rep.gt_count += !g.ignore;
  }

  if (plans) {
    rep.sensitivity = sensitivity(images, *plans, params);
    if (!plans->empty()) rep.processed_area = relative_processed_area(*plans);
    if (rep.gt_count > 0) rep.mroi_per_object = mroi_per_object(*plans, images);
  }

  if (detections) {
    if (detections->size() != images.size()) throw_data("detections and annotations cover different image counts");
    std::vector<std::vector<GtBox>> gts;
    gts.reserve(images.size());
    for (const auto& img : images) gts.push_back(img.gt);

    const double min_h = params.reasonable_min_height_px;
    const double split = params.small_large_split_px;
    auto reasonable = [min_h](const GtBox& g) { return g.height_px() >= min_h; };
    std::vector<std::pair<std::string, std::function<bool(const GtBox&)>>> subsets{
        {"all", [](const GtBox&) { return true; }},
        {"reasonable", reasonable},
        {"small", [=](const GtBox& g) { return reasonable(g) && g.height_px() < split; }},
        {"large", [=](const GtBox& g) { return reasonable(g) && g.height_px() >= split; }},
    };
    const bool has_occlusion = std::any_of(images.begin(), images.end(), [](const AnnotatedImage& img) {
      return std::any_of(img.gt.begin(), img.gt.end(), [](const GtBox& g) { return g.occlusion.has_value(); });
    });
    if (has_occlusion) {
      auto occl_between = [=](double lo, double hi) {
        return [=](const GtBox& g) { return reasonable(g) && g.occlusion && *g.occlusion > lo && *g.occlusion <= hi; };
      };
      subsets.emplace_back("bare", occl_between(-1.0, 0.1));
      subsets.emplace_back("partial", occl_between(0.1, 0.35));
      subsets.emplace_back("heavy", occl_between(0.35, 0.8));
    }
    for (const auto& [name, keep] : subsets) {
      auto sub = restrict_gt(gts, keep);
      std::int64_t n = 0;
      for (const auto& img : sub) {
        for (const auto& g : img) n += !g.ignore;
      }
      rep.mr2[name] = n > 0 ? std::optional<double>(mr2(*detections, sub, params)) : std::nullopt;
    }
  }
  return rep;
}

}  // namespace bgskip
