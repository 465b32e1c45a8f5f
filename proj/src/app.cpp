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

#include "bgskip/app.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bgskip/error.hpp"

namespace bgskip::app {

using io::Json;

namespace {

std::string id_list(const std::vector<std::string>& ids) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) os << (i ? ", " : "") << ids[i];
  if (ids.size() > 10) os << ", ... (" << ids.size() << " total)";
  return os.str();
}

std::vector<AnnotatedImage> to_annotated(const std::vector<io::AnnotationRecord>& recs) {
  std::vector<AnnotatedImage> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back({r.image, r.gt.value_or(std::vector<GtBox>{})});
  return out;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  io::TextTable t({"p", "h", "k", "score_thr", "avg M/N", "sens %", "MR-2 %", "GFLOPs", "reduction", "pareto"});
  for (const auto& r : rows) {
    t.add_row({io::fmt_fixed(r.point.p, 3), io::fmt_fixed(r.point.h, 0), io::fmt_fixed(r.point.k, 2),
               io::fmt_fixed(r.point.score_threshold, 2), io::fmt_fixed(r.avg_m_over_n, 4),
               io::fmt_opt(r.sensitivity, 2, 100.0), io::fmt_opt(r.mr2, 2, 100.0), io::fmt_fixed(r.gflops, 2),
               io::fmt_fixed(r.reduction_factor, 2), r.pareto ? "*" : ""});
  }
  return t.render();
}

Json sweep_row_json(const SweepRow& r) {
  Json j;
  j["p"] = r.point.p;
  j["h"] = r.point.h;
  j["k"] = r.point.k;
  j["score_threshold"] = r.point.score_threshold;
  j["avg_m_over_n"] = r.avg_m_over_n;
  j["sensitivity"] = r.sensitivity ? Json(*r.sensitivity) : Json(nullptr);
  j["mr2"] = r.mr2 ? Json(*r.mr2) : Json(nullptr);
  j["gflops"] = r.gflops;
  j["reduction_factor"] = r.reduction_factor;
  j["pareto"] = r.pareto;
  return j;
}

RunConfig at_point(const RunConfig& cfg, const SweepPoint& point) {
  RunConfig c = cfg;
  c.pipeline.pcmad.p = point.p;
  c.pipeline.pcmad.h = point.h;
  c.h_explicit = true;
  c.pipeline.eval.k = point.k;
  c.pipeline.pcmad.score_threshold = point.score_threshold;
  c.validate();
  return c;
}

}  // namespace

Json report_envelope(const char* command, const RunConfig& cfg) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = to_json(cfg);
  return j;
}

Json plan_command(const RunConfig& cfg, const std::string& annotations_path, const std::string& plans_out) {
  const auto recs = io::read_annotations_file(annotations_path);
  if (recs.empty()) throw_data(annotations_path + ": no images");

  std::vector<CropPlan> plans;
  plans.reserve(recs.size());
  for (const auto& r : recs) {
    try {
      plans.push_back(pcmad(r.proposals.value_or(std::vector<Proposal>{}), r.image, cfg.pipeline.pcmad));
    } catch (const Error& e) {
      throw Error(e.kind(), annotations_path + ": image '" + r.image.image_id + "': " + e.what());
    }
  }
  if (!plans_out.empty()) {
    std::ostringstream os;
    for (const auto& p : plans) os << io::dump_line(io::plan_to_json(p)) << '\n';
    io::write_text_file(plans_out, os.str());
  }

  std::int64_t n_mrois = 0;
  std::int64_t n_diag = 0;
  for (const auto& p : plans) {
    n_mrois += std::int64_t(p.mrois.size());
    n_diag += std::int64_t(p.diagnostics.size());
  }
  const auto area = relative_processed_area(plans);
  Json summary;
  summary["images"] = plans.size();
  summary["mrois"] = n_mrois;
  summary["avg_m_over_n"] = area.avg;
  summary["max_m_over_n"] = area.max;
  summary["diagnostics"] = n_diag;
  return summary;
}

CommandOutput cost_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& plans_path) {
  const StageProfiles profiles = cfg.resolve(registry);
  const auto plans = io::read_plans_file(plans_path);
  if (plans.empty()) throw_data(plans_path + ": no plans");

  Json images = Json::array();
  for (const auto& p : plans) {
    Json row;
    row["image_id"] = p.image.image_id;
    row["cost"] = io::cost_report_to_json(
        reduction_factor(profiles.stage1, profiles.stage2, double(p.image.pixels()), double(p.m_pixels)));
    images.push_back(std::move(row));
  }
  const CostReport total = dataset_cost(profiles, plans);

  CommandOutput out;
  out.report = report_envelope("cost", cfg);
  out.report["profiles"] = Json{{"stage1", io::profile_to_json(profiles.stage1)},
                                {"stage2", io::profile_to_json(profiles.stage2)}};
  out.report["dataset"] = io::cost_report_to_json(total);
  out.report["images"] = std::move(images);
  out.table = io::cost_report_table(total, profiles);
  return out;
}

CommandOutput eval_command(const RunConfig& cfg, const std::string& detections_path,
                           const std::string& annotations_path, const std::string& plans_path) {
  const auto recs = io::read_annotations_file(annotations_path);
  const auto det_recs = io::read_detections_file(detections_path);

  std::map<std::string, const io::DetectionRecord*> det_by_id;
  for (const auto& d : det_recs) det_by_id[d.image_id] = &d;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  std::map<std::string, bool> ann_ids;
  for (const auto& r : recs) {
    ann_ids[r.image.image_id] = true;
    if (!det_by_id.contains(r.image.image_id)) missing.push_back(r.image.image_id);
  }
  for (const auto& d : det_recs) {
    if (!ann_ids.contains(d.image_id)) extra.push_back(d.image_id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::ostringstream os;
    os << "image ids of '" << detections_path << "' and '" << annotations_path << "' differ";
    if (!missing.empty()) os << "\n  missing detections for: " << id_list(missing);
    if (!extra.empty()) os << "\n  detections without annotation: " << id_list(extra);
    throw_data(os.str());
  }

  const auto images = to_annotated(recs);
  std::vector<std::vector<Detection>> dets;
  dets.reserve(recs.size());
  for (const auto& r : recs) dets.push_back(det_by_id.at(r.image.image_id)->detections);

  std::optional<std::vector<CropPlan>> plans;
  if (!plans_path.empty()) {
    auto loaded = io::read_plans_file(plans_path);
    std::map<std::string, CropPlan*> by_id;
    for (auto& p : loaded) by_id[p.image.image_id] = &p;
    std::vector<CropPlan> aligned;
    std::vector<std::string> no_plan;
    for (const auto& r : recs) {
      auto it = by_id.find(r.image.image_id);
      if (it == by_id.end()) {
        no_plan.push_back(r.image.image_id);
      } else {
        aligned.push_back(*it->second);
      }
    }
    if (!no_plan.empty()) throw_data("no crop plan for: " + id_list(no_plan));
    plans = std::move(aligned);
  }

  const EvalReport rep = evaluate(images, &dets, plans ? &*plans : nullptr, cfg.pipeline.eval);
  CommandOutput out;
  out.report = report_envelope("eval", cfg);
  out.report["eval"] = io::eval_report_to_json(rep);
  out.table = io::eval_report_table(rep);
  return out;
}

SweepRow sweep_point_synthetic(const RunConfig& cfg, const SweepPoint& point, const StageProfiles& profiles,
                               const std::vector<Scene>& scenes, unsigned threads) {
  const RunConfig c = at_point(cfg, point);
  const OracleProposer proposer(c.proposer, c.scene);
  const OracleDetector detector(c.detector);
  const auto res = run_dataset(proposer, detector, scenes, c.pipeline, profiles, threads);
  SweepRow row;
  row.point = point;
  row.avg_m_over_n = res.eval.processed_area->avg;
  row.sensitivity = res.eval.sensitivity->overall();
  row.mr2 = res.eval.mr2.at("reasonable");
  row.gflops = res.cost->bltnet_gflops();
  row.reduction_factor = res.cost->reduction_factor;
  return row;
}

CommandOutput simulate_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& out_dir,
                               unsigned threads) {
  const StageProfiles profiles = cfg.resolve(registry);
  cfg.validate();
  const auto scenes = generate_corpus(cfg.scene, cfg.num_images);
  const OracleProposer proposer(cfg.proposer, cfg.scene);
  const OracleDetector detector(cfg.detector);
  const auto res = run_dataset(proposer, detector, scenes, cfg.pipeline, profiles, threads);

  CommandOutput out;
  out.report = report_envelope("simulate", cfg);
  out.report["eval"] = io::eval_report_to_json(res.eval);
  out.report["cost"] = io::cost_report_to_json(*res.cost);
  out.table = io::eval_report_table(res.eval) + "\n" + io::cost_report_table(*res.cost, profiles);

  if (!cfg.p_sweep.empty()) {
    Json rows = Json::array();
    io::TextTable t({"p", "avg M/N", "MR-2 %"});
    for (double p : cfg.p_sweep) {
      SweepPoint pt{p, cfg.pipeline.pcmad.h, cfg.pipeline.eval.k, cfg.pipeline.pcmad.score_threshold};
      const SweepRow row = sweep_point_synthetic(cfg, pt, profiles, scenes, threads);
      rows.push_back(Json{{"p", p},
                          {"avg_m_over_n", row.avg_m_over_n},
                          {"mr2", row.mr2 ? Json(*row.mr2) : Json(nullptr)}});
      t.add_row({io::fmt_fixed(p, 3), io::fmt_fixed(row.avg_m_over_n, 4), io::fmt_opt(row.mr2, 2, 100.0)});
    }
    out.report["p_sweep"] = std::move(rows);
    out.table += "\n" + t.render();
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::ostringstream corpus;
    std::ostringstream plans;
    std::ostringstream dets;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      io::AnnotationRecord rec{scenes[i].image, scenes[i].objects, proposer.propose(scenes[i]), Json::object()};
      corpus << io::dump_line(io::annotation_to_json(rec)) << '\n';
      plans << io::dump_line(io::plan_to_json(res.images[i].plan)) << '\n';
      dets << io::dump_line(io::detections_to_json({scenes[i].image.image_id, res.images[i].detections})) << '\n';
    }
    io::write_text_file((dir / "corpus.jsonl").string(), corpus.str());
    io::write_text_file((dir / "plans.jsonl").string(), plans.str());
    io::write_text_file((dir / "detections.jsonl").string(), dets.str());
    io::write_text_file((dir / "report.json").string(), io::dump_pretty(out.report));
    io::write_text_file((dir / "report.txt").string(), out.table);
  }
  return out;
}

CommandOutput sweep_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& annotations_path,
                            unsigned threads) {
  const StageProfiles profiles = cfg.resolve(registry);
  const auto& g = cfg.grid;
  if (g.p.empty() || g.h.empty() || g.k.empty() || g.score_threshold.empty()) throw_config("sweep grid is empty");

  std::vector<SweepPoint> points;
  for (double p : g.p)
    for (double h : g.h)
      for (double k : g.k)
        for (double t : g.score_threshold) points.push_back({p, h, k, t});

  std::vector<SweepRow> rows;
  if (annotations_path.empty()) {
    const auto scenes = generate_corpus(cfg.scene, cfg.num_images);
    for (const auto& pt : points) rows.push_back(sweep_point_synthetic(cfg, pt, profiles, scenes, threads));
  } else {
    const auto recs = io::read_annotations_file(annotations_path);
    if (recs.empty()) throw_data(annotations_path + ": no images");
    const auto images = to_annotated(recs);
    const bool has_gt = std::any_of(recs.begin(), recs.end(), [](const io::AnnotationRecord& r) { return r.gt.has_value(); });
    for (const auto& pt : points) {
      const RunConfig c = at_point(cfg, pt);
      std::vector<CropPlan> plans;
      for (const auto& r : recs) plans.push_back(pcmad(r.proposals.value_or(std::vector<Proposal>{}), r.image, c.pipeline.pcmad));
      SweepRow row;
      row.point = pt;
      row.avg_m_over_n = relative_processed_area(plans).avg;
      if (has_gt) row.sensitivity = sensitivity(images, plans, c.pipeline.eval).overall();
      const CostReport cost = dataset_cost(profiles, plans);
      row.gflops = cost.bltnet_gflops();
      row.reduction_factor = cost.reduction_factor;
      rows.push_back(row);
    }
  }
  flag_pareto(rows);

  CommandOutput out;
  out.report = report_envelope("sweep", cfg);
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(sweep_row_json(r));
  out.report["rows"] = std::move(arr);
  out.table = sweep_table(rows);
  return out;
}

}  // namespace bgskip::app
