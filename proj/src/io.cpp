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

#include "bgskip/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <unordered_set>

namespace bgskip::io {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw_data("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw_data(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw_data(std::string("field '") + what + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw_data(std::string("field '") + what + "' must be finite");
  return v;
}

int positive_int(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() <= 0 || j.get<long long>() > 1000000000)
    throw_data(std::string("field '") + what + "' must be a positive integer");
  return j.get<int>();
}

std::string string_field(const Json& j, const char* what) {
  if (!j.is_string()) throw_data(std::string("field '") + what + "' must be a string");
  return j.get<std::string>();
}

Box positive_box(const Json& j, const char* what) {
  Box b = box_from_json(j);
  if (area(b) <= 0.0) throw_data(std::string(what) + " box must have positive area");
  return b;
}

ImageMeta image_from_json(const Json& j) {
  ImageMeta img;
  img.image_id = string_field(require(j, "image_id"), "image_id");
  img.width_px = positive_int(require(j, "width"), "width");
  img.height_px = positive_int(require(j, "height"), "height");
  return img;
}

}  // namespace

Json box_to_json(const Box& b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

Box box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw_data("box must be an array [x_min, y_min, x_max, y_max]");
  return Box::make(number(j[0], "box"), number(j[1], "box"), number(j[2], "box"), number(j[3], "box"));
}

AnnotationRecord annotation_from_json(const Json& j) {
  static const std::set<std::string> kKnown{"image_id", "width", "height", "gt", "proposals"};
  AnnotationRecord rec;
  rec.image = image_from_json(j);
  if (auto it = j.find("gt"); it != j.end()) {
    if (!it->is_array()) throw_data("field 'gt' must be an array");
    std::vector<GtBox> gt;
    for (const auto& g : *it) {
      GtBox box;
      box.box = positive_box(require(g, "box"), "gt");
      if (auto ig = g.find("ignore"); ig != g.end()) {
        if (!ig->is_boolean()) throw_data("field 'ignore' must be a boolean");
        box.ignore = ig->get<bool>();
      }
      if (auto oc = g.find("occlusion"); oc != g.end() && !oc->is_null()) {
        const double v = number(*oc, "occlusion");
        if (v < 0.0 || v > 1.0) throw_data("field 'occlusion' must lie in [0, 1]");
        box.occlusion = v;
      }
      gt.push_back(box);
    }
    rec.gt = std::move(gt);
  }
  if (auto it = j.find("proposals"); it != j.end()) {
    if (!it->is_array()) throw_data("field 'proposals' must be an array");
    std::vector<Proposal> props;
    for (const auto& p : *it) {
      Proposal prop;
      const Json& id = require(p, "id");
      if (!id.is_number_integer()) throw_data("proposal 'id' must be an integer");
      prop.id = id.get<ProposalId>();
      prop.box = box_from_json(require(p, "box"));
      prop.score = number(require(p, "score"), "score");
      if (prop.score < 0.0 || prop.score > 1.0) throw_data("proposal score must lie in [0, 1]");
      props.push_back(prop);
    }
    rec.proposals = std::move(props);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnown.contains(it.key())) rec.extra[it.key()] = it.value();
  }
  return rec;
}

Json annotation_to_json(const AnnotationRecord& rec) {
  Json j;
  j["image_id"] = rec.image.image_id;
  j["width"] = rec.image.width_px;
  j["height"] = rec.image.height_px;
  if (rec.gt) {
    Json arr = Json::array();
    for (const auto& g : *rec.gt) {
      Json e;
      e["box"] = box_to_json(g.box);
      e["ignore"] = g.ignore;
      if (g.occlusion) e["occlusion"] = *g.occlusion;
      arr.push_back(std::move(e));
    }
    j["gt"] = std::move(arr);
  }
  if (rec.proposals) {
    Json arr = Json::array();
    for (const auto& p : *rec.proposals) {
      arr.push_back(Json{{"id", p.id}, {"box", box_to_json(p.box)}, {"score", p.score}});
    }
    j["proposals"] = std::move(arr);
  }
  for (auto it = rec.extra.begin(); it != rec.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

DetectionRecord detections_from_json(const Json& j) {
  DetectionRecord rec;
  rec.image_id = string_field(require(j, "image_id"), "image_id");
  const Json& arr = require(j, "detections");
  if (!arr.is_array()) throw_data("field 'detections' must be an array");
  for (const auto& d : arr) {
    Detection det;
    det.box = positive_box(require(d, "box"), "detection");
    det.score = number(require(d, "score"), "score");
    rec.detections.push_back(det);
  }
  return rec;
}

Json detections_to_json(const DetectionRecord& rec) {
  Json arr = Json::array();
  for (const auto& d : rec.detections) arr.push_back(Json{{"box", box_to_json(d.box)}, {"score", d.score}});
  Json j;
  j["image_id"] = rec.image_id;
  j["detections"] = std::move(arr);
  return j;
}

Json plan_to_json(const CropPlan& plan) {
  Json j;
  j["image_id"] = plan.image.image_id;
  j["width"] = plan.image.width_px;
  j["height"] = plan.image.height_px;
  j["m_pixels"] = plan.m_pixels;
  j["m_over_n"] = plan.m_over_n;
  Json arr = Json::array();
  for (const auto& m : plan.mrois) {
    Json e;
    e["box"] = box_to_json(m.box);
    e["members"] = m.member_ids;
    e["bucket"] = m.bucket_index;
    e["scale"] = m.scale;
    e["scaled_width"] = m.scaled_width_px;
    e["scaled_height"] = m.scaled_height_px;
    arr.push_back(std::move(e));
  }
  j["mrois"] = std::move(arr);
  if (!plan.diagnostics.empty()) j["diagnostics"] = plan.diagnostics;
  return j;
}

CropPlan plan_from_json(const Json& j) {
  CropPlan plan;
  plan.image = image_from_json(j);
  const Json& arr = require(j, "mrois");
  if (!arr.is_array()) throw_data("field 'mrois' must be an array");
  for (const auto& e : arr) {
    MRoi m;
    m.box = box_from_json(require(e, "box"));
    const Json& members = require(e, "members");
    if (!members.is_array() || members.empty()) throw_data("field 'members' must be a non-empty array");
    for (const auto& id : members) {
      if (!id.is_number_integer()) throw_data("member ids must be integers");
      m.member_ids.push_back(id.get<ProposalId>());
    }
    const Json& bucket = require(e, "bucket");
    if (!bucket.is_number_integer() || bucket.get<int>() < 0) throw_data("field 'bucket' must be a non-negative integer");
    m.bucket_index = bucket.get<int>();
    m.scale = number(require(e, "scale"), "scale");
    if (!(m.scale > 0.0 && m.scale <= 1.0)) throw_data("field 'scale' must lie in (0, 1]");
    m.scaled_width_px = positive_int(require(e, "scaled_width"), "scaled_width");
    m.scaled_height_px = positive_int(require(e, "scaled_height"), "scaled_height");
    plan.m_pixels += m.scaled_pixels();
    plan.mrois.push_back(std::move(m));
  }
  if (auto it = j.find("m_pixels"); it != j.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() != plan.m_pixels)
      throw_data("field 'm_pixels' disagrees with the sum over mrois");
  }
  if (auto it = j.find("diagnostics"); it != j.end() && it->is_array()) {
    for (const auto& d : *it) plan.diagnostics.push_back(string_field(d, "diagnostics"));
  }
  plan.m_over_n = double(plan.m_pixels) / double(plan.image.pixels());
  return plan;
}

namespace {

template <typename T>
void reject_duplicate_ids(const std::vector<T>& recs, const std::string& source, auto id_of) {
  std::unordered_set<std::string> seen;
  for (const auto& r : recs) {
    if (!seen.insert(id_of(r)).second) throw_data(source + ": duplicate image_id '" + id_of(r) + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::vector<AnnotationRecord> read_annotations(std::istream& in, const std::string& source) {
  auto recs = read_jsonl<AnnotationRecord>(in, source, annotation_from_json);
  reject_duplicate_ids(recs, source, [](const AnnotationRecord& r) { return r.image.image_id; });
  return recs;
}

std::vector<AnnotationRecord> read_annotations_file(const std::string& path) {
  auto in = open_input(path);
  return read_annotations(in, path);
}

std::vector<DetectionRecord> read_detections_file(const std::string& path) {
  auto in = open_input(path);
  auto recs = read_jsonl<DetectionRecord>(in, path, detections_from_json);
  reject_duplicate_ids(recs, path, [](const DetectionRecord& r) { return r.image_id; });
  return recs;
}

std::vector<CropPlan> read_plans_file(const std::string& path) {
  auto in = open_input(path);
  auto recs = read_jsonl<CropPlan>(in, path, plan_from_json);
  reject_duplicate_ids(recs, path, [](const CropPlan& r) { return r.image.image_id; });
  return recs;
}

std::string dump_line(const Json& j) { return j.dump(); }
std::string dump_pretty(const Json& j) { return j.dump(2) + "\n"; }

void write_jsonl(std::ostream& out, const std::vector<Json>& records) {
  for (const auto& r : records) out << r.dump() << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_config("cannot write '" + path + "'");
  out << content;
  if (!out) throw_config("write to '" + path + "' failed");
}

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json eval_report_to_json(const EvalReport& rep) {
  Json j;
  j["images"] = rep.images;
  j["gt_count"] = rep.gt_count;
  if (rep.sensitivity) {
    const auto& s = *rep.sensitivity;
    j["sensitivity"] = Json{{"overall", opt_json(s.overall())},
                            {"small", opt_json(s.small())},
                            {"large", opt_json(s.large())},
                            {"total", s.total},
                            {"covered", s.covered},
                            {"small_total", s.small_total},
                            {"small_covered", s.small_covered},
                            {"large_total", s.large_total},
                            {"large_covered", s.large_covered}};
  } else {
    j["sensitivity"] = nullptr;
  }
  if (rep.processed_area) {
    j["m_over_n"] = Json{{"avg", rep.processed_area->avg}, {"max", rep.processed_area->max}};
  } else {
    j["m_over_n"] = nullptr;
  }
  j["mroi_per_object"] = opt_json(rep.mroi_per_object);
  Json mr = Json::object();
  for (const auto& [name, v] : rep.mr2) mr[name] = opt_json(v);
  j["mr2"] = std::move(mr);
  return j;
}

Json cost_report_to_json(const CostReport& rep) {
  Json j;
  j["baseline_gflops"] = rep.baseline_gflops();
  j["bltnet_gflops"] = rep.bltnet_gflops();
  j["b_over_a"] = rep.b_over_a;
  j["m_over_n"] = rep.m_over_n;
  j["reduction_factor"] = rep.reduction_factor;
  return j;
}

Json profile_to_json(const DetectorProfile& prof) {
  Json j;
  j["name"] = prof.name;
  j["gflops_at_ref"] = prof.gflops_at_ref;
  j["ref_width"] = prof.ref_width_px;
  j["ref_height"] = prof.ref_height_px;
  j["role"] = prof.role == StageRole::Stage1 ? "stage1" : "stage2";
  j["h"] = prof.required_crop_height_h ? Json(*prof.required_crop_height_h) : Json(nullptr);
  return j;
}

TextTable::TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

void TextTable::add_row(std::vector<std::string> row) {
  row.resize(rows_.front().size());
  rows_.push_back(std::move(row));
}

std::string TextTable::render() const {
  std::vector<std::size_t> width(rows_.front().size(), 0);
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) os << "  ";
      if (c == 0) {
        os << std::left << std::setw(int(width[c])) << r[c];
      } else {
        os << std::right << std::setw(int(width[c])) << r[c];
      }
    }
    os << '\n';
  };
  emit(rows_.front());
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (std::size_t i = 1; i < rows_.size(); ++i) emit(rows_[i]);
  return os.str();
}

std::string fmt_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v, int digits, double scale) {
  return v ? fmt_fixed(*v * scale, digits) : std::string("-");
}

std::string eval_report_table(const EvalReport& rep) {
  TextTable t({"metric", "value"});
  t.add_row({"images", std::to_string(rep.images)});
  t.add_row({"gt objects", std::to_string(rep.gt_count)});
  if (rep.sensitivity) {
    t.add_row({"sensitivity %", fmt_opt(rep.sensitivity->overall(), 2, 100.0)});
    t.add_row({"sensitivity small %", fmt_opt(rep.sensitivity->small(), 2, 100.0)});
    t.add_row({"sensitivity large %", fmt_opt(rep.sensitivity->large(), 2, 100.0)});
  }
  if (rep.processed_area) {
    t.add_row({"avg M/N", fmt_fixed(rep.processed_area->avg, 4)});
    t.add_row({"max M/N", fmt_fixed(rep.processed_area->max, 4)});
  }
  if (rep.mroi_per_object) t.add_row({"mROIs per object", fmt_fixed(*rep.mroi_per_object, 3)});
  for (const auto& [name, v] : rep.mr2) t.add_row({"MR-2 " + name + " %", fmt_opt(v, 2, 100.0)});
  return t.render();
}

std::string cost_report_table(const CostReport& rep, const StageProfiles& profiles) {
  TextTable t({"quantity", "value"});
  t.add_row({"stage 1", profiles.stage1.name});
  t.add_row({"stage 2", profiles.stage2.name});
  t.add_row({"baseline GFLOPs", fmt_fixed(rep.baseline_gflops(), 2)});
  t.add_row({"two-stage GFLOPs", fmt_fixed(rep.bltnet_gflops(), 2)});
  t.add_row({"B/A", fmt_fixed(rep.b_over_a, 4)});
  t.add_row({"M/N", fmt_fixed(rep.m_over_n, 4)});
  t.add_row({"reduction factor", fmt_fixed(rep.reduction_factor, 2)});
  return t.render();
}

}  // namespace bgskip::io
