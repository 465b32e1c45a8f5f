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

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgskip/error.hpp"

#include "bgskip/cost_model.hpp"
#include "bgskip/metrics.hpp"
#include "bgskip/pcmad.hpp"
#include "bgskip/pipeline.hpp"

namespace bgskip::io {

using Json = nlohmann::ordered_json;

/// One line of an annotation file: an image, its optional ground truth and
/// optional recorded first-stage proposals. Unknown keys are kept in `extra`
/// and written back after the known ones.
struct AnnotationRecord {
  ImageMeta image;
  std::optional<std::vector<GtBox>> gt;
  std::optional<std::vector<Proposal>> proposals;
  Json extra = Json::object();
};

struct DetectionRecord {
  std::string image_id;
  std::vector<Detection> detections;
};

Json box_to_json(const Box& b);
Box box_from_json(const Json& j);

AnnotationRecord annotation_from_json(const Json& j);
Json annotation_to_json(const AnnotationRecord& rec);
DetectionRecord detections_from_json(const Json& j);
Json detections_to_json(const DetectionRecord& rec);
CropPlan plan_from_json(const Json& j);
Json plan_to_json(const CropPlan& plan);

std::vector<AnnotationRecord> read_annotations(std::istream& in, const std::string& source);
std::vector<AnnotationRecord> read_annotations_file(const std::string& path);
std::vector<DetectionRecord> read_detections_file(const std::string& path);
std::vector<CropPlan> read_plans_file(const std::string& path);

void write_jsonl(std::ostream& out, const std::vector<Json>& records);
void write_text_file(const std::string& path, const std::string& content);

std::string dump_line(const Json& j);
std::string dump_pretty(const Json& j);

Json eval_report_to_json(const EvalReport& rep);
Json cost_report_to_json(const CostReport& rep);
Json profile_to_json(const DetectorProfile& prof);

/// Plain-text table with left-aligned first column and right-aligned rest.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string render() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt_fixed(double v, int digits);
std::string fmt_opt(const std::optional<double>& v, int digits, double scale = 1.0);

std::string eval_report_table(const EvalReport& rep);
std::string cost_report_table(const CostReport& rep, const StageProfiles& profiles);

/// Parses every non-blank line of a JSON-lines stream. Errors are rethrown as
/// Error(Data) tagged with `source:line`.
template <typename T, typename Parse>
std::vector<T> read_jsonl(std::istream& in, const std::string& source, Parse parse) {
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::Data, source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace bgskip::io
