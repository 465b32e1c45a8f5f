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

#include "bgskip/cost_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bgskip/error.hpp"

namespace bgskip {

double DetectorProfile::flops_per_pixel() const {
  if (!(gflops_at_ref > 0.0) || ref_width_px <= 0 || ref_height_px <= 0)
    throw_config("detector profile '" + name + "' needs positive GFLOPs and reference size");
  return gflops_at_ref * 1e9 / (double(ref_width_px) * double(ref_height_px));
}

double flops_baseline(const DetectorProfile& stage2, double n_pixels) {
  if (!(n_pixels > 0.0)) throw_config("pixel count N must be positive");
  return stage2.flops_per_pixel() * n_pixels;
}

double flops_bltnet(const DetectorProfile& stage1, const DetectorProfile& stage2, double n_pixels,
                    double m_pixels) {
  if (!(n_pixels > 0.0)) throw_config("pixel count N must be positive");
  if (!(m_pixels >= 0.0)) throw_config("processed pixel count M must be >= 0");
  return stage1.flops_per_pixel() * n_pixels + stage2.flops_per_pixel() * m_pixels;
}

CostReport reduction_factor(const DetectorProfile& stage1, const DetectorProfile& stage2, double n_pixels,
                            double m_pixels) {
  CostReport r;
  r.baseline_flops = flops_baseline(stage2, n_pixels);
  r.bltnet_flops = flops_bltnet(stage1, stage2, n_pixels, m_pixels);
  r.b_over_a = stage1.flops_per_pixel() / stage2.flops_per_pixel();
  r.m_over_n = m_pixels / n_pixels;
  r.reduction_factor = r.baseline_flops / r.bltnet_flops;
  return r;
}

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void parse_fail(const std::string& source, int line_no, const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line_no << ": " << msg;
  throw_data(os.str());
}

double parse_double(const std::string& text, const std::string& source, int line_no, const char* field) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    parse_fail(source, line_no, std::string("field '") + field + "' is not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& source, int line_no, const char* field) {
  const double v = parse_double(text, source, line_no, field);
  if (v != std::floor(v) || v <= 0 || v > 1e9)
    parse_fail(source, line_no, std::string("field '") + field + "' must be a positive integer");
  return int(v);
}

}  // namespace

ProfileRegistry ProfileRegistry::parse(std::istream& in, const std::string& source_name) {
  static const std::vector<std::string> kHeader{"name", "gflops_at_ref", "ref_width", "ref_height", "role", "h"};
  ProfileRegistry reg;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (!have_header) {
      if (fields != kHeader)
        parse_fail(source_name, line_no, "expected header 'name,gflops_at_ref,ref_width,ref_height,role,h'");
      have_header = true;
      continue;
    }
    if (fields.size() == 5) fields.emplace_back();
    if (fields.size() != 6) parse_fail(source_name, line_no, "expected 6 comma-separated fields");
    DetectorProfile prof;
    prof.name = fields[0];
    if (prof.name.empty()) parse_fail(source_name, line_no, "empty detector name");
    prof.gflops_at_ref = parse_double(fields[1], source_name, line_no, "gflops_at_ref");
    if (prof.gflops_at_ref <= 0) parse_fail(source_name, line_no, "gflops_at_ref must be positive");
    prof.ref_width_px = parse_int(fields[2], source_name, line_no, "ref_width");
    prof.ref_height_px = parse_int(fields[3], source_name, line_no, "ref_height");
    const std::string role = lower(fields[4]);
    if (role == "stage1") {
      prof.role = StageRole::Stage1;
    } else if (role == "stage2") {
      prof.role = StageRole::Stage2;
    } else {
      parse_fail(source_name, line_no, "role must be 'stage1' or 'stage2'");
    }
    if (!fields[5].empty()) {
      if (prof.role == StageRole::Stage1) parse_fail(source_name, line_no, "h is only meaningful for stage2 profiles");
      prof.required_crop_height_h = parse_int(fields[5], source_name, line_no, "h");
    }
    if (reg.try_find(prof.name)) parse_fail(source_name, line_no, "duplicate detector name '" + prof.name + "'");
    reg.profiles_.push_back(std::move(prof));
  }
  if (!have_header) throw_data(source_name + ": missing header line");
  return reg;
}

ProfileRegistry ProfileRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open profile file '" + path + "'");
  return parse(in, path);
}

ProfileRegistry ProfileRegistry::bundled() {
  std::istringstream in(kBundledProfiles);
  return parse(in, "<bundled profiles>");
}

ProfileRegistry ProfileRegistry::from_environment() {
  if (const char* path = std::getenv("BGSKIP_PROFILES"); path && *path) return load_file(path);
  return bundled();
}

const DetectorProfile* ProfileRegistry::try_find(const std::string& name) const {
  const std::string key = lower(name);
  for (const auto& p : profiles_) {
    if (lower(p.name) == key) return &p;
  }
  return nullptr;
}

const DetectorProfile& ProfileRegistry::find(const std::string& name) const {
  if (const auto* p = try_find(name)) return *p;
  std::ostringstream os;
  os << "unknown detector profile '" << name << "'; available:";
  for (const auto& p : profiles_) os << " " << p.name;
  throw_config(os.str());
}

std::vector<std::string> ProfileRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& p : profiles_) out.push_back(p.name);
  return out;
}

}  // namespace bgskip
