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
#include <string>
#include <vector>

namespace bgskip {

// FLOPs count multiply-add operations. The model is linear in pixel count:
// a detector costs flops_per_pixel * pixels at any resolution.

enum class StageRole { Stage1, Stage2 };

struct DetectorProfile {
  std::string name;
  double gflops_at_ref = 0.0;
  int ref_width_px = 0;
  int ref_height_px = 0;
  StageRole role = StageRole::Stage2;
  /// Crop height the detector needs for accurate results (stage-2 only).
  std::optional<int> required_crop_height_h;

  double flops_per_pixel() const;
};

struct CostReport {
  double baseline_flops = 0.0;
  double bltnet_flops = 0.0;
  double b_over_a = 0.0;
  double m_over_n = 0.0;
  double reduction_factor = 0.0;

  double baseline_gflops() const { return baseline_flops * 1e-9; }
  double bltnet_gflops() const { return bltnet_flops * 1e-9; }
};

/// Full-image cost of the stage-2 detector alone: A * N.
double flops_baseline(const DetectorProfile& stage2, double n_pixels);

/// Two-stage cost: B * N for the coarse pass plus A * M for the crops.
double flops_bltnet(const DetectorProfile& stage1, const DetectorProfile& stage2, double n_pixels,
                    double m_pixels);

/// Cost summary; reduction_factor = baseline / two-stage = 1 / (B/A + M/N).
CostReport reduction_factor(const DetectorProfile& stage1, const DetectorProfile& stage2, double n_pixels,
                            double m_pixels);

/// Set of detector profiles loaded from a profile file.
///
/// File format: comma-separated, `#` starts a comment line, the first
/// non-comment line is the header
///   name,gflops_at_ref,ref_width,ref_height,role,h
/// where role is `stage1` or `stage2` and `h` may be empty.
class ProfileRegistry {
 public:
  static ProfileRegistry parse(std::istream& in, const std::string& source_name);
  static ProfileRegistry load_file(const std::string& path);
  /// Profiles compiled into the library.
  static ProfileRegistry bundled();
  /// Bundled profiles, or the file named by $BGSKIP_PROFILES when set.
  static ProfileRegistry from_environment();

  /// Case-insensitive lookup; throws Error(Config) listing known names.
  const DetectorProfile& find(const std::string& name) const;
  const DetectorProfile* try_find(const std::string& name) const;
  const std::vector<DetectorProfile>& profiles() const noexcept { return profiles_; }
  std::vector<std::string> names() const;

 private:
  std::vector<DetectorProfile> profiles_;
};

extern const char* const kBundledProfiles;

}  // namespace bgskip
