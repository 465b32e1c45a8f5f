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

#include <cstddef>
#include <string>
#include <vector>

#include "bgskip/cost_model.hpp"
#include "bgskip/io.hpp"
#include "bgskip/pipeline.hpp"
#include "bgskip/simulation.hpp"

namespace bgskip {

inline constexpr const char* kToolName = "bgskip";
inline constexpr const char* kToolVersion = "0.1.0";

struct SweepGrid {
  std::vector<double> p{0.05, 0.10, 0.20};
  std::vector<double> h{128.0, 256.0, 384.0};
  std::vector<double> k{0.85};
  std::vector<double> score_threshold{0.5};
};

/// Everything that determines a run's output. Reports embed it verbatim.
struct RunConfig {
  PipelineParams pipeline;
  std::string bucket_preset = "contiguous";
  std::string profile_stage1 = "C&S";
  std::string profile_stage2 = "Pedestron(HRNet)";
  SceneConfig scene;
  OracleConfig proposer = default_proposer();
  OracleConfig detector = default_detector();
  std::size_t num_images = 500;
  std::vector<double> p_sweep;
  SweepGrid grid;

  /// True when `pipeline.pcmad.h` was set by the user rather than defaulted;
  /// otherwise the stage-2 profile's crop height is used. Not serialized.
  bool h_explicit = false;

  static OracleConfig default_proposer();
  static OracleConfig default_detector();

  void validate() const;
  /// Checks profile names and applies the stage-2 crop height when `h` was
  /// not given explicitly.
  StageProfiles resolve(const ProfileRegistry& registry);
  /// Like resolve() for `h` only; unknown profile names are not an error.
  void apply_profile_h(const ProfileRegistry& registry);
};

io::Json to_json(const RunConfig& cfg);
/// Overlays `j` on the defaults. Unknown keys are an Error(Config).
RunConfig run_config_from_json(const io::Json& j);

}  // namespace bgskip
