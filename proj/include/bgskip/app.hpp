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

#include <string>

#include "bgskip/io.hpp"
#include "bgskip/run_config.hpp"
#include "bgskip/sweep.hpp"

namespace bgskip::app {

/// Machine-readable report plus its human-readable rendering.
struct CommandOutput {
  io::Json report;
  std::string table;
};

/// Plans every annotated image from its recorded proposals and writes one
/// plan record per line to `plans_out` (skipped when empty). Returns the
/// summary record.
io::Json plan_command(const RunConfig& cfg, const std::string& annotations_path, const std::string& plans_out);

CommandOutput cost_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& plans_path);

/// Evaluates detections against annotations; `plans_path` may be empty.
CommandOutput eval_command(const RunConfig& cfg, const std::string& detections_path,
                           const std::string& annotations_path, const std::string& plans_path);

/// Generates the synthetic corpus, runs both oracle stages and evaluates.
/// Writes corpus.jsonl, plans.jsonl, detections.jsonl, report.json and
/// report.txt to `out_dir` unless it is empty.
CommandOutput simulate_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& out_dir,
                               unsigned threads);

/// Grid sweep over cfg.grid. With `annotations_path` the recorded proposals
/// are planned (no detections, so no MR-2); otherwise the synthetic corpus is
/// run end to end.
CommandOutput sweep_command(RunConfig cfg, const ProfileRegistry& registry, const std::string& annotations_path,
                            unsigned threads);

/// Runs a single grid point on a synthetic corpus.
SweepRow sweep_point_synthetic(const RunConfig& cfg, const SweepPoint& point, const StageProfiles& profiles,
                               const std::vector<Scene>& scenes, unsigned threads);

io::Json report_envelope(const char* command, const RunConfig& cfg);

}  // namespace bgskip::app
