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

#include <optional>
#include <vector>

namespace bgskip {

/// Flags rows that no other row dominates. Every objective is minimized; a
/// row dominates another when it is no worse everywhere and strictly better
/// somewhere. Rows are checked in lexicographic order against the current
/// front only.
std::vector<bool> pareto_efficient(const std::vector<std::vector<double>>& objectives);

struct SweepPoint {
  double p = 0.0;
  double h = 0.0;
  double k = 0.0;
  double score_threshold = 0.0;
};

struct SweepRow {
  SweepPoint point;
  double avg_m_over_n = 0.0;
  std::optional<double> sensitivity;
  std::optional<double> mr2;
  double gflops = 0.0;
  double reduction_factor = 0.0;
  bool pareto = false;
};

/// Objectives: GFLOPs, MR-2 (only when every row has it) and 1 - sensitivity.
void flag_pareto(std::vector<SweepRow>& rows);

}  // namespace bgskip
