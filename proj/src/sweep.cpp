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

#include "bgskip/sweep.hpp"

#include <algorithm>
#include <numeric>

#include "bgskip/error.hpp"

namespace bgskip {

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    strict = strict || a[i] < b[i];
  }
  return strict;
}

}  // namespace

std::vector<bool> pareto_efficient(const std::vector<std::vector<double>>& objectives) {
  for (const auto& o : objectives) {
    if (o.size() != objectives.front().size()) throw_internal("objective vectors differ in length");
  }
  std::vector<std::size_t> order(objectives.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return objectives[a] < objectives[b]; });

  // Dominators sort strictly earlier. When a dominator was itself dropped,
  // the front member that dropped it dominates this row as well.
  std::vector<bool> flags(objectives.size(), false);
  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(front.begin(), front.end(),
                                       [&](std::size_t f) { return dominates(objectives[f], objectives[i]); });
    if (!dominated) {
      front.push_back(i);
      flags[i] = true;
    }
  }
  return flags;
}

void flag_pareto(std::vector<SweepRow>& rows) {
  const bool use_mr2 = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.mr2.has_value(); });
  std::vector<std::vector<double>> obj;
  for (const auto& r : rows) {
    std::vector<double> o{r.gflops};
    if (use_mr2) o.push_back(*r.mr2);
    o.push_back(1.0 - r.sensitivity.value_or(0.0));
    obj.push_back(std::move(o));
  }
  const auto flags = pareto_efficient(obj);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].pareto = flags[i];
}

}  // namespace bgskip
