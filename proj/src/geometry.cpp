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

#include "bgskip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "bgskip/error.hpp"

namespace bgskip {

bool Box::valid() const noexcept {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_max >= x_min && y_max >= y_min;
}

Box Box::make(double x_min, double y_min, double x_max, double y_max) {
  Box b{x_min, y_min, x_max, y_max};
  if (!b.valid()) {
    std::ostringstream os;
    os << "invalid box (" << x_min << ", " << y_min << ", " << x_max << ", " << y_max << ")";
    throw_data(os.str());
  }
  return b;
}

double area(const Box& b) noexcept { return b.width() * b.height(); }

Box bounding_box(const Box& a, const Box& b) noexcept {
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min), std::max(a.x_max, b.x_max),
          std::max(a.y_max, b.y_max)};
}

Box bounding_box(std::span<const Box> boxes) {
  if (boxes.empty()) throw_data("bounding_box of an empty list");
  Box out = boxes.front();
  for (const auto& b : boxes.subspan(1)) out = bounding_box(out, b);
  return out;
}

std::optional<Box> intersect(const Box& a, const Box& b) noexcept {
  Box r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min), std::min(a.x_max, b.x_max),
        std::min(a.y_max, b.y_max)};
  if (r.x_max < r.x_min || r.y_max < r.y_min) return std::nullopt;
  return r;
}

double iou(const Box& a, const Box& b) {
  const double aa = area(a);
  const double ab = area(b);
  if (aa <= 0.0 && ab <= 0.0) throw_data("iou of two zero-area boxes");
  const auto inter = intersect(a, b);
  if (!inter) return 0.0;
  const double ai = area(*inter);
  return ai / (aa + ab - ai);
}

double intersection_over_first(const Box& a, const Box& b) noexcept {
  const double aa = area(a);
  if (aa <= 0.0) return 0.0;
  const auto inter = intersect(a, b);
  return inter ? area(*inter) / aa : 0.0;
}

double union_area(std::span<const Box> boxes) {
  std::vector<double> xs;
  xs.reserve(boxes.size() * 2);
  for (const auto& b : boxes) {
    if (area(b) <= 0.0) continue;
    xs.push_back(b.x_min);
    xs.push_back(b.x_max);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    spans.clear();
    for (const auto& b : boxes) {
      if (area(b) <= 0.0) continue;
      if (b.x_min <= x0 && b.x_max >= x1) spans.emplace_back(b.y_min, b.y_max);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double lo = spans.front().first;
    double hi = spans.front().second;
    for (const auto& [s0, s1] : spans) {
      if (s0 > hi) {
        covered += hi - lo;
        lo = s0;
        hi = s1;
      } else {
        hi = std::max(hi, s1);
      }
    }
    covered += hi - lo;
    total += covered * (x1 - x0);
  }
  return total;
}

Box clamp(const Box& b, const ImageMeta& bounds) noexcept {
  const double w = bounds.width_px;
  const double h = bounds.height_px;
  Box r{std::clamp(b.x_min, 0.0, w), std::clamp(b.y_min, 0.0, h), std::clamp(b.x_max, 0.0, w),
        std::clamp(b.y_max, 0.0, h)};
  return r;
}

Box extend(const Box& b, double p, const ImageMeta& bounds) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw_config("extension fraction p must be finite and >= 0");
  const double dx = p * b.width();
  const double dy = p * b.height();
  return clamp(Box{b.x_min - dx, b.y_min - dy, b.x_max + dx, b.y_max + dy}, bounds);
}

bool contains(const Box& outer, const Box& inner, double tol) noexcept {
  return inner.x_min >= outer.x_min - tol && inner.y_min >= outer.y_min - tol &&
         inner.x_max <= outer.x_max + tol && inner.y_max <= outer.y_max + tol;
}

}  // namespace bgskip
