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

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace bgskip {

/// Axis-aligned rectangle in continuous pixel coordinates. The image origin is
/// top-left, x grows rightward and y downward.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  /// Validating constructor; throws Error(Data) when an extent is negative or
  /// a coordinate is not finite.
  static Box make(double x_min, double y_min, double x_max, double y_max);

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double center_x() const noexcept { return 0.5 * (x_min + x_max); }
  double center_y() const noexcept { return 0.5 * (y_min + y_max); }
  bool valid() const noexcept;

  friend bool operator==(const Box&, const Box&) = default;
};

struct ImageMeta {
  std::string image_id;
  int width_px = 0;
  int height_px = 0;

  /// Total pixel count N.
  std::int64_t pixels() const noexcept { return std::int64_t{width_px} * height_px; }
  Box bounds() const noexcept { return {0.0, 0.0, double(width_px), double(height_px)}; }

  friend bool operator==(const ImageMeta&, const ImageMeta&) = default;
};

double area(const Box& b) noexcept;

/// Smallest box containing every input. Throws Error(Data) on an empty list.
Box bounding_box(std::span<const Box> boxes);
Box bounding_box(const Box& a, const Box& b) noexcept;

/// Overlap rectangle; absent when the boxes are separated. Touching edges give
/// a zero-area box.
std::optional<Box> intersect(const Box& a, const Box& b) noexcept;

/// Intersection over union. Throws Error(Data) if both boxes have zero area.
double iou(const Box& a, const Box& b);

/// Intersection area divided by the area of `a` (0 for a zero-area `a`).
double intersection_over_first(const Box& a, const Box& b) noexcept;

/// Exact area of the union of `boxes`, by sweeping the compressed x edges and
/// merging the covering y intervals inside every slab.
double union_area(std::span<const Box> boxes);

/// Grows every edge outward by `p` times the matching box dimension (left and
/// right by p*width, top and bottom by p*height), then clamps to the image.
Box extend(const Box& b, double p, const ImageMeta& bounds);

Box clamp(const Box& b, const ImageMeta& bounds) noexcept;

/// True when `inner` lies inside `outer` up to `tol` on every edge.
bool contains(const Box& outer, const Box& inner, double tol = 0.0) noexcept;

}  // namespace bgskip
