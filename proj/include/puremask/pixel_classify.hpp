// Copyright (c) 2026 The puremask Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "puremask/grid.hpp"

namespace puremask {

inline constexpr std::size_t kDefaultCenterCount = 16;
inline constexpr double kDefaultSaturation = 0.9;
inline constexpr double kDefaultValue = 0.9;

/// K fixed RGB anchors with hues k/K spaced uniformly around the HSV wheel
/// at a shared saturation and value.
struct ColorCenters {
  std::vector<Rgb> centers;
  std::size_t k_count = 0;
  double saturation = 0.0;
  double value = 0.0;
};

/// Standard six-sector HSV to RGB conversion. Hue in [0,1) turns, wrapped.
Rgb hsv_to_rgb(double hue, double saturation, double value);

ColorCenters make_color_centers(std::size_t k_count = kDefaultCenterCount,
                                double saturation = kDefaultSaturation,
                                double value = kDefaultValue);

/// Index of the nearest center by squared Euclidean distance. Ties resolve
/// to the smallest index.
std::size_t nearest_center(const Rgb& pixel, const ColorCenters& centers);

LabelMap classify_pixels(const NormalizedImage& image, const ColorCenters& centers);

}  // namespace puremask
