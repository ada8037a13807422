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

#include "puremask/pixel_classify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace puremask {

Rgb hsv_to_rgb(double hue, double saturation, double value) {
  double turns = hue - std::floor(hue);
  double h6 = turns * 6.0;
  if (h6 >= 6.0) h6 = 0.0;
  const double chroma = value * saturation;
  const double x = chroma * (1.0 - std::fabs(std::fmod(h6, 2.0) - 1.0));
  const double m = value - chroma;

  Rgb rgb;
  switch (static_cast<int>(h6)) {
    case 0: rgb = {chroma, x, 0.0}; break;
    case 1: rgb = {x, chroma, 0.0}; break;
    case 2: rgb = {0.0, chroma, x}; break;
    case 3: rgb = {0.0, x, chroma}; break;
    case 4: rgb = {x, 0.0, chroma}; break;
    default: rgb = {chroma, 0.0, x}; break;
  }
  return {rgb.r + m, rgb.g + m, rgb.b + m};
}

ColorCenters make_color_centers(std::size_t k_count, double saturation, double value) {
  if (k_count < 1) throw std::invalid_argument("make_color_centers: k_count must be >= 1");
  if (!(saturation >= 0.0 && saturation <= 1.0)) {
    throw std::invalid_argument("make_color_centers: saturation outside [0,1]");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("make_color_centers: value outside [0,1]");
  }

  ColorCenters out;
  out.k_count = k_count;
  out.saturation = saturation;
  out.value = value;
  out.centers.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double hue = static_cast<double>(k) / static_cast<double>(k_count);
    out.centers.push_back(hsv_to_rgb(hue, saturation, value));
  }
  return out;
}

std::size_t nearest_center(const Rgb& pixel, const ColorCenters& centers) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers.centers.size(); ++k) {
    const Rgb& c = centers.centers[k];
    const double dr = pixel.r - c.r;
    const double dg = pixel.g - c.g;
    const double db = pixel.b - c.b;
    const double dist = dr * dr + dg * dg + db * db;
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

LabelMap classify_pixels(const NormalizedImage& image, const ColorCenters& centers) {
  if (image.empty()) throw std::invalid_argument("classify_pixels: empty image");
  if (centers.centers.empty()) throw std::invalid_argument("classify_pixels: no centers");
  if (centers.centers.size() > std::numeric_limits<LabelMap::value_type>::max()) {
    throw std::invalid_argument("classify_pixels: too many centers");
  }

  LabelMap labels(image.height(), image.width());
  for (std::size_t p = 0; p < image.size(); ++p) {
    labels[p] = static_cast<LabelMap::value_type>(nearest_center(image[p], centers));
  }
  return labels;
}

}  // namespace puremask
