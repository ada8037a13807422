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

#include "puremask/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace puremask {

NormalizedImage NormalizedImage::from_rgb8(std::size_t height, std::size_t width,
                                           std::span<const std::uint8_t> interleaved) {
  if (interleaved.size() != height * width * 3) {
    throw std::invalid_argument("from_rgb8: expected " + std::to_string(height * width * 3) +
                                " bytes, got " + std::to_string(interleaved.size()));
  }
  NormalizedImage image(height, width);
  for (std::size_t p = 0; p < image.size(); ++p) {
    image[p] = {interleaved[3 * p] / 255.0, interleaved[3 * p + 1] / 255.0,
                interleaved[3 * p + 2] / 255.0};
  }
  return image;
}

void NormalizedImage::validate() const {
  auto in_range = [](double c) { return c >= 0.0 && c <= 1.0; };
  for (const Rgb& p : *this) {
    if (!in_range(p.r) || !in_range(p.g) || !in_range(p.b)) {
      throw std::invalid_argument("image component outside [0,1]");
    }
  }
}

std::size_t PurityMask::pure_count() const noexcept {
  return static_cast<std::size_t>(std::count(begin(), end(), std::uint8_t{0}));
}

}  // namespace puremask
