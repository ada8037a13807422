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
#include "puremask/pixel_classify.hpp"

namespace puremask {

inline constexpr std::size_t kDefaultWindowSize = 8;
inline constexpr std::size_t kDefaultShiftSize = 4;

/// Row-major indices of hard pixels, strictly ascending.
struct HardIndexSet {
  std::vector<std::size_t> indices;
  std::size_t total = 0;
};

struct MaskStats {
  double pure_fraction = 0.0;
  std::size_t pure_pixel_count = 0;
  std::size_t total_pixels = 0;
  std::size_t window_size = 0;
  std::size_t shift_size = 0;
};

struct MaskResult {
  PurityMask mask;
  MaskStats stats;
};

/// Flags every S×S window (anchored at multiples of S) as pure iff all of its
/// labels agree, then broadcasts the flag to the window's pixels. Windows cut
/// by the image border are judged over their truncated extent.
PurityMask window_purity_mask(const LabelMap& labels, std::size_t window_size);

/// output(i, j) = labels((i + shift) mod H, (j + shift) mod W).
LabelMap cyclic_shift_labels(const LabelMap& labels, std::size_t shift);

/// output(i, j) = mask((i - shift) mod H, (j - shift) mod W). Undoes
/// cyclic_shift_labels for the same shift.
PurityMask cyclic_unshift_mask(const PurityMask& mask, std::size_t shift);

/// Element-wise AND. A pixel stays pure if either input marks it pure.
PurityMask fuse_masks(const PurityMask& base, const PurityMask& shifted_back);

MaskStats mask_stats(const PurityMask& mask, std::size_t window_size, std::size_t shift);

/// Base-grid mask AND the mask of the shift-grid (computed on the shifted
/// labels, then shifted back into pixel alignment).
MaskResult pure_pass_mask_from_labels(const LabelMap& labels, std::size_t window_size,
                                      std::size_t shift);

/// classify_pixels followed by pure_pass_mask_from_labels.
MaskResult pure_pass_mask(const NormalizedImage& image, const ColorCenters& centers,
                          std::size_t window_size = kDefaultWindowSize,
                          std::size_t shift = kDefaultShiftSize);

HardIndexSet mask_to_indices(const PurityMask& mask);

/// Rec. 601 luma.
double luminance(const Rgb& pixel);

/// Fixed-ratio comparison baseline: ranks windows by descending luminance
/// variance and marks the top ceil(ratio · window_count) as hard. Ties go to
/// the lower row-major window index.
PurityMask fixed_ratio_window_mask(const NormalizedImage& image, std::size_t window_size,
                                   double ratio);

}  // namespace puremask
