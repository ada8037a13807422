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

#include "puremask/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace puremask {
namespace {

template <typename GridT>
GridT cyclic_roll(const GridT& src, std::size_t row_offset, std::size_t col_offset) {
  GridT out(src.height(), src.width());
  const std::size_t h = src.height();
  const std::size_t w = src.width();
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t si = (i + row_offset) % h;
    for (std::size_t j = 0; j < w; ++j) {
      out(i, j) = src(si, (j + col_offset) % w);
    }
  }
  return out;
}

void check_window_size(std::size_t window_size) {
  if (window_size < 1) throw std::invalid_argument("window size must be >= 1");
}

std::size_t window_count(std::size_t extent, std::size_t window_size) {
  return (extent + window_size - 1) / window_size;
}

}  // namespace

PurityMask window_purity_mask(const LabelMap& labels, std::size_t window_size) {
  check_window_size(window_size);
  const std::size_t h = labels.height();
  const std::size_t w = labels.width();
  PurityMask mask(h, w, 1);

  for (std::size_t r0 = 0; r0 < h; r0 += window_size) {
    const std::size_t r1 = std::min(r0 + window_size, h);
    for (std::size_t c0 = 0; c0 < w; c0 += window_size) {
      const std::size_t c1 = std::min(c0 + window_size, w);
      const auto anchor = labels(r0, c0);
      bool pure = true;
      for (std::size_t i = r0; i < r1 && pure; ++i) {
        const auto row = labels.row(i).subspan(c0, c1 - c0);
        pure = std::all_of(row.begin(), row.end(), [&](auto v) { return v == anchor; });
      }
      const std::uint8_t flag = pure ? 0 : 1;
      for (std::size_t i = r0; i < r1; ++i) {
        auto row = mask.row(i).subspan(c0, c1 - c0);
        std::fill(row.begin(), row.end(), flag);
      }
    }
  }
  return mask;
}

LabelMap cyclic_shift_labels(const LabelMap& labels, std::size_t shift) {
  if (labels.empty()) return labels;
  return cyclic_roll(labels, shift % labels.height(), shift % labels.width());
}

PurityMask cyclic_unshift_mask(const PurityMask& mask, std::size_t shift) {
  if (mask.empty()) return mask;
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  return cyclic_roll(mask, (h - shift % h) % h, (w - shift % w) % w);
}

PurityMask fuse_masks(const PurityMask& base, const PurityMask& shifted_back) {
  if (!base.same_shape(shifted_back)) {
    throw std::invalid_argument("fuse_masks: dimension mismatch");
  }
  PurityMask out(base.height(), base.width());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = static_cast<std::uint8_t>(base[p] * shifted_back[p]);
  }
  return out;
}

MaskStats mask_stats(const PurityMask& mask, std::size_t window_size, std::size_t shift) {
  MaskStats stats;
  stats.pure_pixel_count = mask.pure_count();
  stats.total_pixels = mask.size();
  stats.pure_fraction = mask.empty() ? 0.0
                                     : static_cast<double>(stats.pure_pixel_count) /
                                           static_cast<double>(stats.total_pixels);
  stats.window_size = window_size;
  stats.shift_size = shift;
  return stats;
}

MaskResult pure_pass_mask_from_labels(const LabelMap& labels, std::size_t window_size,
                                      std::size_t shift) {
  check_window_size(window_size);
  if (shift >= window_size) {
    throw std::invalid_argument("shift must be smaller than the window size");
  }
  PurityMask base = window_purity_mask(labels, window_size);
  PurityMask shifted =
      window_purity_mask(cyclic_shift_labels(labels, shift), window_size);
  PurityMask fused = fuse_masks(base, cyclic_unshift_mask(shifted, shift));
  MaskStats stats = mask_stats(fused, window_size, shift);
  return {std::move(fused), stats};
}

MaskResult pure_pass_mask(const NormalizedImage& image, const ColorCenters& centers,
                          std::size_t window_size, std::size_t shift) {
  check_window_size(window_size);
  if (shift >= window_size) {
    throw std::invalid_argument("shift must be smaller than the window size");
  }
  return pure_pass_mask_from_labels(classify_pixels(image, centers), window_size, shift);
}

HardIndexSet mask_to_indices(const PurityMask& mask) {
  HardIndexSet out;
  out.total = mask.size();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (mask[p] != 0) out.indices.push_back(p);
  }
  return out;
}

double luminance(const Rgb& pixel) {
  return 0.299 * pixel.r + 0.587 * pixel.g + 0.114 * pixel.b;
}

PurityMask fixed_ratio_window_mask(const NormalizedImage& image, std::size_t window_size,
                                   double ratio) {
  check_window_size(window_size);
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("fixed_ratio_window_mask: ratio outside [0,1]");
  }
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const std::size_t rows = window_count(h, window_size);
  const std::size_t cols = window_count(w, window_size);
  const std::size_t count = rows * cols;

  std::vector<double> variance(count, 0.0);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t n = 0; n < cols; ++n) {
      const std::size_t r1 = std::min((m + 1) * window_size, h);
      const std::size_t c1 = std::min((n + 1) * window_size, w);
      const std::size_t r0 = m * window_size;
      const std::size_t c0 = n * window_size;
      const double px = static_cast<double>((r1 - r0) * (c1 - c0));
      double sum = 0.0;
      for (std::size_t i = r0; i < r1; ++i) {
        for (std::size_t j = c0; j < c1; ++j) sum += luminance(image(i, j));
      }
      const double mean = sum / px;
      double sq = 0.0;
      for (std::size_t i = r0; i < r1; ++i) {
        for (std::size_t j = c0; j < c1; ++j) {
          const double d = luminance(image(i, j)) - mean;
          sq += d * d;
        }
      }
      variance[m * cols + n] = sq / px;
    }
  }

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });

  // Guard ceil() against products like 0.7 * 10 = 7.000000000000001.
  const double scaled = ratio * static_cast<double>(count);
  const auto hard_windows =
      std::min(count, static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled))));

  std::vector<std::uint8_t> window_flag(count, 0);
  for (std::size_t k = 0; k < hard_windows; ++k) window_flag[order[k]] = 1;

  PurityMask mask(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      mask(i, j) = window_flag[(i / window_size) * cols + j / window_size];
    }
  }
  return mask;
}

}  // namespace puremask
