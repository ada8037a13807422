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

// Test-only reference implementations and generators shared by the unit and
// acceptance suites. Nothing here calls into the mask pipeline.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "puremask/grid.hpp"
#include "puremask/matrix.hpp"

namespace puremask::testing {

// Purity of the window holding frame position (frame_row, frame_col), where
// the frame maps (r, c) to labels((r + shift) mod H, (c + shift) mod W).
inline bool window_is_pure(const LabelMap& labels, std::size_t frame_row, std::size_t frame_col,
                           std::size_t window, std::size_t shift) {
  const std::size_t h = labels.height(), w = labels.width();
  const std::size_t r0 = frame_row / window * window, c0 = frame_col / window * window;
  const auto at = [&](std::size_t fr, std::size_t fc) {
    return labels((fr + shift) % h, (fc + shift) % w);
  };
  const auto anchor = at(r0, c0);
  for (std::size_t fr = r0; fr < r0 + window && fr < h; ++fr) {
    for (std::size_t fc = c0; fc < c0 + window && fc < w; ++fc) {
      if (at(fr, fc) != anchor) return false;
    }
  }
  return true;
}

// Per-pixel naive mask: base grid, shifted grid, or their fusion.
inline PurityMask naive_mask(const LabelMap& labels, std::size_t window, std::size_t shift,
                             bool fuse) {
  const std::size_t h = labels.height(), w = labels.width();
  PurityMask out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const bool base_pure = window_is_pure(labels, i, j, window, 0);
      // Pixel (i, j) sits at ((i - shift) mod H, (j - shift) mod W) in the shifted frame.
      const std::size_t fr = (i + h - shift % h) % h;
      const std::size_t fc = (j + w - shift % w) % w;
      const bool shift_pure = window_is_pure(labels, fr, fc, window, shift);
      const bool pure = fuse ? (base_pure || shift_pure) : base_pure;
      out(i, j) = pure ? 0 : 1;
    }
  }
  return out;
}

// Piecewise-constant label map with sprinkled noise, so that pure and impure
// windows both occur.
inline LabelMap random_blocky_labels(std::size_t h, std::size_t w, std::size_t k_count,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> label(0, k_count - 1);
  std::uniform_int_distribution<std::size_t> block(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t bh = block(rng), bw = block(rng);
  const double noise = u(rng) * 0.05;
  std::vector<std::uint16_t> block_labels(((h + bh - 1) / bh) * ((w + bw - 1) / bw));
  for (auto& v : block_labels) v = static_cast<std::uint16_t>(label(rng));
  const std::size_t cols = (w + bw - 1) / bw;
  LabelMap labels(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      labels(i, j) = u(rng) < noise ? static_cast<std::uint16_t>(label(rng))
                                    : block_labels[(i / bh) * cols + j / bw];
    }
  }
  return labels;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

// Dense multi-head attention over the listed rows, written from the textbook
// definition: softmax(Q Kᵀ / sqrt(d)) V per head with a log-sum-exp softmax.
inline Matrix dense_attention_oracle(const Matrix& tokens, const std::vector<std::size_t>& rows,
                                     const Matrix& wq, const Matrix& wk, const Matrix& wv,
                                     std::size_t heads) {
  const std::size_t n = rows.size(), c = tokens.cols(), d = c / heads;
  auto proj = [&](const Matrix& w) {
    Matrix p(n, c);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t col = 0; col < c; ++col) {
        long double acc = 0.0L;
        for (std::size_t k = 0; k < c; ++k) acc += static_cast<long double>(tokens(rows[a], k)) * w(k, col);
        p(a, col) = static_cast<double>(acc);
      }
    return p;
  };
  const Matrix q = proj(wq), k = proj(wk), v = proj(wv);
  Matrix out(n, c);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<long double> logits(n);
      long double peak = -INFINITY;
      for (std::size_t b = 0; b < n; ++b) {
        long double dot = 0.0L;
        for (std::size_t x = h * d; x < (h + 1) * d; ++x) dot += static_cast<long double>(q(a, x)) * k(b, x);
        logits[b] = dot / std::sqrt(static_cast<long double>(d));
        if (logits[b] > peak) peak = logits[b];
      }
      long double lse = 0.0L;
      for (auto l : logits) lse += std::exp(l - peak);
      lse = peak + std::log(lse);
      for (std::size_t x = h * d; x < (h + 1) * d; ++x) {
        long double acc = 0.0L;
        for (std::size_t b = 0; b < n; ++b) acc += std::exp(logits[b] - lse) * v(b, x);
        out(a, x) = static_cast<double>(acc);
      }
    }
  }
  return out;
}

}  // namespace puremask::testing
