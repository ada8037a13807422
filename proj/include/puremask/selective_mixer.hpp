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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "puremask/grid.hpp"
#include "puremask/mask.hpp"
#include "puremask/matrix.hpp"

namespace puremask {

inline constexpr std::size_t kDefaultGroupCapacity = 128;

/// N tokens of C channels plus an N×M category-affinity map.
struct TokenField {
  Matrix tokens;
  Matrix similarity;

  std::size_t token_count() const noexcept { return tokens.rows(); }
  std::size_t channels() const noexcept { return tokens.cols(); }

  /// Throws std::invalid_argument on row-count mismatch or non-finite entries.
  void validate() const;
};

struct CategoryPartition {
  std::vector<std::vector<std::size_t>> groups;
  std::size_t group_capacity = 0;
};

struct MixerWeights {
  Matrix w_q;
  Matrix w_k;
  Matrix w_v;
  std::size_t head_count = 1;

  std::size_t channels() const noexcept { return w_q.rows(); }

  void validate() const;
};

/// Optional instrumentation for the mixer. `row_writes[i]` counts how many
/// times output row i was stored; `score_entries` counts attention logits.
struct MixerTrace {
  std::size_t score_entries = 0;
  std::vector<std::uint32_t> row_writes;
  std::vector<std::size_t> group_sizes;
};

/// Largest power of two h dividing C with C/h >= 8 (1 when C < 16).
std::size_t default_head_count(std::size_t channels);

/// Argmax of the token's similarity row; ties resolve to the lowest category.
std::size_t token_category(const TokenField& field, std::size_t token);

/// Sorts the selected tokens by (category, index) and cuts the sorted run
/// into consecutive groups of `capacity` (last group may be shorter). With no
/// selection every token participates.
CategoryPartition categorize(const TokenField& field,
                             std::optional<std::span<const std::size_t>> indices,
                             std::size_t capacity = kDefaultGroupCapacity);

/// Multi-head softmax self-attention inside each group. Rows of tokens not in
/// any group are left zero.
Matrix grouped_msa(const TokenField& field, const CategoryPartition& partition,
                   const MixerWeights& weights, MixerTrace* trace = nullptr);

/// Full category attention over every token.
Matrix full_ac_msa(const TokenField& field, const MixerWeights& weights,
                   std::size_t capacity = kDefaultGroupCapacity,
                   MixerTrace* trace = nullptr);

/// Runs category attention on hard tokens only and splices the bypass rows
/// in at pure positions. `mask` is read in row-major order and must cover
/// exactly N pixels.
Matrix pure_pass_ac_msa(const TokenField& field, const PurityMask& mask,
                        const Matrix& bypass, const MixerWeights& weights,
                        std::size_t capacity = kDefaultGroupCapacity,
                        MixerTrace* trace = nullptr);

}  // namespace puremask
