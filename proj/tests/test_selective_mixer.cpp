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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "puremask/cost_model.hpp"
#include "puremask/errors.hpp"
#include "puremask/selective_mixer.hpp"

namespace puremask {
namespace {

// Similarity rows whose argmax is the given category.
Matrix one_hot_similarity(const std::vector<std::size_t>& categories, std::size_t m) {
  Matrix s(categories.size(), m);
  for (std::size_t i = 0; i < categories.size(); ++i) s(i, categories[i]) = 1.0;
  return s;
}

TokenField random_field(std::size_t n, std::size_t c, std::size_t m, std::mt19937_64& rng) {
  return {testing::random_matrix(n, c, rng), testing::random_matrix(n, m, rng)};
}

MixerWeights random_mixer(std::size_t c, std::size_t heads, std::mt19937_64& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(c));
  return {testing::random_matrix(c, c, rng, scale), testing::random_matrix(c, c, rng, scale),
          testing::random_matrix(c, c, rng, scale), heads};
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-300});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

TEST(Categorize, CapacityMatchesCategoryRuns) {
  TokenField f{Matrix(4, 2), one_hot_similarity({0, 0, 1, 1}, 2)};
  const CategoryPartition p = categorize(f, std::nullopt, 2);
  EXPECT_EQ(p.groups, (std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}}));
  EXPECT_EQ(p.group_capacity, 2u);
}

TEST(Categorize, SortsByCategoryThenIndex) {
  TokenField f{Matrix(3, 2), one_hot_similarity({1, 0, 1}, 2)};
  const CategoryPartition p = categorize(f, std::nullopt, 4);
  EXPECT_EQ(p.groups, (std::vector<std::vector<std::size_t>>{{1, 0, 2}}));
}

TEST(Categorize, ChunksAcrossCategoryBoundaries) {
  TokenField f{Matrix(5, 2), one_hot_similarity({2, 0, 1, 0, 2}, 3)};
  const CategoryPartition p = categorize(f, std::nullopt, 2);
  EXPECT_EQ(p.groups, (std::vector<std::vector<std::size_t>>{{1, 3}, {2, 0}, {4}}));
}

TEST(Categorize, EmptySelectionAndSubsets) {
  TokenField f{Matrix(4, 2), one_hot_similarity({1, 0, 1, 0}, 2)};
  const std::vector<std::size_t> none;
  EXPECT_TRUE(categorize(f, none, 8).groups.empty());
  const std::vector<std::size_t> some{0, 2, 3};
  EXPECT_EQ(categorize(f, some, 8).groups, (std::vector<std::vector<std::size_t>>{{3, 0, 2}}));
}

TEST(Categorize, SimilarityTiesGoToLowestCategory) {
  Matrix sim(1, 3, 0.5);
  TokenField f{Matrix(1, 2), sim};
  EXPECT_EQ(token_category(f, 0), 0u);
}

TEST(Categorize, RejectsBadInput) {
  TokenField f{Matrix(2, 2), Matrix(2, 2)};
  EXPECT_THROW(categorize(f, std::nullopt, 0), std::invalid_argument);
  const std::vector<std::size_t> bad{5};
  EXPECT_THROW(categorize(f, bad, 4), std::invalid_argument);
}

TEST(GroupedMsa, SingleTokenReturnsValueProjection) {
  std::mt19937_64 rng(1);
  const TokenField f = random_field(3, 8, 2, rng);
  const MixerWeights w = random_mixer(8, 2, rng);
  CategoryPartition p{{{1}}, 1};
  const Matrix out = grouped_msa(f, p, w);
  for (std::size_t c = 0; c < 8; ++c) {
    double expected = 0.0;
    for (std::size_t k = 0; k < 8; ++k) expected += f.tokens(1, k) * w.w_v(k, c);
    EXPECT_NEAR(out(1, c), expected, 1e-12);
    EXPECT_EQ(out(0, c), 0.0);
    EXPECT_EQ(out(2, c), 0.0);
  }
}

TEST(GroupedMsa, ZeroLogitsAverageTheGroup) {
  std::mt19937_64 rng(2);
  const TokenField f = random_field(5, 4, 2, rng);
  MixerWeights w{Matrix(4, 4), Matrix(4, 4), Matrix::identity(4), 2};
  CategoryPartition p{{{0, 2, 4}, {1, 3}}, 3};
  const Matrix out = grouped_msa(f, p, w);
  for (const auto& g : p.groups) {
    for (std::size_t c = 0; c < 4; ++c) {
      double mean = 0.0;
      for (std::size_t idx : g) mean += f.tokens(idx, c);
      mean /= static_cast<double>(g.size());
      for (std::size_t idx : g) EXPECT_NEAR(out(idx, c), mean, 1e-14);
    }
  }
}

TEST(GroupedMsa, MatchesDenseOracle) {
  std::mt19937_64 rng(3);
  for (std::size_t c : {8u, 12u, 48u}) {
    const std::size_t heads = default_head_count(c);
    const TokenField f = random_field(9, c, 4, rng);
    const MixerWeights w = random_mixer(c, heads, rng);
    CategoryPartition p{{{0, 4, 7}, {1, 2, 3, 5, 6, 8}}, 6};
    const Matrix out = grouped_msa(f, p, w);
    for (const auto& g : p.groups) {
      const Matrix ref = testing::dense_attention_oracle(f.tokens, g, w.w_q, w.w_k, w.w_v, heads);
      for (std::size_t r = 0; r < g.size(); ++r) {
        EXPECT_LT(max_rel_diff(out.row(g[r]), ref.row(r)), 1e-9);
      }
    }
  }
}

TEST(GroupedMsa, NonFiniteProjectionIsNumericError) {
  TokenField f{Matrix(2, 2, 1e300), Matrix(2, 1)};
  MixerWeights w{Matrix(2, 2, 1e300), Matrix(2, 2, 1.0), Matrix(2, 2, 1.0), 1};
  CategoryPartition p{{{0, 1}}, 2};
  EXPECT_THROW(grouped_msa(f, p, w), NumericError);
}

TEST(GroupedMsa, RejectsMismatchedWeights) {
  TokenField f{Matrix(2, 4), Matrix(2, 1)};
  MixerWeights w{Matrix(2, 2), Matrix(2, 2), Matrix(2, 2), 1};
  EXPECT_THROW(grouped_msa(f, {{{0}}, 1}, w), std::invalid_argument);
  MixerWeights bad_heads{Matrix(4, 4), Matrix(4, 4), Matrix(4, 4), 3};
  EXPECT_THROW(grouped_msa(f, {{{0}}, 1}, bad_heads), std::invalid_argument);
}

TEST(DefaultHeadCount, KeepsHeadDimAtLeastEight) {
  EXPECT_EQ(default_head_count(48), 4u);
  EXPECT_EQ(default_head_count(8), 1u);
  EXPECT_EQ(default_head_count(12), 1u);
  EXPECT_EQ(default_head_count(64), 8u);
  EXPECT_EQ(default_head_count(3), 1u);
}

TEST(PurePassAcMsa, AllHardEqualsFullPath) {
  std::mt19937_64 rng(4);
  const TokenField f = random_field(64, 8, 5, rng);
  const MixerWeights w = random_mixer(8, 1, rng);
  const Matrix bypass = testing::random_matrix(64, 8, rng);
  const Matrix pp = pure_pass_ac_msa(f, PurityMask(8, 8, 1), bypass, w, 16);
  EXPECT_EQ(pp, full_ac_msa(f, w, 16));
}

TEST(PurePassAcMsa, AllPureEqualsBypass) {
  std::mt19937_64 rng(5);
  const TokenField f = random_field(16, 8, 3, rng);
  const MixerWeights w = random_mixer(8, 1, rng);
  const Matrix bypass = testing::random_matrix(16, 8, rng);
  MixerTrace trace;
  EXPECT_EQ(pure_pass_ac_msa(f, PurityMask(4, 4, 0), bypass, w, 4, &trace), bypass);
  EXPECT_EQ(trace.score_entries, 0u);
}

TEST(PurePassAcMsa, MixedMaskMatchesRowSpliceOracle) {
  std::mt19937_64 rng(6);
  const TokenField f = random_field(16, 8, 4, rng);
  const MixerWeights w = random_mixer(8, 1, rng);
  const Matrix bypass = testing::random_matrix(16, 8, rng);
  PurityMask mask(4, 4);
  for (auto& v : mask) v = rng() % 2;

  const Matrix out = pure_pass_ac_msa(f, mask, bypass, w, 3);

  const HardIndexSet hard = mask_to_indices(mask);
  const CategoryPartition groups = categorize(f, hard.indices, 3);
  for (const auto& g : groups.groups) {
    const Matrix ref = testing::dense_attention_oracle(f.tokens, g, w.w_q, w.w_k, w.w_v, 1);
    for (std::size_t r = 0; r < g.size(); ++r) {
      EXPECT_LT(max_rel_diff(out.row(g[r]), ref.row(r)), 1e-9);
    }
  }
  for (std::size_t p = 0; p < 16; ++p) {
    if (mask[p] == 0) EXPECT_TRUE(std::ranges::equal(out.row(p), bypass.row(p)));
  }
}

TEST(PurePassAcMsa, ShapeMismatch) {
  TokenField f{Matrix(4, 8), Matrix(4, 2)};
  MixerWeights w{Matrix(8, 8), Matrix(8, 8), Matrix(8, 8), 1};
  EXPECT_THROW(pure_pass_ac_msa(f, PurityMask(3, 1), Matrix(4, 8), w, 4), std::invalid_argument);
  EXPECT_THROW(pure_pass_ac_msa(f, PurityMask(2, 2), Matrix(4, 7), w, 4), std::invalid_argument);
  TokenField ragged{Matrix(4, 8), Matrix(3, 2)};
  EXPECT_THROW(pure_pass_ac_msa(ragged, PurityMask(2, 2), Matrix(4, 8), w, 4),
               std::invalid_argument);
}

TEST(PurePassAcMsa, WriteOnceAndScoreCount) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    const std::size_t g = 1 + rng() % 20;
    const TokenField f = random_field(n, 8, 6, rng);
    const MixerWeights w = random_mixer(8, 1, rng);
    PurityMask mask(1, n);
    for (auto& v : mask) v = rng() % 2;
    MixerTrace trace;
    pure_pass_ac_msa(f, mask, f.tokens, w, g, &trace);
    ASSERT_EQ(trace.row_writes.size(), n);
    EXPECT_TRUE(std::all_of(trace.row_writes.begin(), trace.row_writes.end(),
                            [](auto c) { return c == 1; }));
    std::size_t expected_scores = 0;
    for (std::size_t s : trace.group_sizes) expected_scores += s * s;
    EXPECT_EQ(trace.score_entries, expected_scores);
    EXPECT_EQ(std::accumulate(trace.group_sizes.begin(), trace.group_sizes.end(), std::size_t{0}),
              mask_to_indices(mask).indices.size());
  }
}

TEST(PurePassAcMsa, PermutationWithinCategoryPermutesOutput) {
  std::mt19937_64 rng(8);
  const std::size_t n = 24;
  std::vector<std::size_t> cats(n);
  for (auto& c : cats) c = rng() % 3;
  TokenField f{testing::random_matrix(n, 8, rng), one_hot_similarity(cats, 3)};
  const MixerWeights w = random_mixer(8, 1, rng);
  const Matrix bypass = testing::random_matrix(n, 8, rng);
  PurityMask mask(1, n);
  for (auto& v : mask) v = rng() % 4 != 0;

  // Shuffle the positions holding category 1.
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i)
    if (cats[i] == 1) members.push_back(i);
  std::vector<std::size_t> shuffled = members;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = 0; k < members.size(); ++k) perm[members[k]] = shuffled[k];

  TokenField pf{gather_rows(f.tokens, perm), gather_rows(f.similarity, perm)};
  const Matrix pbypass = gather_rows(bypass, perm);
  PurityMask pmask(1, n);
  for (std::size_t i = 0; i < n; ++i) pmask[i] = mask[perm[i]];

  // Capacity >= N keeps everything in one group, where attention is
  // permutation-equivariant.
  const Matrix out = pure_pass_ac_msa(f, mask, bypass, w, n);
  const Matrix pout = pure_pass_ac_msa(pf, pmask, pbypass, w, n);
  const Matrix expected = gather_rows(out, perm);
  EXPECT_LT(max_rel_diff(pout.values(), expected.values()), 1e-12);
}

TEST(PurePassAcMsa, AttentionCostMonotoneInHardCount) {
  std::mt19937_64 rng(9);
  const std::size_t n = 200;
  const TokenField f = random_field(n, 8, 16, rng);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  PurityMask mask(1, n, 0);
  double previous = -1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) mask[order[k - 1]] = 1;
    const auto hard = mask_to_indices(mask);
    const double flops = attention_flops_count(categorize(f, hard.indices, 32), 8, 1);
    if (k == 0) EXPECT_EQ(flops, 0.0);
    EXPECT_GE(flops, previous);
    previous = flops;
  }
}

}  // namespace
}  // namespace puremask
