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

#include "puremask/selective_mixer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "puremask/errors.hpp"

namespace puremask {
namespace {

// rows × C input times C × C weight.
Matrix project(const Matrix& x, const Matrix& w) {
  Matrix out(x.rows(), w.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    auto orow = out.row(r);
    for (std::size_t k = 0; k < xr.size(); ++k) {
      const double xv = xr[k];
      const auto wr = w.row(k);
      for (std::size_t c = 0; c < orow.size(); ++c) orow[c] += xv * wr[c];
    }
  }
  return out;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) throw NumericError(std::string("grouped_msa: non-finite ") + what);
}

// Softmax attention of one group; writes n × C into `out`.
void attend_group(const Matrix& q, const Matrix& k, const Matrix& v, std::size_t head_count,
                  Matrix& out) {
  const std::size_t n = q.rows();
  const std::size_t channels = q.cols();
  const std::size_t head_dim = channels / head_count;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<double> weights(n);

  for (std::size_t h = 0; h < head_count; ++h) {
    const std::size_t c0 = h * head_dim;
    const std::size_t c1 = c0 + head_dim;
    for (std::size_t a = 0; a < n; ++a) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < n; ++b) {
        double dot = 0.0;
        for (std::size_t c = c0; c < c1; ++c) dot += q(a, c) * k(b, c);
        weights[b] = dot * scale;
        peak = std::max(peak, weights[b]);
      }
      double total = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        weights[b] = std::exp(weights[b] - peak);
        total += weights[b];
      }
      for (std::size_t b = 0; b < n; ++b) weights[b] /= total;
      for (std::size_t c = c0; c < c1; ++c) {
        double acc = 0.0;
        for (std::size_t b = 0; b < n; ++b) acc += weights[b] * v(b, c);
        out(a, c) = acc;
      }
    }
  }
}

}  // namespace

void TokenField::validate() const {
  if (tokens.rows() != similarity.rows()) {
    throw std::invalid_argument("TokenField: tokens and similarity row counts differ");
  }
  if (tokens.rows() > 0 && (tokens.cols() == 0 || similarity.cols() == 0)) {
    throw std::invalid_argument("TokenField: zero channels or categories");
  }
  if (!tokens.all_finite() || !similarity.all_finite()) {
    throw std::invalid_argument("TokenField: non-finite entry");
  }
}

void MixerWeights::validate() const {
  const std::size_t c = w_q.rows();
  for (const Matrix* w : {&w_q, &w_k, &w_v}) {
    if (w->rows() != c || w->cols() != c) {
      throw std::invalid_argument("MixerWeights: projections must be square and equal-sized");
    }
    if (!w->all_finite()) throw std::invalid_argument("MixerWeights: non-finite entry");
  }
  if (head_count < 1 || c % head_count != 0) {
    throw std::invalid_argument("MixerWeights: head_count must divide channel count");
  }
}

std::size_t default_head_count(std::size_t channels) {
  std::size_t heads = 1;
  while (channels % (heads * 2) == 0 && channels / (heads * 2) >= 8) heads *= 2;
  return heads;
}

std::size_t token_category(const TokenField& field, std::size_t token) {
  const auto row = field.similarity.row(token);
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

CategoryPartition categorize(const TokenField& field,
                             std::optional<std::span<const std::size_t>> indices,
                             std::size_t capacity) {
  if (capacity < 1) throw std::invalid_argument("categorize: capacity must be >= 1");

  std::vector<std::size_t> selected;
  if (indices) {
    selected.assign(indices->begin(), indices->end());
    for (std::size_t idx : selected) {
      if (idx >= field.token_count()) {
        throw std::invalid_argument("categorize: token index out of range");
      }
    }
  } else {
    selected.resize(field.token_count());
    std::iota(selected.begin(), selected.end(), std::size_t{0});
  }

  std::vector<std::pair<std::size_t, std::size_t>> keyed;
  keyed.reserve(selected.size());
  for (std::size_t idx : selected) keyed.emplace_back(token_category(field, idx), idx);
  std::sort(keyed.begin(), keyed.end());

  CategoryPartition partition;
  partition.group_capacity = capacity;
  for (std::size_t start = 0; start < keyed.size(); start += capacity) {
    const std::size_t stop = std::min(start + capacity, keyed.size());
    auto& group = partition.groups.emplace_back();
    group.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) group.push_back(keyed[i].second);
  }
  return partition;
}

Matrix grouped_msa(const TokenField& field, const CategoryPartition& partition,
                   const MixerWeights& weights, MixerTrace* trace) {
  weights.validate();
  if (weights.channels() != field.channels()) {
    throw std::invalid_argument("grouped_msa: weight size does not match token channels");
  }
  const std::size_t n_tokens = field.token_count();
  Matrix out(n_tokens, field.channels());
  if (trace && trace->row_writes.size() != n_tokens) trace->row_writes.assign(n_tokens, 0);

  for (const auto& group : partition.groups) {
    if (group.empty()) continue;
    const Matrix x = gather_rows(field.tokens, group);
    const Matrix q = project(x, weights.w_q);
    const Matrix k = project(x, weights.w_k);
    const Matrix v = project(x, weights.w_v);
    require_finite(q, "query projection");
    require_finite(k, "key projection");
    require_finite(v, "value projection");

    Matrix mixed(group.size(), field.channels());
    attend_group(q, k, v, weights.head_count, mixed);
    require_finite(mixed, "attention output");

    for (std::size_t r = 0; r < group.size(); ++r) {
      const auto src = mixed.row(r);
      std::copy(src.begin(), src.end(), out.row(group[r]).begin());
    }
    if (trace) {
      trace->score_entries += group.size() * group.size();
      trace->group_sizes.push_back(group.size());
      for (std::size_t idx : group) ++trace->row_writes[idx];
    }
  }
  return out;
}

Matrix full_ac_msa(const TokenField& field, const MixerWeights& weights,
                   std::size_t capacity, MixerTrace* trace) {
  field.validate();
  return grouped_msa(field, categorize(field, std::nullopt, capacity), weights, trace);
}

Matrix pure_pass_ac_msa(const TokenField& field, const PurityMask& mask,
                        const Matrix& bypass, const MixerWeights& weights,
                        std::size_t capacity, MixerTrace* trace) {
  field.validate();
  const std::size_t n_tokens = field.token_count();
  if (mask.size() != n_tokens) {
    throw std::invalid_argument("pure_pass_ac_msa: mask covers " + std::to_string(mask.size()) +
                                " pixels but field has " + std::to_string(n_tokens) +
                                " tokens");
  }
  if (bypass.rows() != n_tokens || bypass.cols() != field.channels()) {
    throw std::invalid_argument("pure_pass_ac_msa: bypass shape must be N x C");
  }

  const HardIndexSet hard = mask_to_indices(mask);
  const CategoryPartition partition = categorize(field, hard.indices, capacity);
  Matrix out = grouped_msa(field, partition, weights, trace);

  for (std::size_t p = 0; p < n_tokens; ++p) {
    if (mask[p] != 0) continue;
    const auto src = bypass.row(p);
    std::copy(src.begin(), src.end(), out.row(p).begin());
    if (trace) ++trace->row_writes[p];
  }
  return out;
}

}  // namespace puremask
