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
#include <span>
#include <string>

#include "puremask/selective_mixer.hpp"

namespace puremask {

// Reference network: 87.15 GFLOPs and 769K parameters with nothing masked.
inline constexpr double kReferenceTotalGflops = 87.15;
inline constexpr double kReferenceMaskableGflops = 20.18;
inline constexpr std::uint64_t kReferenceParams = 769'000;

/// Affine FLOPs model: flops(p) = total_flops_full - maskable_flops · p.
struct CostProfile {
  double total_flops_full = kReferenceTotalGflops;
  double maskable_flops = kReferenceMaskableGflops;
  std::uint64_t params = kReferenceParams;

  void validate() const;
};

struct SavingsReport {
  double pure_fraction = 0.0;
  double predicted_flops = 0.0;
  double flops_saved = 0.0;
  double baseline_flops = 0.0;
};

struct CalibrationPoint {
  double pure_fraction = 0.0;
  double flops = 0.0;
};

/// Least-squares slope of the affine model with the intercept pinned at
/// `total_flops_full`. Points at p = 0 carry no slope information.
CostProfile calibrate(std::span<const CalibrationPoint> points, double total_flops_full,
                      std::uint64_t params = kReferenceParams);

SavingsReport predict_flops(const CostProfile& profile, double pure_fraction);

/// Analytic count for category attention: per group of n tokens,
/// 3·n·C² for the Q/K/V projections plus 2·n²·C for logits and value mixing.
double attention_flops_count(const CategoryPartition& partition, std::size_t channels,
                             std::size_t head_count);

/// Parses a key=value profile. Recognized keys: total_flops_full,
/// maskable_flops, params, and repeated `point=<fraction>,<gflops>` lines
/// which trigger calibration. '#' starts a comment.
CostProfile parse_profile(const std::string& text);
CostProfile load_profile(const std::string& path);

}  // namespace puremask
