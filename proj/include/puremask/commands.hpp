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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "puremask/cost_model.hpp"
#include "puremask/mask.hpp"
#include "puremask/pixel_classify.hpp"
#include "puremask/selective_mixer.hpp"

namespace puremask {

using Json = nlohmann::ordered_json;

inline constexpr double kDefaultBaselineRatio = 0.5;
inline constexpr std::size_t kDefaultBaselineWindowSize = 16;
inline constexpr std::size_t kDefaultSimulateChannels = 48;

struct RunConfig {
  std::size_t window_size = kDefaultWindowSize;
  std::size_t shift_size = kDefaultShiftSize;
  std::size_t center_count = kDefaultCenterCount;
  double saturation = kDefaultSaturation;
  double value = kDefaultValue;
  std::size_t group_capacity = kDefaultGroupCapacity;
  std::optional<double> baseline_ratio;
  std::size_t baseline_window_size = kDefaultBaselineWindowSize;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  std::size_t channels = kDefaultSimulateChannels;
  CostProfile profile;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct ImageRecord {
  std::string id;
  MaskStats stats;
  SavingsReport savings;
  Json extra = Json::object();
};

struct CorpusAggregate {
  std::size_t image_count = 0;
  double mean_pure_fraction = 0.0;
  double min_pure_fraction = 0.0;
  double max_pure_fraction = 0.0;
  double mean_predicted_flops = 0.0;
};

struct CorpusReport {
  std::string command;
  std::vector<ImageRecord> per_image;
  CorpusAggregate aggregate;
  std::vector<std::string> errors;
};

CorpusAggregate aggregate_records(const std::vector<ImageRecord>& records);

/// Rounds to `digits` significant decimal digits.
double round_significant(double value, int digits = 6);

Json config_to_json(const RunConfig& config);
Json report_to_json(const RunConfig& config, const CorpusReport& report);

/// Center table with full double precision.
Json centers_to_json(const ColorCenters& centers);

/// Per image: <stem>_mask.png, <stem>_overlay.png, <stem>_stats.json.
CorpusReport run_mask_command(const RunConfig& config,
                              const std::vector<std::filesystem::path>& inputs);

/// Per image: pure-pass and fixed-ratio overlays side by side plus
/// disagreement statistics. The ratio defaults to kDefaultBaselineRatio.
CorpusReport run_compare_command(const RunConfig& config,
                                 const std::vector<std::filesystem::path>& inputs);

/// Savings for pure fractions measured on images and/or given directly.
CorpusReport run_cost_command(const RunConfig& config,
                              const std::vector<std::filesystem::path>& inputs,
                              const std::vector<double>& fractions);

/// Runs the masked mixer on a synthetic token field built from each image
/// and reports counted attention FLOPs against the unmasked path.
CorpusReport run_simulate_command(const RunConfig& config,
                                  const std::vector<std::filesystem::path>& inputs);

/// Token field for `simulate`: RGB lifted to C channels by a seeded Gaussian
/// projection; similarity is the negated squared distance to each center.
TokenField build_token_field(const NormalizedImage& image, const ColorCenters& centers,
                             std::size_t channels, std::uint64_t seed);

/// Gaussian weights scaled by 1/sqrt(C), drawn from `seed`.
MixerWeights random_weights(std::size_t channels, std::size_t head_count,
                            std::uint64_t seed);

/// Writes `report.json` into the output directory and returns its path.
std::filesystem::path write_report(const RunConfig& config, const CorpusReport& report);

}  // namespace puremask
