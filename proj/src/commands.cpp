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

#include "puremask/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "puremask/errors.hpp"
#include "puremask/image_io.hpp"

namespace puremask {
namespace {

namespace fs = std::filesystem;

double r6(double v) { return round_significant(v, 6); }

// Output stems, de-duplicated by appending the input position.
std::vector<std::string> unique_stems(const std::vector<fs::path>& inputs) {
  std::vector<std::string> stems;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::string stem = inputs[i].stem().string();
    if (stem.empty()) stem = "image";
    if (!seen.insert(stem).second) {
      stem += "_" + std::to_string(i);
      seen.insert(stem);
    }
    stems.push_back(std::move(stem));
  }
  return stems;
}

Json record_to_json(const ImageRecord& rec) {
  Json j;
  j["id"] = rec.id;
  j["pure_fraction"] = r6(rec.stats.pure_fraction);
  j["pure_pixel_count"] = rec.stats.pure_pixel_count;
  j["total_pixels"] = rec.stats.total_pixels;
  j["window_size"] = rec.stats.window_size;
  j["shift_size"] = rec.stats.shift_size;
  j["predicted_flops"] = r6(rec.savings.predicted_flops);
  j["flops_saved"] = r6(rec.savings.flops_saved);
  j["baseline_flops"] = r6(rec.savings.baseline_flops);
  for (const auto& [key, value] : rec.extra.items()) j[key] = value;
  return j;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

void prepare_output_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError(config.output_dir.string(), "cannot create directory: " + ec.message());
}

ImageRecord make_record(const std::string& id, const MaskStats& stats,
                        const CostProfile& profile) {
  return {id, stats, predict_flops(profile, stats.pure_fraction), Json::object()};
}

// Runs `body` per input, collecting failures instead of aborting the batch.
template <typename Body>
CorpusReport for_each_input(const std::string& command, const RunConfig& config,
                            const std::vector<fs::path>& inputs, Body&& body) {
  config.validate();
  prepare_output_dir(config);
  CorpusReport report;
  report.command = command;
  const auto stems = unique_stems(inputs);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      report.per_image.push_back(body(inputs[i], stems[i]));
    } catch (const std::exception& e) {
      report.errors.push_back(inputs[i].string() + ": " + e.what());
    }
  }
  report.aggregate = aggregate_records(report.per_image);
  return report;
}

}  // namespace

void RunConfig::validate() const {
  if (window_size < 1) throw std::invalid_argument("window size must be >= 1");
  if (shift_size >= window_size) {
    throw std::invalid_argument("shift size must be smaller than the window size");
  }
  if (center_count < 1 || center_count > std::numeric_limits<LabelMap::value_type>::max()) {
    throw std::invalid_argument("center count must be in [1, 65535]");
  }
  if (!(saturation >= 0.0 && saturation <= 1.0)) throw std::invalid_argument("saturation outside [0,1]");
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("value outside [0,1]");
  if (group_capacity < 1) throw std::invalid_argument("group capacity must be >= 1");
  if (baseline_ratio && !(*baseline_ratio >= 0.0 && *baseline_ratio <= 1.0)) {
    throw std::invalid_argument("ratio outside [0,1]");
  }
  if (baseline_window_size < 1) throw std::invalid_argument("baseline window size must be >= 1");
  if (channels < 1) throw std::invalid_argument("channels must be >= 1");
  profile.validate();
}

CorpusAggregate aggregate_records(const std::vector<ImageRecord>& records) {
  CorpusAggregate agg;
  agg.image_count = records.size();
  if (records.empty()) return agg;
  agg.min_pure_fraction = std::numeric_limits<double>::infinity();
  agg.max_pure_fraction = -std::numeric_limits<double>::infinity();
  double sum_p = 0.0;
  double sum_flops = 0.0;
  for (const auto& rec : records) {
    sum_p += rec.stats.pure_fraction;
    sum_flops += rec.savings.predicted_flops;
    agg.min_pure_fraction = std::min(agg.min_pure_fraction, rec.stats.pure_fraction);
    agg.max_pure_fraction = std::max(agg.max_pure_fraction, rec.stats.pure_fraction);
  }
  const double n = static_cast<double>(records.size());
  agg.mean_pure_fraction = sum_p / n;
  agg.mean_predicted_flops = sum_flops / n;
  return agg;
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

Json config_to_json(const RunConfig& config) {
  Json j;
  j["window_size"] = config.window_size;
  j["shift_size"] = config.shift_size;
  j["center_count"] = config.center_count;
  j["saturation"] = r6(config.saturation);
  j["value"] = r6(config.value);
  j["group_capacity"] = config.group_capacity;
  j["baseline_ratio"] = config.baseline_ratio ? Json(r6(*config.baseline_ratio)) : Json(nullptr);
  j["baseline_window_size"] = config.baseline_window_size;
  j["channels"] = config.channels;
  j["seed"] = config.seed;
  j["profile"] = {{"total_flops_full", r6(config.profile.total_flops_full)},
                  {"maskable_flops", r6(config.profile.maskable_flops)},
                  {"params", config.profile.params}};
  return j;
}

Json report_to_json(const RunConfig& config, const CorpusReport& report) {
  Json j;
  j["command"] = report.command;
  j["config"] = config_to_json(config);
  j["per_image"] = Json::array();
  for (const auto& rec : report.per_image) j["per_image"].push_back(record_to_json(rec));
  const auto& agg = report.aggregate;
  j["aggregate"] = {{"image_count", agg.image_count},
                    {"mean_pure_fraction", r6(agg.mean_pure_fraction)},
                    {"min_pure_fraction", r6(agg.min_pure_fraction)},
                    {"max_pure_fraction", r6(agg.max_pure_fraction)},
                    {"mean_predicted_flops", r6(agg.mean_predicted_flops)}};
  j["errors"] = report.errors;
  return j;
}

Json centers_to_json(const ColorCenters& centers) {
  Json j;
  j["k_count"] = centers.k_count;
  j["saturation"] = centers.saturation;
  j["value"] = centers.value;
  j["centers"] = Json::array();
  for (std::size_t k = 0; k < centers.centers.size(); ++k) {
    const Rgb& c = centers.centers[k];
    j["centers"].push_back({{"index", k},
                            {"hue", static_cast<double>(k) / static_cast<double>(centers.k_count)},
                            {"r", c.r},
                            {"g", c.g},
                            {"b", c.b}});
  }
  return j;
}

fs::path write_report(const RunConfig& config, const CorpusReport& report) {
  prepare_output_dir(config);
  const fs::path path = config.output_dir / (report.command + "_report.json");
  write_json(path, report_to_json(config, report));
  return path;
}

CorpusReport run_mask_command(const RunConfig& config, const std::vector<fs::path>& inputs) {
  const ColorCenters centers =
      make_color_centers(config.center_count, config.saturation, config.value);
  return for_each_input("mask", config, inputs, [&](const fs::path& input, const std::string& stem) {
    const NormalizedImage image = load_image(input);
    const LabelMap labels = classify_pixels(image, centers);
    const MaskResult result =
        pure_pass_mask_from_labels(labels, config.window_size, config.shift_size);
    const PurityMask base_only = window_purity_mask(labels, config.window_size);

    ImageRecord rec = make_record(input.string(), result.stats, config.profile);
    rec.extra["pure_fraction_base_grid"] =
        r6(mask_stats(base_only, config.window_size, 0).pure_fraction);
    rec.extra["mask_png"] = stem + "_mask.png";
    rec.extra["overlay_png"] = stem + "_overlay.png";

    write_mask_png(config.output_dir / (stem + "_mask.png"), result.mask);
    write_png(config.output_dir / (stem + "_overlay.png"), render_overlay(image, result.mask));
    write_json(config.output_dir / (stem + "_stats.json"),
               Json{{"config", config_to_json(config)}, {"image", record_to_json(rec)}});
    return rec;
  });
}

CorpusReport run_compare_command(const RunConfig& config, const std::vector<fs::path>& inputs) {
  const ColorCenters centers =
      make_color_centers(config.center_count, config.saturation, config.value);
  const double ratio = config.baseline_ratio.value_or(kDefaultBaselineRatio);
  return for_each_input("compare", config, inputs, [&](const fs::path& input, const std::string& stem) {
    const NormalizedImage image = load_image(input);
    const MaskResult pp = pure_pass_mask(image, centers, config.window_size, config.shift_size);
    const PurityMask baseline =
        fixed_ratio_window_mask(image, config.baseline_window_size, ratio);

    std::size_t differ = 0, pp_only = 0, baseline_only = 0;
    for (std::size_t p = 0; p < image.size(); ++p) {
      if (pp.mask[p] == baseline[p]) continue;
      ++differ;
      (pp.mask[p] == 0 ? pp_only : baseline_only) += 1;
    }
    const double total = static_cast<double>(image.size());

    ImageRecord rec = make_record(input.string(), pp.stats, config.profile);
    rec.extra["baseline_ratio"] = r6(ratio);
    rec.extra["baseline_window_size"] = config.baseline_window_size;
    rec.extra["baseline_pure_fraction"] =
        r6(static_cast<double>(baseline.pure_count()) / total);
    rec.extra["disagreement"] = r6(static_cast<double>(differ) / total);
    rec.extra["pure_only_in_pure_pass"] = r6(static_cast<double>(pp_only) / total);
    rec.extra["pure_only_in_baseline"] = r6(static_cast<double>(baseline_only) / total);
    rec.extra["compare_png"] = stem + "_compare.png";

    write_mask_png(config.output_dir / (stem + "_mask.png"), pp.mask);
    write_mask_png(config.output_dir / (stem + "_baseline_mask.png"), baseline);
    write_png(config.output_dir / (stem + "_compare.png"),
              side_by_side(render_overlay(image, pp.mask), render_overlay(image, baseline)));
    return rec;
  });
}

CorpusReport run_cost_command(const RunConfig& config, const std::vector<fs::path>& inputs,
                              const std::vector<double>& fractions) {
  for (double p : fractions) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("pure fraction outside [0,1]");
  }
  const ColorCenters centers =
      make_color_centers(config.center_count, config.saturation, config.value);
  CorpusReport report =
      for_each_input("cost", config, inputs, [&](const fs::path& input, const std::string&) {
        const MaskResult pp =
            pure_pass_mask(load_image(input), centers, config.window_size, config.shift_size);
        return make_record(input.string(), pp.stats, config.profile);
      });
  for (double p : fractions) {
    MaskStats stats;
    stats.pure_fraction = p;
    stats.window_size = config.window_size;
    stats.shift_size = config.shift_size;
    char id[64];
    std::snprintf(id, sizeof(id), "fraction=%.6g", p);
    report.per_image.push_back(make_record(id, stats, config.profile));
  }
  report.aggregate = aggregate_records(report.per_image);
  return report;
}

TokenField build_token_field(const NormalizedImage& image, const ColorCenters& centers,
                             std::size_t channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix lift(3, channels);
  for (double& v : lift.values()) v = normal(rng);

  TokenField field{Matrix(image.size(), channels), Matrix(image.size(), centers.centers.size())};
  for (std::size_t p = 0; p < image.size(); ++p) {
    const Rgb& px = image[p];
    auto token = field.tokens.row(p);
    for (std::size_t c = 0; c < channels; ++c) {
      token[c] = px.r * lift(0, c) + px.g * lift(1, c) + px.b * lift(2, c);
    }
    auto sim = field.similarity.row(p);
    for (std::size_t k = 0; k < centers.centers.size(); ++k) {
      const Rgb& ck = centers.centers[k];
      const double dr = px.r - ck.r, dg = px.g - ck.g, db = px.b - ck.b;
      sim[k] = -(dr * dr + dg * dg + db * db);
    }
  }
  return field;
}

MixerWeights random_weights(std::size_t channels, std::size_t head_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(channels)));
  MixerWeights w{Matrix(channels, channels), Matrix(channels, channels),
                 Matrix(channels, channels), head_count};
  for (Matrix* m : {&w.w_q, &w.w_k, &w.w_v}) {
    for (double& v : m->values()) v = normal(rng);
  }
  return w;
}

CorpusReport run_simulate_command(const RunConfig& config, const std::vector<fs::path>& inputs) {
  const ColorCenters centers =
      make_color_centers(config.center_count, config.saturation, config.value);
  const std::size_t heads = default_head_count(config.channels);
  const MixerWeights weights = random_weights(config.channels, heads, config.seed + 1);

  return for_each_input("simulate", config, inputs, [&](const fs::path& input, const std::string&) {
    const NormalizedImage image = load_image(input);
    const MaskResult pp = pure_pass_mask(image, centers, config.window_size, config.shift_size);
    const TokenField field = build_token_field(image, centers, config.channels, config.seed);
    // The tokens themselves stand in for the parallel branch output.
    const Matrix& bypass = field.tokens;

    MixerTrace trace;
    const Matrix out =
        pure_pass_ac_msa(field, pp.mask, bypass, weights, config.group_capacity, &trace);

    const HardIndexSet hard = mask_to_indices(pp.mask);
    const CategoryPartition pp_partition = categorize(field, hard.indices, config.group_capacity);
    const CategoryPartition full_partition =
        categorize(field, std::nullopt, config.group_capacity);
    const double flops_pp = attention_flops_count(pp_partition, config.channels, heads);
    const double flops_full = attention_flops_count(full_partition, config.channels, heads);
    std::size_t full_scores = 0;
    for (const auto& g : full_partition.groups) full_scores += g.size() * g.size();

    bool write_once = std::all_of(trace.row_writes.begin(), trace.row_writes.end(),
                                  [](std::uint32_t w) { return w == 1; });
    bool bypass_exact = true;
    for (std::size_t p = 0; p < pp.mask.size() && bypass_exact; ++p) {
      if (pp.mask[p] != 0) continue;
      const auto a = out.row(p);
      const auto b = bypass.row(p);
      bypass_exact = std::equal(a.begin(), a.end(), b.begin());
    }

    ImageRecord rec = make_record(input.string(), pp.stats, config.profile);
    rec.extra["channels"] = config.channels;
    rec.extra["head_count"] = heads;
    rec.extra["hard_tokens"] = hard.indices.size();
    rec.extra["groups_pure_pass"] = pp_partition.groups.size();
    rec.extra["groups_full"] = full_partition.groups.size();
    rec.extra["attention_flops_pure_pass"] = r6(flops_pp);
    rec.extra["attention_flops_full"] = r6(flops_full);
    rec.extra["attention_flops_ratio"] = r6(flops_full > 0.0 ? flops_pp / flops_full : 0.0);
    rec.extra["score_entries_pure_pass"] = trace.score_entries;
    rec.extra["score_entries_full"] = full_scores;
    rec.extra["rows_written_once"] = write_once;
    rec.extra["pure_rows_match_bypass"] = bypass_exact;
    return rec;
  });
}

}  // namespace puremask
