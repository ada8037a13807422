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

// puremask: pixel-purity masks, adaptive-computation cost estimates, and the
// masked category-attention simulation from the command line.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "puremask/commands.hpp"
#include "puremask/cost_model.hpp"
#include "puremask/errors.hpp"
#include "puremask/pixel_classify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidArgs = 2;

struct Options {
  puremask::RunConfig config;
  std::optional<double> ratio;
  std::string profile_path;
  std::vector<std::string> points;
  std::optional<double> total_flops;
  std::vector<double> fractions;
  std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, Options& opt) {
  auto& cfg = opt.config;
  cmd->add_option("--window-size", cfg.window_size, "Purity window size S")->capture_default_str();
  cmd->add_option("--shift-size", cfg.shift_size, "Cross-shift offset (must be < S)")
      ->capture_default_str();
  cmd->add_option("--centers", cfg.center_count, "Number of color centers K")->capture_default_str();
  cmd->add_option("--saturation", cfg.saturation, "HSV saturation of the centers")
      ->capture_default_str();
  cmd->add_option("--value", cfg.value, "HSV value of the centers")->capture_default_str();
  cmd->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
}

void add_profile(CLI::App* cmd, Options& opt) {
  cmd->add_option("--profile", opt.profile_path, "key=value cost profile file");
  cmd->add_option("--point", opt.points, "Calibration point <fraction>,<gflops> (repeatable)");
  cmd->add_option("--total-flops", opt.total_flops, "GFLOPs at pure fraction 0");
}

void resolve_profile(Options& opt) {
  if (!opt.profile_path.empty()) opt.config.profile = puremask::load_profile(opt.profile_path);
  if (opt.total_flops) opt.config.profile.total_flops_full = *opt.total_flops;
  if (!opt.points.empty()) {
    std::vector<puremask::CalibrationPoint> pts;
    for (const auto& s : opt.points) {
      const auto comma = s.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("--point expects <fraction>,<gflops>, got '" + s + "'");
      }
      pts.push_back({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
    }
    opt.config.profile = puremask::calibrate(pts, opt.config.profile.total_flops_full,
                                             opt.config.profile.params);
  }
  opt.config.profile.validate();
}

int finish(const Options& opt, const puremask::CorpusReport& report) {
  const auto path = puremask::write_report(opt.config, report);
  std::cout << puremask::report_to_json(opt.config, report).dump(2) << '\n';
  for (const auto& err : report.errors) std::cerr << "error: " << err << '\n';
  std::cerr << "report written to " << path.string() << '\n';
  const bool had_work = !opt.inputs.empty() || !opt.fractions.empty();
  return had_work && report.per_image.empty() ? kExitFailure : kExitOk;
}

std::vector<std::filesystem::path> as_paths(const std::vector<std::string>& in) {
  return {in.begin(), in.end()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pixel-purity masking and adaptive computation cost tools"};
  app.require_subcommand(1);
  Options opt;

  auto* mask = app.add_subcommand("mask", "Write purity masks, overlays and stats per image");
  add_common(mask, opt);
  add_profile(mask, opt);
  mask->add_option("inputs", opt.inputs, "PNG/PPM images")->required();

  auto* compare = app.add_subcommand("compare", "Compare against a fixed-ratio window mask");
  add_common(compare, opt);
  add_profile(compare, opt);
  compare->add_option("--ratio", opt.ratio, "Fraction of windows marked hard by the baseline");
  compare->add_option("--baseline-window", opt.config.baseline_window_size,
                      "Baseline window size")
      ->capture_default_str();
  compare->add_option("inputs", opt.inputs, "PNG/PPM images")->required();

  auto* cost = app.add_subcommand("cost", "Predict FLOPs from measured or given pure fractions");
  add_common(cost, opt);
  add_profile(cost, opt);
  cost->add_option("--fraction", opt.fractions, "Pure fraction in [0,1] (repeatable)");
  cost->add_option("inputs", opt.inputs, "PNG/PPM images");

  auto* simulate = app.add_subcommand("simulate", "Run masked category attention on image tokens");
  add_common(simulate, opt);
  add_profile(simulate, opt);
  simulate->add_option("--group-capacity", opt.config.group_capacity, "Tokens per attention group")
      ->capture_default_str();
  simulate->add_option("--channels", opt.config.channels, "Token channels C")->capture_default_str();
  simulate->add_option("--seed", opt.config.seed, "Seed for the token lift and weights")
      ->capture_default_str();
  simulate->add_option("inputs", opt.inputs, "PNG/PPM images")->required();

  auto* centers = app.add_subcommand("centers", "Print the color center table as JSON");
  centers->add_option("--centers", opt.config.center_count, "Number of color centers K")
      ->capture_default_str();
  centers->add_option("--saturation", opt.config.saturation)->capture_default_str();
  centers->add_option("--value", opt.config.value)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidArgs;
  }

  try {
    if (*centers) {
      const auto table = puremask::make_color_centers(opt.config.center_count,
                                                      opt.config.saturation, opt.config.value);
      std::cout << puremask::centers_to_json(table).dump(2) << '\n';
      return kExitOk;
    }

    resolve_profile(opt);
    opt.config.baseline_ratio = opt.ratio;
    opt.config.validate();
    const auto inputs = as_paths(opt.inputs);

    if (*mask) return finish(opt, puremask::run_mask_command(opt.config, inputs));
    if (*compare) return finish(opt, puremask::run_compare_command(opt.config, inputs));
    if (*simulate) return finish(opt, puremask::run_simulate_command(opt.config, inputs));
    if (*cost) {
      if (opt.inputs.empty() && opt.fractions.empty()) {
        std::cerr << "cost: give at least one image or --fraction\n";
        return kExitInvalidArgs;
      }
      return finish(opt, puremask::run_cost_command(opt.config, inputs, opt.fractions));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalidArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
