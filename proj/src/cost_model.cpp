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

#include "puremask/cost_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "puremask/errors.hpp"

namespace puremask {

void CostProfile::validate() const {
  if (!(maskable_flops > 0.0 && maskable_flops < total_flops_full)) {
    throw std::invalid_argument("CostProfile: need 0 < maskable_flops < total_flops_full");
  }
  if (params == 0) throw std::invalid_argument("CostProfile: params must be positive");
}

CostProfile calibrate(std::span<const CalibrationPoint> points, double total_flops_full,
                      std::uint64_t params) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& pt : points) {
    if (!(pt.pure_fraction >= 0.0 && pt.pure_fraction <= 1.0)) {
      throw std::invalid_argument("calibrate: pure fraction outside [0,1]");
    }
    num += pt.pure_fraction * (total_flops_full - pt.flops);
    den += pt.pure_fraction * pt.pure_fraction;
  }
  if (den == 0.0) {
    throw std::invalid_argument("calibrate: need a point with pure fraction > 0");
  }
  CostProfile profile{total_flops_full, num / den, params};
  profile.validate();
  return profile;
}

SavingsReport predict_flops(const CostProfile& profile, double pure_fraction) {
  if (!(pure_fraction >= 0.0 && pure_fraction <= 1.0)) {
    throw std::invalid_argument("predict_flops: pure fraction outside [0,1]");
  }
  SavingsReport report;
  report.pure_fraction = pure_fraction;
  report.baseline_flops = profile.total_flops_full;
  report.flops_saved = profile.maskable_flops * pure_fraction;
  report.predicted_flops = profile.total_flops_full - report.flops_saved;
  return report;
}

double attention_flops_count(const CategoryPartition& partition, std::size_t channels,
                             std::size_t head_count) {
  if (head_count < 1 || (channels > 0 && channels % head_count != 0)) {
    throw std::invalid_argument("attention_flops_count: head_count must divide channels");
  }
  // Heads split C, so the per-pair cost summed over heads is independent of
  // the head count.
  const double c = static_cast<double>(channels);
  double flops = 0.0;
  for (const auto& group : partition.groups) {
    const double n = static_cast<double>(group.size());
    flops += 3.0 * n * c * c + 2.0 * n * n * c;
  }
  return flops;
}

CostProfile parse_profile(const std::string& text) {
  CostProfile profile;
  std::vector<CalibrationPoint> points;
  bool saw_maskable = false;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "total_flops_full") {
        profile.total_flops_full = std::stod(value);
      } else if (key == "maskable_flops") {
        profile.maskable_flops = std::stod(value);
        saw_maskable = true;
      } else if (key == "params") {
        profile.params = std::stoull(value);
      } else if (key == "point") {
        const auto comma = value.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("point needs <fraction>,<gflops>");
        points.push_back({std::stod(value.substr(0, comma)), std::stod(value.substr(comma + 1))});
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (!points.empty()) {
    if (saw_maskable) {
      throw std::invalid_argument("profile: give either maskable_flops or calibration points");
    }
    return calibrate(points, profile.total_flops_full, profile.params);
  }
  profile.validate();
  return profile;
}

CostProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open profile");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str());
}

}  // namespace puremask
