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

#include <cstdint>
#include <filesystem>

#include "puremask/grid.hpp"

namespace puremask {

/// Reads an 8-bit PNG (RGB, gray, palette; alpha is dropped) or a binary or
/// ASCII PPM/PGM with maxval 255. Gray is replicated to three channels.
/// Throws IoError carrying the path.
NormalizedImage load_image(const std::filesystem::path& path);

/// Component to byte with round-to-nearest, clamped to [0,255].
std::uint8_t to_byte(double component);

void write_png(const std::filesystem::path& path, const NormalizedImage& image);

/// Single-channel 8-bit PNG: 0 for pure, 255 for hard.
void write_mask_png(const std::filesystem::path& path, const PurityMask& mask);

/// Inverse of write_mask_png. Any byte other than 0 or 255 is an IoError.
PurityMask read_mask_png(const std::filesystem::path& path);

/// Blends pure pixels 50/50 with `pure_tint`; hard pixels pass through.
NormalizedImage render_overlay(const NormalizedImage& image, const PurityMask& mask,
                               const Rgb& pure_tint = {1.0, 1.0, 1.0});

/// Places `left` and `right` side by side, padding the shorter one with black.
NormalizedImage side_by_side(const NormalizedImage& left, const NormalizedImage& right);

}  // namespace puremask
