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
#include <stdexcept>
#include <vector>

namespace puremask {

/// Dense row-major H×W grid. Base of every per-pixel map in the library.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * width_, width_};
  }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool same_shape(const Grid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// RGB image with every component in [0,1].
class NormalizedImage : public Grid<Rgb> {
 public:
  using Grid<Rgb>::Grid;

  /// Builds from interleaved 8-bit RGB (3 bytes per pixel), dividing by 255.
  static NormalizedImage from_rgb8(std::size_t height, std::size_t width,
                                   std::span<const std::uint8_t> interleaved);

  /// Throws std::invalid_argument if any component lies outside [0,1].
  void validate() const;
};

/// Per-pixel color-category indices.
class LabelMap : public Grid<std::uint16_t> {
 public:
  using Grid<std::uint16_t>::Grid;
};

/// Per-pixel binary flags: 0 = pure, 1 = hard.
class PurityMask : public Grid<std::uint8_t> {
 public:
  using Grid<std::uint8_t>::Grid;

  std::size_t pure_count() const noexcept;
};

}  // namespace puremask
