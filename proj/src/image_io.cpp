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

#include "puremask/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "puremask/errors.hpp"

namespace puremask {
namespace {

class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

 private:
  png_image image_;
};

bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Decodes to 8-bit interleaved samples with the requested channel layout.
std::vector<std::uint8_t> decode_png(const std::filesystem::path& path,
                                     const std::vector<std::uint8_t>& bytes,
                                     png_uint_32 format, std::size_t& height,
                                     std::size_t& width) {
  PngImage png;
  if (!png_image_begin_read_from_memory(png.get(), bytes.data(), bytes.size())) {
    throw IoError(path.string(), std::string("PNG decode failed: ") + png->message);
  }
  png->format = format;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(*png.get()));
  const png_color black{0, 0, 0};
  if (!png_image_finish_read(png.get(), &black, pixels.data(), 0, nullptr)) {
    throw IoError(path.string(), std::string("PNG decode failed: ") + png->message);
  }
  height = png->height;
  width = png->width;
  return pixels;
}

struct PnmReader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool next_uint(unsigned long& out) {
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) return false;
    out = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      out = out * 10 + (bytes[pos] - '0');
      if (out > 1'000'000'000UL) return false;
      ++pos;
    }
    return true;
  }
};

NormalizedImage decode_pnm(const std::filesystem::path& path,
                           const std::vector<std::uint8_t>& bytes) {
  const auto fail = [&](const std::string& why) { return IoError(path.string(), why); };
  if (bytes.size() < 2 || bytes[0] != 'P') throw fail("unsupported image format");
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw fail("unsupported PNM variant P" + std::string(1, kind));
  }
  const bool gray = kind == '2' || kind == '5';
  const bool binary = kind == '5' || kind == '6';

  PnmReader reader{bytes, 2};
  unsigned long width = 0, height = 0, maxval = 0;
  if (!reader.next_uint(width) || !reader.next_uint(height) || !reader.next_uint(maxval)) {
    throw fail("malformed PNM header");
  }
  if (width == 0 || height == 0) throw fail("empty image");
  if (maxval != 255) throw fail("only 8-bit PNM (maxval 255) is supported");

  const std::size_t channels = gray ? 1 : 3;
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint8_t> samples(count);
  if (binary) {
    ++reader.pos;  // single whitespace after maxval
    if (reader.pos + count > bytes.size()) throw fail("truncated PNM data");
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos), count, samples.begin());
  } else {
    for (auto& s : samples) {
      unsigned long v = 0;
      if (!reader.next_uint(v) || v > 255) throw fail("malformed PNM sample");
      s = static_cast<std::uint8_t>(v);
    }
  }

  if (gray) {
    std::vector<std::uint8_t> rgb(count * 3);
    for (std::size_t i = 0; i < count; ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = samples[i];
    samples = std::move(rgb);
  }
  return NormalizedImage::from_rgb8(height, width, samples);
}

void write_png_bytes(const std::filesystem::path& path, png_uint_32 format, std::size_t height,
                     std::size_t width, const std::vector<std::uint8_t>& pixels) {
  PngImage png;
  png->format = format;
  png->height = static_cast<png_uint_32>(height);
  png->width = static_cast<png_uint_32>(width);
  if (!png_image_write_to_file(png.get(), path.string().c_str(), 0, pixels.data(), 0,
                               nullptr)) {
    throw IoError(path.string(), std::string("PNG encode failed: ") + png->message);
  }
}

}  // namespace

NormalizedImage load_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (has_png_signature(bytes)) {
    std::size_t height = 0, width = 0;
    const auto rgb = decode_png(path, bytes, PNG_FORMAT_RGB, height, width);
    return NormalizedImage::from_rgb8(height, width, rgb);
  }
  return decode_pnm(path, bytes);
}

std::uint8_t to_byte(double component) {
  const double scaled = std::round(std::clamp(component, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(scaled);
}

void write_png(const std::filesystem::path& path, const NormalizedImage& image) {
  if (image.empty()) throw std::invalid_argument("write_png: empty image");
  std::vector<std::uint8_t> pixels;
  pixels.reserve(image.size() * 3);
  for (const Rgb& p : image) {
    pixels.push_back(to_byte(p.r));
    pixels.push_back(to_byte(p.g));
    pixels.push_back(to_byte(p.b));
  }
  write_png_bytes(path, PNG_FORMAT_RGB, image.height(), image.width(), pixels);
}

void write_mask_png(const std::filesystem::path& path, const PurityMask& mask) {
  if (mask.empty()) throw std::invalid_argument("write_mask_png: empty mask");
  std::vector<std::uint8_t> pixels(mask.size());
  std::transform(mask.begin(), mask.end(), pixels.begin(),
                 [](std::uint8_t v) { return v ? std::uint8_t{255} : std::uint8_t{0}; });
  write_png_bytes(path, PNG_FORMAT_GRAY, mask.height(), mask.width(), pixels);
}

PurityMask read_mask_png(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (!has_png_signature(bytes)) throw IoError(path.string(), "not a PNG file");
  std::size_t height = 0, width = 0;
  const auto gray = decode_png(path, bytes, PNG_FORMAT_GRAY, height, width);
  PurityMask mask(height, width);
  for (std::size_t p = 0; p < gray.size(); ++p) {
    if (gray[p] != 0 && gray[p] != 255) {
      throw IoError(path.string(), "mask byte " + std::to_string(gray[p]) + " is neither 0 nor 255");
    }
    mask[p] = gray[p] ? 1 : 0;
  }
  return mask;
}

NormalizedImage render_overlay(const NormalizedImage& image, const PurityMask& mask,
                               const Rgb& pure_tint) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    throw std::invalid_argument("render_overlay: dimension mismatch");
  }
  NormalizedImage out = image;
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (mask[p] != 0) continue;
    const Rgb& src = image[p];
    out[p] = {0.5 * src.r + 0.5 * pure_tint.r, 0.5 * src.g + 0.5 * pure_tint.g,
              0.5 * src.b + 0.5 * pure_tint.b};
  }
  return out;
}

NormalizedImage side_by_side(const NormalizedImage& left, const NormalizedImage& right) {
  NormalizedImage out(std::max(left.height(), right.height()), left.width() + right.width());
  for (std::size_t i = 0; i < left.height(); ++i) {
    for (std::size_t j = 0; j < left.width(); ++j) out(i, j) = left(i, j);
  }
  for (std::size_t i = 0; i < right.height(); ++i) {
    for (std::size_t j = 0; j < right.width(); ++j) out(i, left.width() + j) = right(i, j);
  }
  return out;
}

}  // namespace puremask
