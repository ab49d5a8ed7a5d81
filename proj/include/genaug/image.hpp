// Copyright 2026 The genaug Authors
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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genaug {

/// H×W×3 image with channel values in [0, 1], stored row-major as HWC (RGB).
class Image {
  public:
    static constexpr int channels = 3;

    Image() = default;

    /// Zero-filled image.
    Image(int height, int width);

    /// Takes ownership of HWC values; throws if the size or value range is wrong.
    Image(int height, int width, std::vector<float> values);

    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] bool square() const noexcept { return height_ == width_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] float at(int row, int col, int channel) const {
        return values_[index(row, col, channel)];
    }

    /// Writes are clamped into [0, 1] so the range invariant cannot be broken.
    void set(int row, int col, int channel, float value);

    [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

    friend bool operator==(const Image &, const Image &) = default;

  private:
    [[nodiscard]] std::size_t index(int row, int col, int channel) const noexcept {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col)) * channels + static_cast<std::size_t>(channel);
    }

    int height_{ 0 };
    int width_{ 0 };
    std::vector<float> values_;
};

/// Element of the dihedral group of the square: optional horizontal mirror
/// followed by `quarter_turns` counter-clockwise 90° rotations.
struct Transform {
    int quarter_turns{ 0 };
    bool mirrored{ false };

    static Transform identity() { return {}; }
    static Transform hflip() { return { 0, true }; }
    static Transform vflip() { return { 2, true }; }
    static Transform rot90() { return { 1, false }; }

    [[nodiscard]] bool rotates_axes() const noexcept { return quarter_turns % 2 != 0; }

    /// Composition: `(a * b)(img) == a(b(img))`.
    friend Transform operator*(const Transform &a, const Transform &b);
    friend bool operator==(const Transform &, const Transform &) = default;

    /// Stable tag used in manifests: id, hflip, vflip, rot90, rot180, rot270, ...
    [[nodiscard]] std::string tag() const;
    static Transform parse(std::string_view tag);
};

/// Applies `t`. Transforms that swap axes require a square image.
[[nodiscard]] Image apply(const Transform &t, const Image &img);

/// Bilinear resampling to the requested size.
[[nodiscard]] Image resize_bilinear(const Image &img, int height, int width);

/// Decodes any raster format OpenCV understands; throws IoError on failure.
[[nodiscard]] Image read_image(const std::filesystem::path &path);

/// Lossless 8-bit PNG.
void write_png(const Image &img, const std::filesystem::path &path);
[[nodiscard]] std::vector<std::uint8_t> encode_png(const Image &img);
/// Decodes an encoded raster (PNG, JPEG, ...) held in memory.
[[nodiscard]] Image decode_image(std::span<const std::uint8_t> bytes);

/// Values are quantized to 8 bits, the precision of every stored image.
[[nodiscard]] Image quantize8(const Image &img);

}  // namespace genaug
