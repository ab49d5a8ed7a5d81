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

#include "genaug/image.hpp"

#include "genaug/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace genaug {

Image::Image(const int height, const int width) :
    height_{ height },
    width_{ width } {
    if (height < 0 || width < 0) {
        throw InvalidArgument{ "image dimensions must be non-negative" };
    }
    values_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * channels, 0.0f);
}

Image::Image(const int height, const int width, std::vector<float> values) :
    height_{ height },
    width_{ width },
    values_{ std::move(values) } {
    if (height < 0 || width < 0) {
        throw InvalidArgument{ "image dimensions must be non-negative" };
    }
    const auto expected = static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * channels;
    if (values_.size() != expected) {
        throw ShapeError{ "image buffer holds " + std::to_string(values_.size()) + " values, expected " + std::to_string(expected) };
    }
    for (const float v : values_) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw InvalidArgument{ "image value " + std::to_string(v) + " outside [0, 1]" };
        }
    }
}

void Image::set(const int row, const int col, const int channel, const float value) {
    values_[index(row, col, channel)] = std::isnan(value) ? 0.0f : std::clamp(value, 0.0f, 1.0f);
}

// ---- transforms ----

Transform operator*(const Transform &a, const Transform &b) {
    // F R^k = R^-k F
    const int turns = a.quarter_turns + (a.mirrored ? -b.quarter_turns : b.quarter_turns);
    return Transform{ ((turns % 4) + 4) % 4, a.mirrored != b.mirrored };
}

namespace {

constexpr std::array<std::string_view, 4> plain_tags{ "id", "rot90", "rot180", "rot270" };
constexpr std::array<std::string_view, 4> mirrored_tags{ "hflip", "transpose", "vflip", "antitranspose" };

Image mirror_columns(const Image &img) {
    Image out{ img.height(), img.width() };
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            for (int ch = 0; ch < Image::channels; ++ch) {
                out.set(r, c, ch, img.at(r, img.width() - 1 - c, ch));
            }
        }
    }
    return out;
}

// counter-clockwise quarter turn: out(r, c) = in(c, W - 1 - r)
Image rotate_ccw(const Image &img) {
    Image out{ img.width(), img.height() };
    for (int r = 0; r < out.height(); ++r) {
        for (int c = 0; c < out.width(); ++c) {
            for (int ch = 0; ch < Image::channels; ++ch) {
                out.set(r, c, ch, img.at(c, img.width() - 1 - r, ch));
            }
        }
    }
    return out;
}

cv::Mat to_mat(const Image &img) {
    cv::Mat mat(img.height(), img.width(), CV_32FC3);
    std::copy(img.values().begin(), img.values().end(), mat.ptr<float>());
    return mat;
}

Image from_mat(const cv::Mat &mat) {
    cv::Mat floats;
    mat.convertTo(floats, CV_32FC3);
    if (!floats.isContinuous()) {
        floats = floats.clone();
    }
    const auto *begin = floats.ptr<float>();
    std::vector<float> values(begin, begin + floats.total() * 3);
    for (float &v : values) {
        v = std::clamp(v, 0.0f, 1.0f);
    }
    return Image{ floats.rows, floats.cols, std::move(values) };
}

cv::Mat to_bgr8(const Image &img) {
    cv::Mat rgb;
    to_mat(img).convertTo(rgb, CV_8UC3, 255.0);
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

// 8-bit RGB to [0, 1] with the arithmetic of quantize8
Image from_rgb8(const cv::Mat &rgb) {
    cv::Mat scaled;
    rgb.convertTo(scaled, CV_32FC3);
    for (auto it = scaled.begin<cv::Vec3f>(); it != scaled.end<cv::Vec3f>(); ++it) {
        for (int c = 0; c < 3; ++c) {
            (*it)[c] /= 255.0f;
        }
    }
    return from_mat(scaled);
}

}  // namespace

std::string Transform::tag() const {
    const auto turns = static_cast<std::size_t>(((quarter_turns % 4) + 4) % 4);
    return std::string{ mirrored ? mirrored_tags[turns] : plain_tags[turns] };
}

Transform Transform::parse(const std::string_view tag) {
    for (int k = 0; k < 4; ++k) {
        if (plain_tags[static_cast<std::size_t>(k)] == tag) {
            return Transform{ k, false };
        }
        if (mirrored_tags[static_cast<std::size_t>(k)] == tag) {
            return Transform{ k, true };
        }
    }
    throw InvalidArgument{ "unknown transform tag '" + std::string{ tag } + "'" };
}

Image apply(const Transform &t, const Image &img) {
    if (t.rotates_axes() && !img.square()) {
        throw ShapeError{ "transform " + t.tag() + " needs a square image, got " + std::to_string(img.height()) + "x" + std::to_string(img.width()) };
    }
    Image out = t.mirrored ? mirror_columns(img) : img;
    for (int k = 0; k < ((t.quarter_turns % 4) + 4) % 4; ++k) {
        out = rotate_ccw(out);
    }
    return out;
}

Image resize_bilinear(const Image &img, const int height, const int width) {
    if (height <= 0 || width <= 0) {
        throw InvalidArgument{ "resize target must be positive" };
    }
    if (img.height() == height && img.width() == width) {
        return img;
    }
    cv::Mat out;
    cv::resize(to_mat(img), out, cv::Size{ width, height }, 0.0, 0.0, cv::INTER_LINEAR);
    return from_mat(out);
}

Image read_image(const std::filesystem::path &path) {
    cv::Mat raw = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (raw.empty()) {
        throw IoError{ "cannot decode image " + path.string() };
    }
    cv::Mat rgb;
    cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
    return from_rgb8(rgb);
}

Image decode_image(const std::span<const std::uint8_t> bytes) {
    const cv::Mat buffer{ 1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t *>(bytes.data()) };
    cv::Mat raw = cv::imdecode(buffer, cv::IMREAD_COLOR);
    if (raw.empty()) {
        throw IoError{ "cannot decode in-memory image" };
    }
    cv::Mat rgb;
    cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB);
    return from_rgb8(rgb);
}

void write_png(const Image &img, const std::filesystem::path &path) {
    if (!cv::imwrite(path.string(), to_bgr8(img))) {
        throw IoError{ "cannot write " + path.string() };
    }
}

std::vector<std::uint8_t> encode_png(const Image &img) {
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_bgr8(img), bytes)) {
        throw IoError{ "PNG encoding failed" };
    }
    return bytes;
}

Image quantize8(const Image &img) {
    std::vector<float> values(img.values().begin(), img.values().end());
    for (float &v : values) {
        v = std::round(v * 255.0f) / 255.0f;
    }
    return Image{ img.height(), img.width(), std::move(values) };
}

}  // namespace genaug
