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

#include "genaug/synthetic.hpp"

#include "genaug/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <regex>

namespace genaug::synthetic {

const std::vector<Color> &color_modes(const ClassLabel label) {
    static const std::vector<Color> trash{ { 0.95F, 0.15F, 0.10F }, { 0.15F, 0.25F, 0.95F } };
    static const std::vector<Color> fish{ { 0.15F, 0.85F, 0.20F }, { 0.10F, 0.80F, 0.80F } };
    static const std::vector<Color> background{ { 0.10F, 0.14F, 0.20F } };
    switch (label) {
        case ClassLabel::bag:
        case ClassLabel::bottle:
            return trash;
        case ClassLabel::fish:
            return fish;
        case ClassLabel::background:
            break;
    }
    return background;
}

Image backdrop_image(const int size, Rng &rng) {
    Image img{ size, size };
    const auto tint = static_cast<float>(rng.uniform(-0.04, 0.04));
    const auto slope = static_cast<float>(rng.uniform(-0.06, 0.06));
    for (int r = 0; r < size; ++r) {
        const float gradient = slope * (static_cast<float>(r) / static_cast<float>(size) - 0.5F);
        for (int c = 0; c < size; ++c) {
            const auto grain = static_cast<float>(rng.uniform(-0.02, 0.02));
            img.set(r, c, 0, 0.08F + tint + gradient + grain);
            img.set(r, c, 1, 0.13F + tint + gradient + grain);
            img.set(r, c, 2, 0.20F + tint + gradient + grain);
        }
    }
    return img;
}

Image blob_image(const int size, const Color &color, Rng &rng) {
    Image img = backdrop_image(size, rng);
    const double s = size;
    const double cy = rng.uniform(0.35, 0.65) * s;
    const double cx = rng.uniform(0.35, 0.65) * s;
    const double ry = rng.uniform(0.15, 0.28) * s;
    const double rx = rng.uniform(0.15, 0.28) * s;
    const double shade = rng.uniform(0.8, 1.0);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double dy = (r + 0.5 - cy) / ry;
            const double dx = (c + 0.5 - cx) / rx;
            // soft one-pixel edge
            const double dist = (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(rx, ry);
            const double alpha = std::clamp(0.5 - dist, 0.0, 1.0);
            if (alpha <= 0.0) {
                continue;
            }
            for (int ch = 0; ch < 3; ++ch) {
                const double fg = color[static_cast<std::size_t>(ch)] * shade;
                img.set(r, c, ch, static_cast<float>(alpha * fg + (1.0 - alpha) * img.at(r, c, ch)));
            }
        }
    }
    return img;
}

Image brightness_image(const int size, const bool bright, Rng &rng) {
    Image img{ size, size };
    const double base = bright ? rng.uniform(0.7, 0.9) : rng.uniform(0.1, 0.3);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                img.set(r, c, ch, static_cast<float>(base + rng.uniform(-0.1, 0.1)));
            }
        }
    }
    return img;
}

std::map<ClassLabel, std::filesystem::path> write_toy_corpus(const std::filesystem::path &out, const ToyCorpusSpec &spec) {
    if (spec.size < 4 || spec.per_class == 0) {
        throw InvalidArgument{ "toy corpus needs size >= 4 and at least one image per class" };
    }
    std::map<ClassLabel, std::filesystem::path> dirs;
    for (const auto label : spec.classes) {
        const auto dir = out / std::string{ to_string(label) };
        std::filesystem::create_directories(dir);
        const auto &modes = color_modes(label);
        Rng rng{ spec.seed, static_cast<std::uint64_t>(label) + 1 };
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            const std::size_t mode = i % modes.size();
            const Image img = label == ClassLabel::background ? backdrop_image(spec.size, rng) : blob_image(spec.size, modes[mode], rng);
            write_png(img, dir / fmt::format("{}-m{}-{:04d}.png", to_string(label), mode, i));
        }
        dirs[label] = dir;
    }
    return dirs;
}

int mode_of(const std::string &image_id) {
    static const std::regex pattern{ R"(-m(\d+)-\d+)" };
    std::smatch match;
    if (std::regex_search(image_id, match, pattern)) {
        return std::stoi(match[1].str());
    }
    return -1;
}

}  // namespace genaug::synthetic
