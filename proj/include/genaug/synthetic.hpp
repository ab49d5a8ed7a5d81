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

#include "genaug/image.hpp"
#include "genaug/manifest.hpp"
#include "genaug/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace genaug::synthetic {

using Color = std::array<float, 3>;

/// Colour modes per class of the toy corpus. Trash and fish blobs share one
/// shape family, so colour is the only cue; background has no blob.
[[nodiscard]] const std::vector<Color> &color_modes(ClassLabel label);

/// A filled ellipse of `color` over a dark textured backdrop.
[[nodiscard]] Image blob_image(int size, const Color &color, Rng &rng);
/// Backdrop only.
[[nodiscard]] Image backdrop_image(int size, Rng &rng);

/// Uniformly bright (label good) or dark images with mild noise.
[[nodiscard]] Image brightness_image(int size, bool bright, Rng &rng);

struct ToyCorpusSpec {
    int size{ 32 };
    std::size_t per_class{ 200 };
    std::uint64_t seed{ 0 };
    /// Classes written; the first trash class only unless more are listed.
    std::vector<ClassLabel> classes{ ClassLabel::bag, ClassLabel::fish, ClassLabel::background };
};

/// Writes `<out>/<class>/<class>-m<mode>-<index>.png`, cycling through the
/// colour modes of each class. Returns the source directory per class.
std::map<ClassLabel, std::filesystem::path> write_toy_corpus(const std::filesystem::path &out, const ToyCorpusSpec &spec);

/// Colour mode encoded in a toy image id, or -1.
[[nodiscard]] int mode_of(const std::string &image_id);

}  // namespace genaug::synthetic
