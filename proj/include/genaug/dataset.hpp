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

#include "genaug/error.hpp"
#include "genaug/manifest.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace genaug::dataset {

/// The source directory holds no decodable image.
class NoImagesError : public Error {
  public:
    explicit NoImagesError(const std::string &message) :
        Error{ message, "no_images" } {}
};

/// Not enough entries to satisfy a requested count.
class InsufficientEntries : public Error {
  public:
    explicit InsufficientEntries(const std::string &message) :
        Error{ message, "insufficient_entries" } {}
};

struct SkippedFile {
    std::filesystem::path path;
    std::string reason;
};

struct IngestResult {
    Manifest manifest;
    std::vector<SkippedFile> skipped;
};

/// Decodes every regular file in `source_dir` (sorted by name), resizes it to
/// the target size, and writes a canonical PNG into `out_dir`. Undecodable
/// files are listed in `skipped`. Throws NoImagesError if nothing decoded.
[[nodiscard]] IngestResult ingest(const std::filesystem::path &source_dir, ClassLabel label, int height, int width, const std::filesystem::path &out_dir);

/// The four-way augmentation set, in output order.
[[nodiscard]] const std::vector<std::pair<std::string, Transform>> &augmentation_set();

/// Every entry becomes four: original, horizontal flip, vertical flip, 90°
/// rotation. Ids are `<source id>+<suffix>`; no deduplication happens.
[[nodiscard]] Manifest augment(const Manifest &manifest);

/// Exactly `n` entries drawn uniformly without replacement, in a seeded order.
[[nodiscard]] Manifest subsample(const Manifest &manifest, std::size_t n, std::uint64_t seed);

enum class Composition { real, generated, mixed };

[[nodiscard]] std::string_view to_string(Composition composition);
[[nodiscard]] Composition parse_composition(std::string_view text);

/// Draws `total` entries: all real, all generated, or ceil(total/2) real plus
/// floor(total/2) generated; the result is shuffled by `seed`. The output is
/// rooted at `real`'s root.
[[nodiscard]] Manifest compose(const Manifest &real, const Manifest &generated, Composition mode, std::size_t total, std::uint64_t seed);

/// Marks a seeded selection of `n_test` entries as test and the rest as train.
[[nodiscard]] Manifest assign_holdout(const Manifest &manifest, std::size_t n_test, std::uint64_t seed);

}  // namespace genaug::dataset
