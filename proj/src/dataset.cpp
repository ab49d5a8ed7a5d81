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

#include "genaug/dataset.hpp"

#include "genaug/rng.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace genaug::dataset {

namespace fs = std::filesystem;

IngestResult ingest(const fs::path &source_dir, const ClassLabel label, const int height, const int width, const fs::path &out_dir) {
    if (!fs::is_directory(source_dir)) {
        throw NoImagesError{ "no images: " + source_dir.string() + " is not a directory" };
    }
    std::vector<fs::path> files;
    for (const auto &item : fs::directory_iterator{ source_dir }) {
        if (item.is_regular_file()) {
            files.push_back(item.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw NoImagesError{ "no images in " + source_dir.string() };
    }

    fs::create_directories(out_dir);
    IngestResult result{ Manifest{ fs::absolute(out_dir).lexically_normal(), height, width }, {} };
    std::set<std::string> used_stems;
    for (const auto &file : files) {
        Image img;
        try {
            img = read_image(file);
        } catch (const IoError &err) {
            result.skipped.push_back({ file, err.what() });
            continue;
        }
        std::string stem = file.stem().string();
        if (!used_stems.insert(stem).second) {
            stem += "-" + file.extension().string().substr(std::min<std::size_t>(1, file.extension().string().size()));
        }
        used_stems.insert(stem);
        std::string id = std::string{ to_string(label) } + "-" + stem;
        std::replace_if(id.begin(), id.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r' || c == '/'; }, '_');

        const fs::path name = id + ".png";
        write_png(resize_bilinear(img, height, width), out_dir / name);
        result.manifest.add(ManifestEntry{ id, name, label, Provenance::real, Split::train, Transform::identity() });
    }
    if (result.manifest.empty()) {
        std::string msg = "no images: none of the " + std::to_string(files.size()) + " files in " + source_dir.string() + " could be decoded";
        throw NoImagesError{ msg };
    }
    return result;
}

const std::vector<std::pair<std::string, Transform>> &augmentation_set() {
    static const std::vector<std::pair<std::string, Transform>> set{
        { "orig", Transform::identity() },
        { "hflip", Transform::hflip() },
        { "vflip", Transform::vflip() },
        { "rot90", Transform::rot90() },
    };
    return set;
}

Manifest augment(const Manifest &manifest) {
    if (manifest.empty()) {
        throw InvalidArgument{ "augment needs a non-empty manifest" };
    }
    if (manifest.image_height() != manifest.image_width()) {
        throw ShapeError{ "image '" + manifest[0].image_id + "' is " + std::to_string(manifest.image_height()) + "x" + std::to_string(manifest.image_width()) + "; 90-degree rotation needs square images" };
    }
    Manifest out = manifest.empty_like();
    for (const auto &entry : manifest.entries()) {
        for (const auto &[suffix, transform] : augmentation_set()) {
            ManifestEntry derived = entry;
            derived.image_id = entry.image_id + "+" + suffix;
            derived.transform = transform * entry.transform;
            out.add(std::move(derived));
        }
    }
    return out;
}

Manifest subsample(const Manifest &manifest, const std::size_t n, const std::uint64_t seed) {
    if (n > manifest.size()) {
        throw InsufficientEntries{ "cannot subsample " + std::to_string(n) + " entries from a manifest of " + std::to_string(manifest.size()) };
    }
    Rng rng{ seed };
    const auto order = rng.permutation(manifest.size());
    Manifest out = manifest.empty_like();
    for (std::size_t i = 0; i < n; ++i) {
        out.add(manifest[order[i]]);
    }
    return out;
}

std::string_view to_string(const Composition composition) {
    static constexpr std::array<std::string_view, 3> names{ "real", "generated", "mixed" };
    return names[static_cast<std::size_t>(composition)];
}

Composition parse_composition(const std::string_view text) {
    for (const auto c : { Composition::real, Composition::generated, Composition::mixed }) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw InvalidArgument{ "unknown composition '" + std::string{ text } + "'" };
}

Manifest compose(const Manifest &real, const Manifest &generated, const Composition mode, const std::size_t total, const std::uint64_t seed) {
    std::size_t n_real = 0;
    switch (mode) {
        case Composition::real:
            n_real = total;
            break;
        case Composition::generated:
            n_real = 0;
            break;
        case Composition::mixed:
            n_real = (total + 1) / 2;
            break;
    }
    const std::size_t n_generated = total - n_real;
    if (n_real > real.size()) {
        throw InsufficientEntries{ "real side has " + std::to_string(real.size()) + " entries, " + std::to_string(n_real) + " requested" };
    }
    if (n_generated > generated.size()) {
        throw InsufficientEntries{ "generated side has " + std::to_string(generated.size()) + " entries, " + std::to_string(n_generated) + " requested" };
    }
    if (n_real > 0 && n_generated > 0 && (real.image_height() != generated.image_height() || real.image_width() != generated.image_width())) {
        throw ShapeError{ "real and generated manifests have different image sizes" };
    }

    const Manifest &base = n_real > 0 || generated.root().empty() ? real : generated;
    std::vector<ManifestEntry> picked;
    picked.reserve(total);
    if (n_real > 0) {
        const auto part = subsample(real, n_real, Rng{ seed, 1 }.next());
        picked.insert(picked.end(), part.entries().begin(), part.entries().end());
    }
    if (n_generated > 0) {
        const auto part = subsample(generated, n_generated, Rng{ seed, 2 }.next()).rebased(base.root());
        picked.insert(picked.end(), part.entries().begin(), part.entries().end());
    }
    Rng{ seed, 3 }.shuffle(picked);

    Manifest out = base.empty_like();
    for (auto &e : picked) {
        out.add(std::move(e));
    }
    return out;
}

Manifest assign_holdout(const Manifest &manifest, const std::size_t n_test, const std::uint64_t seed) {
    if (n_test > manifest.size()) {
        throw InsufficientEntries{ "cannot hold out " + std::to_string(n_test) + " of " + std::to_string(manifest.size()) + " entries" };
    }
    Rng rng{ seed };
    const auto order = rng.permutation(manifest.size());
    std::vector<bool> is_test(manifest.size(), false);
    for (std::size_t i = 0; i < n_test; ++i) {
        is_test[order[i]] = true;
    }
    Manifest out = manifest.empty_like();
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        ManifestEntry e = manifest[i];
        e.split = is_test[i] ? Split::test : Split::train;
        out.add(std::move(e));
    }
    return out;
}

}  // namespace genaug::dataset
