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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace genaug {

enum class ClassLabel { bag, bottle, fish, background };
enum class Provenance { real, generated };
enum class Split { train, val, test };

[[nodiscard]] std::string_view to_string(ClassLabel label);
[[nodiscard]] std::string_view to_string(Provenance provenance);
[[nodiscard]] std::string_view to_string(Split split);

[[nodiscard]] ClassLabel parse_class_label(std::string_view text);
[[nodiscard]] Provenance parse_provenance(std::string_view text);
[[nodiscard]] Split parse_split(std::string_view text);

struct ManifestEntry {
    std::string image_id;
    /// Relative to the manifest's root directory.
    std::filesystem::path path;
    ClassLabel class_label{ ClassLabel::bag };
    Provenance provenance{ Provenance::real };
    Split split{ Split::train };
    /// Applied to the stored pixels whenever the entry is loaded.
    Transform transform{};

    friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

/// Ordered image records plus the canonical resolution they load at.
///
/// Files are line-delimited, tab-separated records in the fixed field order
/// `id  path  class  provenance  split  transform`, preceded by one header line
/// carrying the format version, canonical size and resize method.
class Manifest {
  public:
    static constexpr std::string_view resize_method = "bilinear";

    Manifest() = default;
    Manifest(std::filesystem::path root, int image_height, int image_width);

    [[nodiscard]] const std::filesystem::path &root() const noexcept { return root_; }
    [[nodiscard]] int image_height() const noexcept { return image_height_; }
    [[nodiscard]] int image_width() const noexcept { return image_width_; }

    [[nodiscard]] const std::vector<ManifestEntry> &entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const ManifestEntry &operator[](std::size_t i) const { return entries_[i]; }

    /// Throws InvalidArgument on a duplicate id or an id containing tab/newline.
    void add(ManifestEntry entry);

    [[nodiscard]] bool contains(std::string_view image_id) const;
    [[nodiscard]] std::optional<std::size_t> find(std::string_view image_id) const;

    /// Entries satisfying `pred`, same root and size.
    template <typename Pred>
    [[nodiscard]] Manifest filter(Pred pred) const {
        Manifest out{ root_, image_height_, image_width_ };
        for (const auto &e : entries_) {
            if (pred(e)) {
                out.add(e);
            }
        }
        return out;
    }

    /// A manifest with the same root/size and no entries.
    [[nodiscard]] Manifest empty_like() const { return Manifest{ root_, image_height_, image_width_ }; }

    /// Loads entry `i`: decode, resize to the canonical size, apply the transform.
    [[nodiscard]] Image load(std::size_t i) const;
    [[nodiscard]] Image load(const ManifestEntry &entry) const;

    /// Checks id uniqueness, that every path decodes, and the split partition.
    void validate() const;

    /// Writes the manifest; entry paths are stored relative to the file's directory.
    void write(const std::filesystem::path &file) const;
    /// Reads a manifest; its root becomes the file's directory.
    [[nodiscard]] static Manifest read(const std::filesystem::path &file);

    /// Re-roots every entry so that paths stay valid relative to `new_root`.
    [[nodiscard]] Manifest rebased(const std::filesystem::path &new_root) const;

    friend bool operator==(const Manifest &a, const Manifest &b) {
        return a.image_height_ == b.image_height_ && a.image_width_ == b.image_width_ && a.entries_ == b.entries_;
    }

  private:
    std::filesystem::path root_;
    int image_height_{ 0 };
    int image_width_{ 0 };
    std::vector<ManifestEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Concatenates manifests that share a canonical size; paths are rebased onto `root`.
[[nodiscard]] Manifest concat(const std::vector<Manifest> &parts, const std::filesystem::path &root);

}  // namespace genaug
