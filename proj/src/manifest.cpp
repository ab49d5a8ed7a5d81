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

#include "genaug/manifest.hpp"

#include "genaug/error.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

namespace genaug {

namespace {

constexpr std::array<std::string_view, 4> class_names{ "bag", "bottle", "fish", "background" };
constexpr std::array<std::string_view, 2> provenance_names{ "real", "generated" };
constexpr std::array<std::string_view, 3> split_names{ "train", "val", "test" };

constexpr std::string_view header_tag = "#genaug-manifest";
constexpr std::string_view format_version = "v1";

template <typename Enum, std::size_t N>
Enum parse_enum(const std::array<std::string_view, N> &names, const std::string_view text, const std::string_view what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) {
            return static_cast<Enum>(i);
        }
    }
    throw InvalidArgument{ "unknown " + std::string{ what } + " '" + std::string{ text } + "'" };
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in{ line };
    while (std::getline(in, field, '\t')) {
        fields.push_back(field);
    }
    return fields;
}

std::filesystem::path absolute_normal(const std::filesystem::path &p) {
    return std::filesystem::absolute(p).lexically_normal();
}

}  // namespace

std::string_view to_string(const ClassLabel label) { return class_names[static_cast<std::size_t>(label)]; }
std::string_view to_string(const Provenance provenance) { return provenance_names[static_cast<std::size_t>(provenance)]; }
std::string_view to_string(const Split split) { return split_names[static_cast<std::size_t>(split)]; }

ClassLabel parse_class_label(const std::string_view text) { return parse_enum<ClassLabel>(class_names, text, "class label"); }
Provenance parse_provenance(const std::string_view text) { return parse_enum<Provenance>(provenance_names, text, "provenance"); }
Split parse_split(const std::string_view text) { return parse_enum<Split>(split_names, text, "split"); }

Manifest::Manifest(std::filesystem::path root, const int image_height, const int image_width) :
    root_{ std::move(root) },
    image_height_{ image_height },
    image_width_{ image_width } {
    if (image_height <= 0 || image_width <= 0) {
        throw InvalidArgument{ "manifest image size must be positive" };
    }
}

void Manifest::add(ManifestEntry entry) {
    if (entry.image_id.empty() || entry.image_id.find_first_of("\t\r\n") != std::string::npos) {
        throw InvalidArgument{ "invalid image id '" + entry.image_id + "'" };
    }
    if (entry.path.string().find_first_of("\t\r\n") != std::string::npos) {
        throw InvalidArgument{ "invalid path for image id '" + entry.image_id + "'" };
    }
    if (index_.contains(entry.image_id)) {
        throw InvalidArgument{ "duplicate image id '" + entry.image_id + "'" };
    }
    index_.emplace(entry.image_id, entries_.size());
    entries_.push_back(std::move(entry));
}

bool Manifest::contains(const std::string_view image_id) const {
    return index_.contains(std::string{ image_id });
}

std::optional<std::size_t> Manifest::find(const std::string_view image_id) const {
    const auto it = index_.find(std::string{ image_id });
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Image Manifest::load(const std::size_t i) const { return load(entries_.at(i)); }

Image Manifest::load(const ManifestEntry &entry) const {
    Image img = read_image(root_ / entry.path);
    img = resize_bilinear(img, image_height_, image_width_);
    if (entry.transform.rotates_axes() && !img.square()) {
        throw ShapeError{ "image '" + entry.image_id + "' is not square but its transform " + entry.transform.tag() + " rotates it" };
    }
    return apply(entry.transform, img);
}

void Manifest::validate() const {
    std::unordered_map<std::string, Split> seen;
    for (const auto &e : entries_) {
        const auto [it, inserted] = seen.emplace(e.image_id, e.split);
        if (!inserted) {
            throw InvalidArgument{ "image id '" + e.image_id + "' appears more than once (splits " + std::string{ to_string(it->second) } + ", " + std::string{ to_string(e.split) } + ")" };
        }
        (void) load(e);
    }
}

void Manifest::write(const std::filesystem::path &file) const {
    const auto dir = absolute_normal(file).parent_path();
    std::filesystem::create_directories(dir);
    std::ofstream out{ file, std::ios::binary | std::ios::trunc };
    if (!out) {
        throw IoError{ "cannot open " + file.string() + " for writing" };
    }
    out << header_tag << '\t' << format_version << '\t' << image_height_ << 'x' << image_width_ << '\t' << resize_method << '\n';
    for (const auto &e : entries_) {
        const auto rel = absolute_normal(root_ / e.path).lexically_relative(dir);
        out << e.image_id << '\t' << rel.generic_string() << '\t' << to_string(e.class_label) << '\t'
            << to_string(e.provenance) << '\t' << to_string(e.split) << '\t' << e.transform.tag() << '\n';
    }
    if (!out) {
        throw IoError{ "failed writing " + file.string() };
    }
}

Manifest Manifest::read(const std::filesystem::path &file) {
    std::ifstream in{ file, std::ios::binary };
    if (!in) {
        throw IoError{ "cannot open manifest " + file.string() };
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError{ "manifest " + file.string() + " is empty" };
    }
    const auto header = split_fields(line);
    if (header.size() != 4 || header[0] != header_tag || header[1] != format_version) {
        throw IoError{ "manifest " + file.string() + " has an unrecognized header" };
    }
    int height = 0;
    int width = 0;
    char sep = 0;
    std::istringstream size_in{ header[2] };
    if (!(size_in >> height >> sep >> width) || sep != 'x') {
        throw IoError{ "manifest " + file.string() + " has a malformed size field" };
    }
    if (header[3] != resize_method) {
        throw IoError{ "manifest " + file.string() + " uses unsupported resize method " + header[3] };
    }

    Manifest manifest{ absolute_normal(file).parent_path(), height, width };
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw IoError{ file.string() + ":" + std::to_string(line_no) + ": expected 6 fields, got " + std::to_string(fields.size()) };
        }
        manifest.add(ManifestEntry{ fields[0], std::filesystem::path{ fields[1] }, parse_class_label(fields[2]),
                                    parse_provenance(fields[3]), parse_split(fields[4]), Transform::parse(fields[5]) });
    }
    return manifest;
}

Manifest Manifest::rebased(const std::filesystem::path &new_root) const {
    const auto target = absolute_normal(new_root);
    Manifest out{ target, image_height_, image_width_ };
    for (auto e : entries_) {
        e.path = absolute_normal(root_ / e.path).lexically_relative(target);
        out.add(std::move(e));
    }
    return out;
}

Manifest concat(const std::vector<Manifest> &parts, const std::filesystem::path &root) {
    if (parts.empty()) {
        throw InvalidArgument{ "concat needs at least one manifest" };
    }
    Manifest out{ absolute_normal(root), parts.front().image_height(), parts.front().image_width() };
    for (const auto &part : parts) {
        if (part.image_height() != out.image_height() || part.image_width() != out.image_width()) {
            throw ShapeError{ "cannot concatenate manifests with different image sizes" };
        }
        const Manifest moved = part.rebased(root);
        for (const auto &e : moved.entries()) {
            out.add(e);
        }
    }
    return out;
}

}  // namespace genaug
