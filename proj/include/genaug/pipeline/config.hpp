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

#include "genaug/dataset.hpp"
#include "genaug/eval_harness.hpp"
#include "genaug/manifest.hpp"
#include "genaug/quality_filter.hpp"
#include "genaug/vae.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace genaug::pipeline {

struct VaePair {
    vae::VaeStageConfig stage1;
    vae::VaeStageConfig stage2;
};

struct LabelingConfig {
    /// "interactive": serve until every pool image is labeled.
    /// "scripted": label through the HTTP API with a nearest-real MAE rule.
    std::string mode{ "interactive" };
    std::string host{ "0.0.0.0" };
    int port{ 8080 };
    /// Pool images offered for labeling (0 = the whole pool).
    std::size_t max_images{ 0 };
    std::string annotator{ "script" };
};

/// Everything a run needs. Read from a JSON file; relative paths resolve
/// against the file's directory.
struct PipelineConfig {
    std::filesystem::path workspace_dir;
    std::uint64_t seed{ 0 };
    /// Canonical ingest resolution (square).
    int image_size{ 128 };
    /// Source directory per class; trash classes are the bag/bottle keys.
    std::map<ClassLabel, std::filesystem::path> sources;
    /// Source images per class held out as the real test set before augmentation.
    std::size_t test_per_class{ 300 };
    /// Augmented training images kept per class (0 keeps all four variants).
    std::size_t augment_target{ 0 };
    std::map<ClassLabel, VaePair> vae;
    /// Generated images per trash class.
    std::size_t generate_count{ 10000 };
    /// Images per side used for FID (0 = all available).
    std::size_t fid_samples{ 0 };
    std::string feature_extractor{ "flatten-downsample" };
    LabelingConfig labeling{};
    quality::FilterConfig filter{};
    std::vector<dataset::Composition> compositions{ dataset::Composition::real, dataset::Composition::generated, dataset::Composition::mixed };
    /// trash_class and composition are filled in per experiment.
    eval::ExperimentSpec experiment{};

    [[nodiscard]] std::vector<ClassLabel> trash_classes() const;
    [[nodiscard]] const VaePair &vae_for(ClassLabel label) const;

    /// Sets the run seed; every component seed follows it.
    void set_seed(std::uint64_t value);

    void validate() const;
    /// Full config; paths are written as given (absolute after loading).
    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static PipelineConfig from_json(const nlohmann::json &j, const std::filesystem::path &base_dir);
    [[nodiscard]] static PipelineConfig load(const std::filesystem::path &file);

    /// Hash over every field that influences outputs (not the workspace
    /// location nor the service host/port).
    [[nodiscard]] std::string hash() const;
};

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace genaug::pipeline
