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

#include "genaug/manifest.hpp"
#include "genaug/pipeline/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace genaug::pipeline {

struct ReportInputs {
    PipelineConfig config;
    std::vector<ClassLabel> trash_classes;
    /// {stage1, stage2, reconstruction} FID reports per class.
    std::map<ClassLabel, nlohmann::ordered_json> fid;
    std::map<ClassLabel, nlohmann::ordered_json> filter_stats;
    std::map<ClassLabel, nlohmann::ordered_json> filter_counts;
    std::map<ClassLabel, nlohmann::ordered_json> comparisons;
    std::map<ClassLabel, std::string> comparison_text;
};

/// FID per class and stage as an aligned table.
[[nodiscard]] std::string render_fid_table(const ReportInputs &inputs);
/// Filter train/validation/test accuracy per class.
[[nodiscard]] std::string render_filter_table(const ReportInputs &inputs);

/// Writes the bundle: fid, filter and comparison tables (text and JSON),
/// filter pass counts, the run config, and an index. Contains no
/// timestamps or absolute workspace paths, so equal inputs give equal bytes.
void write_report_bundle(const ReportInputs &inputs, const std::filesystem::path &dir);

}  // namespace genaug::pipeline
