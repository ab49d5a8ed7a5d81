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

#include "json.hpp"

#include <torch/torch.h>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace genaug {

/// Self-describing container for one trained model.
///
/// Layout: 8-byte magic, u32 container version, u64 header length, a JSON
/// header (kind tag, metadata, tensor index), then the raw little-endian
/// tensor payloads in index order.
struct ModelFile {
    static constexpr std::uint32_t container_version = 1;

    std::string kind;
    nlohmann::ordered_json meta;
    std::vector<std::pair<std::string, torch::Tensor>> tensors;

    [[nodiscard]] const torch::Tensor &tensor(const std::string &name) const;
};

/// Writes atomically (temp file + rename).
void save_model_file(const ModelFile &file, const std::filesystem::path &path);

/// Throws IoError on a malformed file, and if `expected_kind` is non-empty and
/// does not match the stored kind tag.
[[nodiscard]] ModelFile load_model_file(const std::filesystem::path &path, const std::string &expected_kind = {});

/// Parameters followed by buffers, in registration order, detached CPU copies.
[[nodiscard]] std::vector<std::pair<std::string, torch::Tensor>> module_state(const torch::nn::Module &module);

/// Copies named tensors into the module's parameters and buffers. Every
/// parameter and buffer must be present with a matching shape.
void load_module_state(torch::nn::Module &module, const std::vector<std::pair<std::string, torch::Tensor>> &state);

}  // namespace genaug
