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
#include "genaug/pipeline/config.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace genaug::pipeline {

/// Step names in run order.
[[nodiscard]] const std::vector<std::string> &step_names();

/// The step has not produced its input yet.
class MissingUpstream : public Error {
  public:
    MissingUpstream(const std::string &artifact, const std::string &step) :
        Error{ "missing upstream artifact: " + artifact + " (run step '" + step + "' first)", "missing_upstream" } {}
};

struct StepResult {
    std::string step;
    std::vector<std::string> artifacts;
    /// True when an identical earlier run was found and nothing was recomputed.
    bool reused{ false };
    std::filesystem::path directory;
};

using Logger = std::function<void(const std::string &)>;

/// Artifact id a step would produce under `config` (a pure function of the
/// step name, the config hash and the upstream ids).
[[nodiscard]] std::string artifact_id(const std::string &step, const PipelineConfig &config);

/// Runs one step: checks that its inputs exist, builds the output in a
/// scratch directory, moves it into place and appends to the ledger.
/// Re-running with the same config is a no-op returning the existing ids.
[[nodiscard]] StepResult run_step(const std::string &step, const PipelineConfig &config, const Logger &log = {});

/// Re-runs every ledger entry of a workspace in order with its recorded
/// config, recomputing any artifact that is missing.
[[nodiscard]] std::vector<StepResult> replay(const std::filesystem::path &workspace_dir, const Logger &log = {});

}  // namespace genaug::pipeline
