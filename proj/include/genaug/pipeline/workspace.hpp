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

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace genaug::pipeline {

struct LedgerEntry {
    std::string step;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string config_hash;
    /// UTC, ISO 8601.
    std::string timestamp;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static LedgerEntry from_json(const nlohmann::json &j);
};

/// Ordered record of completed steps; the only index of the workspace.
class RunLedger {
  public:
    RunLedger() = default;
    explicit RunLedger(std::filesystem::path file);

    [[nodiscard]] const std::vector<LedgerEntry> &entries() const noexcept { return entries_; }
    [[nodiscard]] std::optional<LedgerEntry> producer_of(const std::string &artifact_id) const;

    /// Appends one line to the ledger file.
    void append(const LedgerEntry &entry);

  private:
    std::filesystem::path file_;
    std::vector<LedgerEntry> entries_;
};

class WorkspaceBusy : public Error {
  public:
    explicit WorkspaceBusy(const std::string &message) :
        Error{ message, "workspace_busy" } {}
};

/// Workspace directory: `ledger.jsonl`, `configs/<hash>.json` and
/// `artifacts/<id>/`. Holding an instance holds the workspace lock.
class Workspace {
  public:
    explicit Workspace(std::filesystem::path dir);
    ~Workspace();
    Workspace(const Workspace &) = delete;
    Workspace &operator=(const Workspace &) = delete;

    [[nodiscard]] const std::filesystem::path &dir() const noexcept { return dir_; }
    [[nodiscard]] RunLedger &ledger() noexcept { return ledger_; }
    [[nodiscard]] std::filesystem::path artifact_dir(const std::string &id) const;
    [[nodiscard]] bool has_artifact(const std::string &id) const;

    /// Fresh scratch directory for building artifact `id`.
    [[nodiscard]] std::filesystem::path begin_artifact(const std::string &id) const;
    /// Moves a finished scratch directory into place. Existing artifacts are never replaced.
    void commit_artifact(const std::filesystem::path &scratch, const std::string &id) const;

    void save_config(const std::string &hash, const nlohmann::ordered_json &config) const;
    [[nodiscard]] nlohmann::json load_config(const std::string &hash) const;

  private:
    std::filesystem::path dir_;
    int lock_fd_{ -1 };
    RunLedger ledger_;
};

[[nodiscard]] std::string utc_timestamp();

/// Writes `text` to `path` via a temporary file and rename.
void write_text_atomic(const std::filesystem::path &path, const std::string &text);
[[nodiscard]] std::string read_text(const std::filesystem::path &path);

}  // namespace genaug::pipeline
