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

#include "genaug/pipeline/workspace.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>

namespace genaug::pipeline {

nlohmann::ordered_json LedgerEntry::to_json() const {
    return { { "step", step }, { "inputs", inputs }, { "outputs", outputs }, { "config_hash", config_hash }, { "timestamp", timestamp } };
}

LedgerEntry LedgerEntry::from_json(const nlohmann::json &j) {
    return { j.at("step").get<std::string>(), j.at("inputs").get<std::vector<std::string>>(), j.at("outputs").get<std::vector<std::string>>(), j.at("config_hash").get<std::string>(), j.at("timestamp").get<std::string>() };
}

RunLedger::RunLedger(std::filesystem::path file) :
    file_{ std::move(file) } {
    std::ifstream in{ file_ };
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            entries_.push_back(LedgerEntry::from_json(nlohmann::json::parse(line)));
        }
    }
}

std::optional<LedgerEntry> RunLedger::producer_of(const std::string &artifact_id) const {
    for (const auto &e : entries_) {
        if (std::find(e.outputs.begin(), e.outputs.end(), artifact_id) != e.outputs.end()) {
            return e;
        }
    }
    return std::nullopt;
}

void RunLedger::append(const LedgerEntry &entry) {
    std::ofstream out{ file_, std::ios::app | std::ios::binary };
    out << entry.to_json().dump() << '\n';
    out.flush();
    if (!out) {
        throw IoError{ "cannot append to ledger " + file_.string() };
    }
    entries_.push_back(entry);
}

Workspace::Workspace(std::filesystem::path dir) :
    dir_{ std::move(dir) } {
    std::filesystem::create_directories(dir_ / "artifacts");
    std::filesystem::create_directories(dir_ / "configs");
    const auto lock_path = dir_ / ".lock";
    lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0) {
        throw IoError{ "cannot open lock file " + lock_path.string() };
    }
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(lock_fd_);
        throw WorkspaceBusy{ "workspace " + dir_.string() + " is locked by another pipeline process" };
    }
    ledger_ = RunLedger{ dir_ / "ledger.jsonl" };
}

Workspace::~Workspace() {
    if (lock_fd_ >= 0) {
        ::flock(lock_fd_, LOCK_UN);
        ::close(lock_fd_);
    }
}

std::filesystem::path Workspace::artifact_dir(const std::string &id) const { return dir_ / "artifacts" / id; }

bool Workspace::has_artifact(const std::string &id) const { return std::filesystem::is_directory(artifact_dir(id)); }

std::filesystem::path Workspace::begin_artifact(const std::string &id) const {
    const auto scratch = dir_ / "artifacts" / (".tmp-" + id);
    std::filesystem::remove_all(scratch);
    std::filesystem::create_directories(scratch);
    return scratch;
}

void Workspace::commit_artifact(const std::filesystem::path &scratch, const std::string &id) const {
    const auto target = artifact_dir(id);
    if (std::filesystem::exists(target)) {
        std::filesystem::remove_all(scratch);
        return;
    }
    std::filesystem::rename(scratch, target);
}

void Workspace::save_config(const std::string &hash, const nlohmann::ordered_json &config) const {
    const auto path = dir_ / "configs" / (hash + ".json");
    if (!std::filesystem::exists(path)) {
        write_text_atomic(path, config.dump(2) + "\n");
    }
}

nlohmann::json Workspace::load_config(const std::string &hash) const {
    return nlohmann::json::parse(read_text(dir_ / "configs" / (hash + ".json")));
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_atomic(const std::filesystem::path &path, const std::string &text) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out{ tmp, std::ios::binary | std::ios::trunc };
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw IoError{ "cannot write " + tmp };
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw IoError{ "cannot read " + path.string() };
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace genaug::pipeline
