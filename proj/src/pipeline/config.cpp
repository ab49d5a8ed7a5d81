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

#include "genaug/pipeline/config.hpp"

#include "genaug/error.hpp"

#include <openssl/evp.h>

#include <fmt/format.h>

#include <fstream>

namespace genaug::pipeline {

namespace {

VaePair default_vae(const ClassLabel label) {
    if (label == ClassLabel::bottle) {
        return { vae::VaeStageConfig::bottle_stage1(), vae::VaeStageConfig::bottle_stage2() };
    }
    return { vae::VaeStageConfig::bag_stage1(), vae::VaeStageConfig::bag_stage2() };
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
    const std::filesystem::path path{ p };
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

void reseed(PipelineConfig &c) {
    for (auto &[label, pair] : c.vae) {
        pair.stage1.seed = c.seed;
        pair.stage2.seed = c.seed;
    }
    c.filter.seed = c.seed;
    c.experiment.seed = c.seed;
}

}  // namespace

std::string sha256_hex(const std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error{ "SHA-256 digest failed", "internal" };
    }
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::vector<ClassLabel> PipelineConfig::trash_classes() const {
    std::vector<ClassLabel> out;
    for (const auto &[label, dir] : sources) {
        if (label == ClassLabel::bag || label == ClassLabel::bottle) {
            out.push_back(label);
        }
    }
    return out;
}

const VaePair &PipelineConfig::vae_for(const ClassLabel label) const {
    const auto it = vae.find(label);
    if (it == vae.end()) {
        throw InvalidArgument{ "no VAE configuration for class '" + std::string{ to_string(label) } + "'" };
    }
    return it->second;
}

void PipelineConfig::set_seed(const std::uint64_t value) {
    seed = value;
    reseed(*this);
}

void PipelineConfig::validate() const {
    if (workspace_dir.empty()) {
        throw InvalidArgument{ "workspace_dir is required" };
    }
    if (image_size < 4) {
        throw InvalidArgument{ "image_size must be at least 4" };
    }
    if (trash_classes().empty()) {
        throw InvalidArgument{ "sources must include a trash class (bag or bottle)" };
    }
    for (const auto required : { ClassLabel::fish, ClassLabel::background }) {
        if (!sources.contains(required)) {
            throw InvalidArgument{ "sources must include '" + std::string{ to_string(required) } + "'" };
        }
    }
    if (test_per_class == 0 || generate_count == 0) {
        throw InvalidArgument{ "test_per_class and generate_count must be positive" };
    }
    if (labeling.mode != "interactive" && labeling.mode != "scripted") {
        throw InvalidArgument{ "labeling.mode must be 'interactive' or 'scripted', got '" + labeling.mode + "'" };
    }
    if (labeling.port < 0 || labeling.port > 65535) {
        throw InvalidArgument{ fmt::format("labeling.port out of range: {}", labeling.port) };
    }
    if (compositions.empty()) {
        throw InvalidArgument{ "compositions must not be empty" };
    }
    for (const auto label : trash_classes()) {
        const auto &pair = vae_for(label);
        pair.stage1.validate();
        pair.stage2.validate();
        if (pair.stage1.stage != 1 || pair.stage2.stage != 2 || pair.stage2.input_size != pair.stage1.latent_dim) {
            throw InvalidArgument{ "VAE stages of '" + std::string{ to_string(label) } + "' are inconsistent: stage 2 input_size must equal the stage-1 latent_dim" };
        }
    }
    filter.validate();
    experiment.validate();
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["workspace_dir"] = workspace_dir.string();
    j["seed"] = seed;
    j["image_size"] = image_size;
    nlohmann::ordered_json src = nlohmann::ordered_json::object();
    for (const auto &[label, dir] : sources) {
        src[std::string{ to_string(label) }] = dir.string();
    }
    j["sources"] = src;
    j["test_per_class"] = test_per_class;
    j["augment_target"] = augment_target;
    nlohmann::ordered_json v = nlohmann::ordered_json::object();
    for (const auto &[label, pair] : vae) {
        v[std::string{ to_string(label) }] = { { "stage1", pair.stage1.to_json() }, { "stage2", pair.stage2.to_json() } };
    }
    j["vae"] = v;
    j["generate_count"] = generate_count;
    j["fid_samples"] = fid_samples;
    j["feature_extractor"] = feature_extractor;
    j["labeling"] = { { "mode", labeling.mode }, { "host", labeling.host }, { "port", labeling.port }, { "max_images", labeling.max_images }, { "annotator", labeling.annotator } };
    j["filter"] = filter.to_json();
    nlohmann::ordered_json comps = nlohmann::ordered_json::array();
    for (const auto c : compositions) {
        comps.push_back(dataset::to_string(c));
    }
    j["compositions"] = comps;
    auto exp = experiment.to_json();
    exp.erase("trash_class");
    exp.erase("composition");
    j["experiment"] = exp;
    return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json &j, const std::filesystem::path &base_dir) {
    PipelineConfig c;
    const auto read = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    if (j.contains("workspace_dir")) {
        c.workspace_dir = resolve(base_dir, j.at("workspace_dir").get<std::string>());
    }
    read("seed", c.seed);
    read("image_size", c.image_size);
    for (const auto &[key, value] : j.at("sources").items()) {
        c.sources[parse_class_label(key)] = resolve(base_dir, value.get<std::string>());
    }
    read("test_per_class", c.test_per_class);
    read("augment_target", c.augment_target);
    for (const auto label : c.trash_classes()) {
        VaePair pair = default_vae(label);
        const std::string name{ to_string(label) };
        if (j.contains("vae") && j.at("vae").contains(name)) {
            const auto &given = j.at("vae").at(name);
            // overlay the given fields onto the per-class defaults
            for (const auto &[stage, field] : { std::pair{ "stage1", &pair.stage1 }, std::pair{ "stage2", &pair.stage2 } }) {
                nlohmann::json merged = field->to_json();
                if (given.contains(stage)) {
                    merged.update(given.at(stage));
                }
                *field = vae::VaeStageConfig::from_json(merged);
            }
        }
        c.vae[label] = pair;
    }
    read("generate_count", c.generate_count);
    read("fid_samples", c.fid_samples);
    read("feature_extractor", c.feature_extractor);
    if (j.contains("labeling")) {
        const auto &l = j.at("labeling");
        const auto get = [&](const char *key, auto &field) {
            if (l.contains(key)) {
                l.at(key).get_to(field);
            }
        };
        get("mode", c.labeling.mode);
        get("host", c.labeling.host);
        get("port", c.labeling.port);
        get("max_images", c.labeling.max_images);
        get("annotator", c.labeling.annotator);
    }
    if (j.contains("filter")) {
        c.filter = quality::FilterConfig::from_json(j.at("filter"));
    }
    if (j.contains("compositions")) {
        c.compositions.clear();
        for (const auto &name : j.at("compositions")) {
            c.compositions.push_back(dataset::parse_composition(name.get<std::string>()));
        }
    }
    if (j.contains("experiment")) {
        c.experiment = eval::ExperimentSpec::from_json(j.at("experiment"));
    }
    c.experiment.trash_class = c.trash_classes().empty() ? ClassLabel::bag : c.trash_classes().front();
    reseed(c);
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path &file) {
    std::ifstream in{ file };
    if (!in) {
        throw IoError{ "cannot read config " + file.string() };
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument{ file.string() + ": " + e.what() };
    }
    const auto base = std::filesystem::absolute(file).parent_path();
    return from_json(j, base);
}

std::string PipelineConfig::hash() const {
    auto j = to_json();
    j.erase("workspace_dir");
    j["labeling"].erase("host");
    j["labeling"].erase("port");
    return sha256_hex(j.dump());
}

}  // namespace genaug::pipeline
