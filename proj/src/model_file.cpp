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

#include "genaug/model_file.hpp"

#include "genaug/error.hpp"

#include <fmt/format.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace genaug {

namespace {

constexpr std::array<char, 8> magic{ 'G', 'E', 'N', 'A', 'U', 'G', 'M', '\0' };

static_assert(std::endian::native == std::endian::little, "model files are little-endian; add byte swapping for this platform");

std::string dtype_tag(const torch::Tensor &t) {
    switch (t.scalar_type()) {
        case torch::kFloat32: return "f32";
        case torch::kFloat64: return "f64";
        case torch::kInt64: return "i64";
        default: throw InvalidArgument{ fmt::format("unsupported tensor dtype {}", c10::toString(t.scalar_type())) };
    }
}

torch::ScalarType dtype_from_tag(const std::string &tag) {
    if (tag == "f32") {
        return torch::kFloat32;
    }
    if (tag == "f64") {
        return torch::kFloat64;
    }
    if (tag == "i64") {
        return torch::kInt64;
    }
    throw IoError{ "unknown tensor dtype tag '" + tag + "'" };
}

template <typename T>
void write_pod(std::ostream &out, const T &value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream &in) {
    T value{};
    in.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!in) {
        throw IoError{ "model file truncated" };
    }
    return value;
}

}  // namespace

const torch::Tensor &ModelFile::tensor(const std::string &name) const {
    for (const auto &[key, value] : tensors) {
        if (key == name) {
            return value;
        }
    }
    throw IoError{ "model file has no tensor named '" + name + "'" };
}

void save_model_file(const ModelFile &file, const std::filesystem::path &path) {
    nlohmann::ordered_json header;
    header["kind"] = file.kind;
    header["meta"] = file.meta;
    nlohmann::ordered_json index = nlohmann::ordered_json::array();
    std::vector<torch::Tensor> payloads;
    std::uint64_t offset = 0;
    for (const auto &[name, tensor] : file.tensors) {
        auto t = tensor.detach().to(torch::kCPU).contiguous();
        const auto bytes = static_cast<std::uint64_t>(t.numel()) * t.element_size();
        index.push_back({ { "name", name }, { "dtype", dtype_tag(t) }, { "shape", t.sizes().vec() }, { "offset", offset }, { "bytes", bytes } });
        offset += bytes;
        payloads.push_back(std::move(t));
    }
    header["tensors"] = std::move(index);
    const std::string text = header.dump();

    const auto tmp = std::filesystem::path{ path.string() + ".tmp" };
    {
        std::ofstream out{ tmp, std::ios::binary | std::ios::trunc };
        if (!out) {
            throw IoError{ "cannot write model file " + path.string() };
        }
        out.write(magic.data(), magic.size());
        write_pod(out, ModelFile::container_version);
        write_pod(out, static_cast<std::uint64_t>(text.size()));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (const auto &t : payloads) {
            out.write(static_cast<const char *>(t.data_ptr()), static_cast<std::streamsize>(t.numel() * t.element_size()));
        }
        if (!out) {
            throw IoError{ "failed writing model file " + path.string() };
        }
    }
    std::filesystem::rename(tmp, path);
}

ModelFile load_model_file(const std::filesystem::path &path, const std::string &expected_kind) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw IoError{ "cannot open model file " + path.string() };
    }
    std::array<char, 8> head{};
    in.read(head.data(), head.size());
    if (!in || head != magic) {
        throw IoError{ path.string() + " is not a model file" };
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != ModelFile::container_version) {
        throw IoError{ fmt::format("{}: unsupported container version {}", path.string(), version) };
    }
    const auto header_size = read_pod<std::uint64_t>(in);
    std::string text(header_size, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_size));
    if (!in) {
        throw IoError{ path.string() + ": truncated header" };
    }
    const auto header = nlohmann::ordered_json::parse(text);

    ModelFile file;
    file.kind = header.at("kind").get<std::string>();
    if (!expected_kind.empty() && file.kind != expected_kind) {
        throw IoError{ path.string() + " holds a '" + file.kind + "' model, expected '" + expected_kind + "'" };
    }
    file.meta = header.at("meta");
    for (const auto &entry : header.at("tensors")) {
        const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
        const auto bytes = entry.at("bytes").get<std::uint64_t>();
        auto t = torch::empty(shape, torch::TensorOptions{}.dtype(dtype_from_tag(entry.at("dtype").get<std::string>())));
        if (static_cast<std::uint64_t>(t.numel()) * t.element_size() != bytes) {
            throw IoError{ path.string() + ": tensor '" + entry.at("name").get<std::string>() + "' size does not match its shape" };
        }
        in.read(static_cast<char *>(t.data_ptr()), static_cast<std::streamsize>(bytes));
        if (!in) {
            throw IoError{ path.string() + ": truncated tensor payload" };
        }
        file.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
    }
    return file;
}

std::vector<std::pair<std::string, torch::Tensor>> module_state(const torch::nn::Module &module) {
    std::vector<std::pair<std::string, torch::Tensor>> state;
    for (const auto &item : module.named_parameters(true)) {
        state.emplace_back("param:" + item.key(), item.value().detach().clone());
    }
    for (const auto &item : module.named_buffers(true)) {
        state.emplace_back("buffer:" + item.key(), item.value().detach().clone());
    }
    return state;
}

void load_module_state(torch::nn::Module &module, const std::vector<std::pair<std::string, torch::Tensor>> &state) {
    std::unordered_map<std::string, const torch::Tensor *> by_name;
    for (const auto &[name, tensor] : state) {
        by_name.emplace(name, &tensor);
    }
    const torch::NoGradGuard no_grad;
    const auto copy_into = [&](const std::string &name, torch::Tensor &target) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw IoError{ "model state is missing '" + name + "'" };
        }
        if (it->second->sizes() != target.sizes()) {
            throw ShapeError{ fmt::format("model state '{}' has shape {}, module expects {}", name, c10::str(it->second->sizes()), c10::str(target.sizes())) };
        }
        target.copy_(*it->second);
    };
    for (auto &item : module.named_parameters(true)) {
        copy_into("param:" + item.key(), item.value());
    }
    for (auto &item : module.named_buffers(true)) {
        copy_into("buffer:" + item.key(), item.value());
    }
}

}  // namespace genaug
