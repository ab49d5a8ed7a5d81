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

#include "genaug/features.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <torch/script.h>

#include <fmt/format.h>

namespace genaug::metrics {

namespace {

cv::Mat as_mat(const Image &img) {
    cv::Mat mat(img.height(), img.width(), CV_32FC3);
    std::copy(img.values().begin(), img.values().end(), mat.ptr<float>());
    return mat;
}

}  // namespace

Eigen::VectorXd FlattenDownsampleExtractor::extract(const Image &img) const {
    if (img.empty()) {
        throw ShapeError{ "cannot extract features from an empty image" };
    }
    cv::Mat small;
    cv::resize(as_mat(img), small, cv::Size{ grid, grid }, 0.0, 0.0, cv::INTER_AREA);
    Eigen::VectorXd row(dim());
    const auto *data = small.ptr<float>();
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        row(i) = static_cast<double>(data[i]);
    }
    return row;
}

struct TorchScriptExtractor::Impl {
    mutable torch::jit::script::Module module;
};

TorchScriptExtractor::TorchScriptExtractor(const std::filesystem::path &weights, const int input_size) :
    impl_{ std::make_unique<Impl>() },
    id_{ "torchscript:" + weights.filename().string() + "@" + std::to_string(input_size) },
    input_size_{ input_size } {
    if (!std::filesystem::exists(weights)) {
        throw ExtractorUnavailable{ "feature extractor weights not found at '" + weights.string() + "'; export a TorchScript module (torch.jit.trace/script + save) and pass it as torchscript:<path>[@<input size>], or use flatten-downsample" };
    }
    try {
        impl_->module = torch::jit::load(weights.string());
    } catch (const c10::Error &err) {
        throw ExtractorUnavailable{ "cannot load TorchScript feature extractor '" + weights.string() + "': " + err.what_without_backtrace() };
    }
    impl_->module.eval();
    const torch::NoGradGuard no_grad;
    const auto probe = impl_->module.forward({ torch::zeros({ 1, 3, input_size, input_size }) }).toTensor();
    dim_ = probe.numel();
}

TorchScriptExtractor::~TorchScriptExtractor() = default;

std::string TorchScriptExtractor::id() const { return id_; }

Eigen::VectorXd TorchScriptExtractor::extract(const Image &img) const {
    const Image resized = resize_bilinear(img, input_size_, input_size_);
    std::vector<float> values(resized.values().begin(), resized.values().end());
    const auto input = torch::from_blob(values.data(), { 1, input_size_, input_size_, 3 }, torch::kFloat32).permute({ 0, 3, 1, 2 }).contiguous();
    const torch::NoGradGuard no_grad;
    const auto out = impl_->module.forward({ input }).toTensor().to(torch::kFloat64).contiguous().view({ -1 });
    if (out.numel() != dim_) {
        throw ShapeError{ fmt::format("feature extractor produced {} values, expected {}", out.numel(), dim_) };
    }
    Eigen::VectorXd row(dim_);
    std::copy(out.data_ptr<double>(), out.data_ptr<double>() + dim_, row.data());
    return row;
}

std::unique_ptr<FeatureExtractor> make_extractor(const std::string &description) {
    if (description == "flatten-downsample" || description == "flatten-downsample-16") {
        return std::make_unique<FlattenDownsampleExtractor>();
    }
    constexpr std::string_view prefix = "torchscript:";
    if (description.rfind(prefix, 0) == 0) {
        std::string path = description.substr(prefix.size());
        int input_size = 299;
        if (const auto at = path.rfind('@'); at != std::string::npos) {
            input_size = std::stoi(path.substr(at + 1));
            path = path.substr(0, at);
        }
        return std::make_unique<TorchScriptExtractor>(path, input_size);
    }
    throw ExtractorUnavailable{ "unknown feature extractor '" + description + "'; use 'flatten-downsample' or 'torchscript:<path>[@<input size>]'" };
}

FeatureSet extract_features(const std::vector<Image> &images, const FeatureExtractor &extractor) {
    if (images.empty()) {
        throw InvalidArgument{ "extract_features needs at least one image" };
    }
    FeatureSet set{ Eigen::MatrixXd(static_cast<Eigen::Index>(images.size()), extractor.dim()), extractor.id() };
    for (std::size_t i = 0; i < images.size(); ++i) {
        set.features.row(static_cast<Eigen::Index>(i)) = extractor.extract(images[i]).transpose();
    }
    return set;
}

}  // namespace genaug::metrics
