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
#include "genaug/image.hpp"
#include "genaug/metrics.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace genaug::metrics {

/// Maps an image to a fixed-length feature row. Implementations are
/// deterministic and safe to call concurrently.
class FeatureExtractor {
  public:
    virtual ~FeatureExtractor() = default;

    /// Tag recorded in every FeatureSet; FID only compares equal tags.
    [[nodiscard]] virtual std::string id() const = 0;
    [[nodiscard]] virtual Eigen::Index dim() const = 0;
    [[nodiscard]] virtual Eigen::VectorXd extract(const Image &img) const = 0;
};

/// Area-averaged downsample to 16×16×3, flattened to 768 values.
class FlattenDownsampleExtractor final : public FeatureExtractor {
  public:
    static constexpr int grid = 16;

    [[nodiscard]] std::string id() const override { return "flatten-downsample-16"; }
    [[nodiscard]] Eigen::Index dim() const override { return grid * grid * Image::channels; }
    [[nodiscard]] Eigen::VectorXd extract(const Image &img) const override;
};

/// Runs a TorchScript module (e.g. a traced Inception trunk) on NCHW input in
/// [0, 1] resized to `input_size`, and flattens its output. The feature width
/// is read from the module's output on a probe input at load time.
class TorchScriptExtractor final : public FeatureExtractor {
  public:
    TorchScriptExtractor(const std::filesystem::path &weights, int input_size);
    ~TorchScriptExtractor() override;

    [[nodiscard]] std::string id() const override;
    [[nodiscard]] Eigen::Index dim() const override { return dim_; }
    [[nodiscard]] Eigen::VectorXd extract(const Image &img) const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string id_;
    int input_size_;
    Eigen::Index dim_{ 0 };
};

/// No extractor could be built from the given description.
class ExtractorUnavailable : public Error {
  public:
    explicit ExtractorUnavailable(const std::string &message) :
        Error{ message, "extractor_unavailable" } {}
};

/// "flatten-downsample" or "torchscript:<path>[@<input size>]".
[[nodiscard]] std::unique_ptr<FeatureExtractor> make_extractor(const std::string &description);

/// One row per image in input order.
[[nodiscard]] FeatureSet extract_features(const std::vector<Image> &images, const FeatureExtractor &extractor);

}  // namespace genaug::metrics
