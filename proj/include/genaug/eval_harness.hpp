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
#include "genaug/manifest.hpp"
#include "genaug/metrics.hpp"

#include "json.hpp"

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace genaug::eval {

inline constexpr int eval_input_size = 32;

/// conv -> pool -> conv -> pool -> dense -> dropout -> softmax(3).
struct ClassifierConfig {
    int conv1_channels{ 32 };
    int conv2_channels{ 64 };
    int kernel_size{ 3 };
    int dense_dim{ 128 };
    double dropout{ 0.5 };
    double learning_rate{ 1e-3 };

    void validate() const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static ClassifierConfig from_json(const nlohmann::json &j);
};

struct ExperimentSpec {
    ClassLabel trash_class{ ClassLabel::bag };
    dataset::Composition composition{ dataset::Composition::real };
    std::size_t train_size{ 3000 };
    /// Real test images per class.
    std::size_t test_size{ 300 };
    int epochs{ 30 };
    int batch_size{ 100 };
    std::uint64_t seed{ 0 };
    ClassifierConfig network{};

    void validate() const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static ExperimentSpec from_json(const nlohmann::json &j);
};

/// Class order: trash class, fish, background.
[[nodiscard]] std::vector<std::string> eval_classes(ClassLabel trash_class);

class EvalModel {
  public:
    static constexpr std::array<int, 3> input_shape{ eval_input_size, eval_input_size, 3 };

    /// Untrained model, weights from `seed`.
    EvalModel(std::vector<std::string> classes, ClassifierConfig config, std::uint64_t seed);

    [[nodiscard]] const std::vector<std::string> &classes() const noexcept { return classes_; }
    [[nodiscard]] const ClassifierConfig &config() const noexcept { return config_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Class probabilities [B, 3] for a batch [B, 3, 32, 32].
    [[nodiscard]] torch::Tensor predict_proba(const torch::Tensor &x) const;
    /// Predicted class name per entry.
    [[nodiscard]] std::vector<std::string> predict(const Manifest &manifest) const;

    void save(const std::filesystem::path &path) const;
    [[nodiscard]] static EvalModel load(const std::filesystem::path &path);

    [[nodiscard]] torch::nn::Module &network();
    /// Raw logits with autograd enabled, for training.
    [[nodiscard]] torch::Tensor forward_logits(const torch::Tensor &x);

  private:
    struct Net;
    std::vector<std::string> classes_;
    ClassifierConfig config_;
    std::uint64_t seed_;
    std::shared_ptr<Net> net_;
};

/// Trains on a manifest covering the trash class, fish and background.
/// Throws InvalidArgument naming any class without training entries.
[[nodiscard]] EvalModel train_eval_classifier(const Manifest &train, const ExperimentSpec &spec);

/// Scores a real-only test manifest. Generated entries are a protocol
/// violation (InvalidArgument), as are labels outside the model's classes.
[[nodiscard]] metrics::ClassificationReport evaluate(const EvalModel &model, const Manifest &test);

/// Throws InvalidArgument if any image id occurs in both manifests.
void check_disjoint(const Manifest &train, const Manifest &test);

struct ComparisonRun {
    ExperimentSpec spec;
    Manifest train;
    Manifest test;
};

struct ComparisonTable {
    ClassLabel trash_class{ ClassLabel::bag };
    std::vector<dataset::Composition> compositions;
    std::vector<ExperimentSpec> specs;
    std::vector<metrics::ClassificationReport> reports;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    /// Aligned text block with one column group per composition.
    [[nodiscard]] std::string render() const;
};

/// Trains and evaluates every run. All runs must share the trash class and an
/// identical test manifest.
[[nodiscard]] ComparisonTable run_comparison(const std::vector<ComparisonRun> &runs);

/// Row titles used in rendered tables (background is shown as "empty").
[[nodiscard]] const std::map<std::string, std::string> &display_names();
/// Block title of a trash class ("Plastic Bag", "Plastic Bottle").
[[nodiscard]] std::string table_title(ClassLabel trash_class);

}  // namespace genaug::eval
