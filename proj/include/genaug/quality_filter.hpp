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
#include "genaug/manifest.hpp"

#include "json.hpp"

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace genaug::quality {

// ---- human labels ----

enum class Verdict { good, bad };

[[nodiscard]] std::string_view to_string(Verdict verdict);
/// Throws InvalidArgument for anything but "good"/"bad".
[[nodiscard]] Verdict parse_verdict(std::string_view text);

struct LabelRecord {
    std::string image_id;
    Verdict verdict{ Verdict::good };
    std::string annotator;
    /// Milliseconds since the Unix epoch.
    std::int64_t labeled_at{ 0 };

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static LabelRecord from_json(const nlohmann::json &j);
    friend bool operator==(const LabelRecord &, const LabelRecord &) = default;
};

/// One verdict per image: per annotator the latest record wins, then the
/// majority across annotators, and a tie goes to the most recent record.
[[nodiscard]] std::map<std::string, Verdict> resolve_labels(const std::vector<LabelRecord> &records);

/// Append-only, line-delimited label file. All appends go through one mutex
/// so concurrent writers never interleave partial lines.
class LabelStore {
  public:
    enum class AppendResult { recorded, duplicate };

    /// Opens (creating if needed) and loads existing records.
    explicit LabelStore(std::filesystem::path path);

    /// Appends unless the annotator's current verdict for the image is the
    /// same, in which case nothing changes and `duplicate` is returned.
    AppendResult append(const LabelRecord &record);

    [[nodiscard]] std::vector<LabelRecord> records() const;
    [[nodiscard]] std::map<std::string, Verdict> resolved() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path &path() const noexcept { return path_; }

  private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<LabelRecord> records_;
    std::map<std::pair<std::string, std::string>, std::size_t> latest_;
};

// ---- filter model ----

inline constexpr int filter_input_size = 128;

struct FilterConfig {
    /// "resnet-small" (basic blocks) or "resnet50" (bottleneck 3-4-6-3).
    std::string architecture{ "resnet-small" };
    int base_width{ 8 };
    int epochs{ 50 };
    int batch_size{ 16 };
    double learning_rate{ 1e-3 };
    double threshold{ 0.5 };
    std::uint64_t seed{ 0 };
    double train_fraction{ 0.70 };
    double val_fraction{ 0.15 };

    void validate() const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static FilterConfig from_json(const nlohmann::json &j);
};

struct TrainingStats {
    double train_acc{ 0.0 };
    double val_acc{ 0.0 };
    double test_acc{ 0.0 };
    std::size_t n_train{ 0 };
    std::size_t n_val{ 0 };
    std::size_t n_test{ 0 };
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static TrainingStats from_json(const nlohmann::json &j);
};

/// Binary good/bad classifier over 128×128×3 images.
class FilterModel {
  public:
    static constexpr std::array<int, 3> input_shape{ filter_input_size, filter_input_size, 3 };

    /// Untrained model with weights initialised from `config.seed`.
    explicit FilterModel(FilterConfig config);

    [[nodiscard]] const FilterConfig &config() const noexcept { return config_; }
    [[nodiscard]] double threshold() const noexcept { return config_.threshold; }
    [[nodiscard]] const TrainingStats &training_stats() const noexcept { return stats_; }

    /// Same weights, different decision threshold (must lie in (0, 1)).
    [[nodiscard]] FilterModel with_threshold(double threshold) const;

    /// p(good) for a batch [B, 3, 128, 128].
    [[nodiscard]] torch::Tensor predict_batch(const torch::Tensor &x) const;

    void save(const std::filesystem::path &path) const;
    [[nodiscard]] static FilterModel load(const std::filesystem::path &path);

    /// Mutable network access for training.
    [[nodiscard]] torch::nn::Module &network();
    /// Raw logits with autograd enabled, for training.
    [[nodiscard]] torch::Tensor forward_logits(const torch::Tensor &x);
    void set_training_stats(TrainingStats stats) { stats_ = std::move(stats); }

  private:
    struct Net;
    FilterConfig config_;
    std::shared_ptr<Net> net_;
    TrainingStats stats_;
};

/// Trains on good (label 1) vs bad (label 0) images using a stratified
/// train/val/test split, and records the three accuracies.
[[nodiscard]] FilterModel train_filter(const Manifest &good, const Manifest &bad, const FilterConfig &config);

/// p(good) of one 128×128×3 image.
[[nodiscard]] double predict(const FilterModel &model, const Image &image);

struct FilterOutcome {
    Manifest accepted;
    Manifest rejected;
    /// p(good) per pool entry, in pool order.
    std::vector<double> scores;
};

/// Splits a generated pool by p(good) >= threshold. Pool images are resized
/// to 128×128 before scoring.
[[nodiscard]] FilterOutcome filter_pool(const FilterModel &model, const Manifest &pool);

}  // namespace genaug::quality
