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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace genaug::vae {

/// Diagonal Gaussian emitted by an encoder. Shapes are [B, k] (or [k]); the
/// variance is carried as its logarithm.
struct GaussianParams {
    torch::Tensor mean;
    torch::Tensor log_variance;

    [[nodiscard]] std::int64_t dim() const { return mean.size(-1); }

    /// Throws ShapeError on unequal shapes, NumericError on non-finite entries.
    void validate() const;
};

/// Hyper-parameters of one VAE stage.
///
/// Stage 1 is a convolutional residual VAE over `input_size`² RGB images;
/// `input_size` must be 4·2^L. Stage 2 is a dense VAE over stage-1 latent
/// codes; its `input_size` is the stage-1 `latent_dim`.
struct VaeStageConfig {
    int stage{ 1 };
    int input_size{ 128 };
    int latent_dim{ 12 };
    // stage-1 trunk
    int base_dim{ 16 };
    int kernel_size{ 3 };
    int blocks_per_level{ 1 };
    // stage-2 layers (per encoder and per decoder)
    int dense_dim{ 1024 };
    int dense_layers{ 4 };
    // optimisation
    int batch_size{ 16 };
    int max_epochs{ 3000 };
    double learning_rate{ 1e-4 };
    std::uint64_t seed{ 0 };
    // MAE-based early stopping on a held-out slice
    int mae_patience{ 200 };
    double mae_min_delta{ 1e-4 };
    double validation_fraction{ 0.1 };
    // decoder likelihood N(x_hat, gamma^2 I)
    bool learn_gamma{ true };
    double gamma_init{ 1.0 };
    // stage 2 only: train on sampled latents instead of encoder means
    bool train_on_sampled_latents{ false };

    void validate() const;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static VaeStageConfig from_json(const nlohmann::json &j);

    /// Desk defaults mirroring the published per-class settings.
    [[nodiscard]] static VaeStageConfig bag_stage1();
    [[nodiscard]] static VaeStageConfig bag_stage2();
    [[nodiscard]] static VaeStageConfig bottle_stage1();
    [[nodiscard]] static VaeStageConfig bottle_stage2();
};

struct TrainingLogEntry {
    int epoch{ 0 };
    /// Epoch-averaged negative ELBO (the minimised loss).
    double elbo{ 0.0 };
    double reconstruction{ 0.0 };
    double kl{ 0.0 };
    /// Reconstruction MAE on the validation slice.
    double mae{ 0.0 };

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] static TrainingLogEntry from_json(const nlohmann::json &j);
    friend bool operator==(const TrainingLogEntry &, const TrainingLogEntry &) = default;
};

/// Per-batch terms of the VAE objective, each a batch mean (scalar tensor).
struct ElboTerms {
    torch::Tensor total;
    torch::Tensor reconstruction;
    torch::Tensor kl;
};

/// Encoder/decoder pair of one stage plus the decoder's log-scale.
class VaeNetImpl : public torch::nn::Module {
  public:
    explicit VaeNetImpl(const VaeStageConfig &config);

    [[nodiscard]] virtual GaussianParams encode(const torch::Tensor &x) = 0;
    [[nodiscard]] virtual torch::Tensor decode(const torch::Tensor &z) = 0;

    /// Single-sample estimate of the objective with caller-supplied noise.
    [[nodiscard]] ElboTerms forward_loss(const torch::Tensor &x, const torch::Tensor &noise);

    [[nodiscard]] const VaeStageConfig &config() const noexcept { return config_; }
    [[nodiscard]] const torch::Tensor &log_gamma() const noexcept { return log_gamma_; }

  private:
    VaeStageConfig config_;
    torch::Tensor log_gamma_;
};

/// Builds the network of a stage with weights initialised from `config.seed`.
[[nodiscard]] std::shared_ptr<VaeNetImpl> make_network(const VaeStageConfig &config);

struct VaeCheckpoint {
    static constexpr int format_version = 1;

    VaeStageConfig config;
    std::vector<std::pair<std::string, torch::Tensor>> weights;
    std::vector<TrainingLogEntry> training_log;

    void save(const std::filesystem::path &path) const;
    [[nodiscard]] static VaeCheckpoint load(const std::filesystem::path &path);
};

/// Inference-only view of a trained stage. Never mutates its weights, so a
/// single instance may serve concurrent callers.
class VaeModel {
  public:
    explicit VaeModel(const VaeCheckpoint &checkpoint);

    [[nodiscard]] const VaeStageConfig &config() const noexcept { return config_; }

    /// x: [B, 3, S, S] for stage 1, [B, input_size] for stage 2.
    [[nodiscard]] GaussianParams encode_batch(const torch::Tensor &x) const;
    /// z: [B, latent_dim]. Stage-1 output is clamped into [0, 1].
    [[nodiscard]] torch::Tensor decode_batch(const torch::Tensor &z) const;

    [[nodiscard]] const VaeNetImpl &network() const noexcept { return *net_; }

  private:
    VaeStageConfig config_;
    std::shared_ptr<VaeNetImpl> net_;
};

// ---- objective ----

/// z = mean + exp(log_variance / 2) * noise, elementwise.
[[nodiscard]] torch::Tensor reparameterize(const GaussianParams &params, const torch::Tensor &noise);

/// Closed-form KL(N(mean, var) || N(0, I)) per row: 1/2 sum(mean^2 + var - 1 - log var).
[[nodiscard]] torch::Tensor kl_divergence(const GaussianParams &params);

/// Negative Gaussian log-likelihood per row under N(reconstruction, gamma^2 I).
[[nodiscard]] torch::Tensor gaussian_nll(const torch::Tensor &x, const torch::Tensor &reconstruction, const torch::Tensor &log_gamma);

/// Batch-mean objective; throws NumericError on non-finite inputs and
/// ShapeError on inconsistent shapes.
[[nodiscard]] ElboTerms elbo_loss(const torch::Tensor &x, const torch::Tensor &reconstruction, const GaussianParams &params, const torch::Tensor &log_gamma);

// ---- training ----

/// Training stopped because the loss became non-finite.
class TrainingDiverged : public Error {
  public:
    TrainingDiverged(int epoch, std::vector<TrainingLogEntry> log) :
        Error{ "training diverged (non-finite loss) at epoch " + std::to_string(epoch), "training_diverged" },
        epoch_{ epoch },
        log_{ std::move(log) } {}

    [[nodiscard]] int epoch() const noexcept { return epoch_; }
    [[nodiscard]] const std::vector<TrainingLogEntry> &log() const noexcept { return log_; }

  private:
    int epoch_;
    std::vector<TrainingLogEntry> log_;
};

using EpochCallback = std::function<void(const TrainingLogEntry &)>;

/// Trains one stage on `inputs` ([N, 3, S, S] or [N, k]). When
/// `input_log_variance` is defined and the config asks for sampled latents,
/// each epoch draws inputs from N(inputs, exp(input_log_variance)).
[[nodiscard]] VaeCheckpoint train_stage(const torch::Tensor &inputs, const VaeStageConfig &config, const EpochCallback &on_epoch = {}, const torch::Tensor &input_log_variance = {});

/// Stage 1 on the images of a manifest, loaded at `config.input_size`.
[[nodiscard]] VaeCheckpoint train_stage1(const Manifest &data, const VaeStageConfig &config, const EpochCallback &on_epoch = {});

/// Stage 2 on the latent codes of `images` under a frozen stage 1.
[[nodiscard]] VaeCheckpoint train_stage2(const VaeModel &stage1, const torch::Tensor &images, const VaeStageConfig &config, const EpochCallback &on_epoch = {});

// ---- inference ----

[[nodiscard]] GaussianParams encode(const Image &x, const VaeModel &stage1);
[[nodiscard]] GaussianParams encode(std::span<const float> latent, const VaeModel &stage2);

/// Samples the stage-2 prior, decodes to stage-1 latents, then to images.
/// Deterministic for a fixed seed. `on_chunk` variants stream the output.
[[nodiscard]] std::vector<Image> generate(std::size_t n, const VaeModel &stage1, const VaeModel &stage2, std::uint64_t seed);
void generate(std::size_t n, const VaeModel &stage1, const VaeModel &stage2, std::uint64_t seed, const std::function<void(std::size_t index, const Image &)> &sink);

/// Samples the stage-1 prior directly (no second stage).
[[nodiscard]] std::vector<Image> generate_stage1(std::size_t n, const VaeModel &stage1, std::uint64_t seed);

/// Mean-substitution reconstruction: encode, optionally round-trip the latent
/// mean through stage 2, decode. Output lies in [0, 1].
[[nodiscard]] Image reconstruct(const Image &x, const VaeModel &stage1, const VaeModel *stage2 = nullptr);
[[nodiscard]] torch::Tensor reconstruct_batch(const torch::Tensor &x, const VaeModel &stage1, const VaeModel *stage2 = nullptr);

}  // namespace genaug::vae
