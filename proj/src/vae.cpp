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

#include "genaug/vae.hpp"

#include "genaug/metrics.hpp"
#include "genaug/model_file.hpp"
#include "genaug/rng.hpp"
#include "genaug/tensor_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace genaug::vae {

namespace nn = torch::nn;

// ---- GaussianParams / config ----

void GaussianParams::validate() const {
    if (!mean.defined() || !log_variance.defined()) {
        throw InvalidArgument{ "GaussianParams: undefined tensor" };
    }
    if (mean.sizes() != log_variance.sizes()) {
        throw ShapeError{ fmt::format("GaussianParams: mean {} and log-variance {} differ in shape", c10::str(mean.sizes()), c10::str(log_variance.sizes())) };
    }
    if (!torch::isfinite(mean).all().item<bool>() || !torch::isfinite(log_variance).all().item<bool>()) {
        throw NumericError{ "GaussianParams: non-finite entries" };
    }
}

namespace {

int levels_for(const int input_size) {
    int levels = 0;
    int size = input_size;
    while (size > 4 && size % 2 == 0) {
        size /= 2;
        ++levels;
    }
    return size == 4 ? levels : -1;
}

}  // namespace

void VaeStageConfig::validate() const {
    if (stage != 1 && stage != 2) {
        throw InvalidArgument{ fmt::format("VAE stage must be 1 or 2, got {}", stage) };
    }
    if (latent_dim < 1) {
        throw InvalidArgument{ "latent_dim must be at least 1" };
    }
    if (max_epochs < 1 || batch_size < 1) {
        throw InvalidArgument{ "max_epochs and batch_size must be at least 1" };
    }
    if (!(learning_rate > 0.0)) {
        throw InvalidArgument{ "learning_rate must be positive" };
    }
    if (mae_patience < 1 || !(mae_min_delta > 0.0)) {
        throw InvalidArgument{ "mae_patience must be >= 1 and mae_min_delta positive" };
    }
    if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
        throw InvalidArgument{ "validation_fraction must lie in [0, 1)" };
    }
    if (!(gamma_init > 0.0)) {
        throw InvalidArgument{ "gamma_init must be positive" };
    }
    if (stage == 1) {
        if (levels_for(input_size) < 0) {
            throw InvalidArgument{ fmt::format("stage-1 input_size must be 4*2^L, got {}", input_size) };
        }
        if (base_dim < 1 || kernel_size < 1 || kernel_size % 2 == 0 || blocks_per_level < 0) {
            throw InvalidArgument{ "stage-1 needs base_dim >= 1, an odd kernel_size and blocks_per_level >= 0" };
        }
    } else {
        if (input_size < 1 || dense_dim < 1 || dense_layers < 1) {
            throw InvalidArgument{ "stage-2 needs input_size, dense_dim and dense_layers >= 1" };
        }
    }
}

nlohmann::ordered_json VaeStageConfig::to_json() const {
    nlohmann::ordered_json j;
    j["stage"] = stage;
    j["input_size"] = input_size;
    j["latent_dim"] = latent_dim;
    j["base_dim"] = base_dim;
    j["kernel_size"] = kernel_size;
    j["blocks_per_level"] = blocks_per_level;
    j["dense_dim"] = dense_dim;
    j["dense_layers"] = dense_layers;
    j["batch_size"] = batch_size;
    j["max_epochs"] = max_epochs;
    j["learning_rate"] = learning_rate;
    j["seed"] = seed;
    j["mae_patience"] = mae_patience;
    j["mae_min_delta"] = mae_min_delta;
    j["validation_fraction"] = validation_fraction;
    j["learn_gamma"] = learn_gamma;
    j["gamma_init"] = gamma_init;
    j["train_on_sampled_latents"] = train_on_sampled_latents;
    return j;
}

VaeStageConfig VaeStageConfig::from_json(const nlohmann::json &j) {
    VaeStageConfig c;
    const auto read = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    read("stage", c.stage);
    read("input_size", c.input_size);
    read("latent_dim", c.latent_dim);
    read("base_dim", c.base_dim);
    read("kernel_size", c.kernel_size);
    read("blocks_per_level", c.blocks_per_level);
    read("dense_dim", c.dense_dim);
    read("dense_layers", c.dense_layers);
    read("batch_size", c.batch_size);
    read("max_epochs", c.max_epochs);
    read("learning_rate", c.learning_rate);
    read("seed", c.seed);
    read("mae_patience", c.mae_patience);
    read("mae_min_delta", c.mae_min_delta);
    read("validation_fraction", c.validation_fraction);
    read("learn_gamma", c.learn_gamma);
    read("gamma_init", c.gamma_init);
    read("train_on_sampled_latents", c.train_on_sampled_latents);
    c.validate();
    return c;
}

VaeStageConfig VaeStageConfig::bag_stage1() {
    VaeStageConfig c;
    c.stage = 1;
    c.input_size = 128;
    c.latent_dim = 12;
    c.base_dim = 16;
    c.kernel_size = 3;
    c.batch_size = 16;
    c.max_epochs = 3000;
    return c;
}

VaeStageConfig VaeStageConfig::bag_stage2() {
    VaeStageConfig c;
    c.stage = 2;
    c.input_size = 12;
    c.latent_dim = 12;
    c.dense_dim = 1024;
    c.dense_layers = 4;
    c.batch_size = 16;
    c.max_epochs = 6000;
    return c;
}

VaeStageConfig VaeStageConfig::bottle_stage1() { return bag_stage1(); }

VaeStageConfig VaeStageConfig::bottle_stage2() {
    VaeStageConfig c = bag_stage2();
    c.latent_dim = 8;
    c.batch_size = 8;
    return c;
}

nlohmann::ordered_json TrainingLogEntry::to_json() const {
    return { { "epoch", epoch }, { "elbo", elbo }, { "reconstruction_term", reconstruction }, { "kl_term", kl }, { "mae", mae } };
}

TrainingLogEntry TrainingLogEntry::from_json(const nlohmann::json &j) {
    return { j.at("epoch").get<int>(), j.at("elbo").get<double>(), j.at("reconstruction_term").get<double>(), j.at("kl_term").get<double>(), j.at("mae").get<double>() };
}

// ---- objective ----

torch::Tensor reparameterize(const GaussianParams &params, const torch::Tensor &noise) {
    if (noise.sizes() != params.mean.sizes() || params.log_variance.sizes() != params.mean.sizes()) {
        throw ShapeError{ fmt::format("reparameterize: noise {} does not match params {}", c10::str(noise.sizes()), c10::str(params.mean.sizes())) };
    }
    return params.mean + torch::exp(0.5 * params.log_variance) * noise;
}

torch::Tensor kl_divergence(const GaussianParams &params) {
    const auto &mu = params.mean;
    const auto &lv = params.log_variance;
    return 0.5 * (mu.pow(2) + lv.exp() - 1.0 - lv).sum(-1);
}

torch::Tensor gaussian_nll(const torch::Tensor &x, const torch::Tensor &reconstruction, const torch::Tensor &log_gamma) {
    const auto batch = x.size(0);
    const auto diff = (x - reconstruction).reshape({ batch, -1 });
    const double d = static_cast<double>(diff.size(1));
    const auto gamma_sq = torch::exp(2.0 * log_gamma);
    const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
    return diff.pow(2).sum(1) / (2.0 * gamma_sq) + d * (log_gamma + half_log_two_pi);
}

namespace {

ElboTerms elbo_unchecked(const torch::Tensor &x, const torch::Tensor &reconstruction, const GaussianParams &params, const torch::Tensor &log_gamma) {
    auto recon = gaussian_nll(x, reconstruction, log_gamma).mean();
    auto kl = kl_divergence(params).mean();
    return { recon + kl, recon, kl };
}

bool finite(const torch::Tensor &t) { return torch::isfinite(t).all().item<bool>(); }

}  // namespace

ElboTerms elbo_loss(const torch::Tensor &x, const torch::Tensor &reconstruction, const GaussianParams &params, const torch::Tensor &log_gamma) {
    if (x.sizes() != reconstruction.sizes()) {
        throw ShapeError{ fmt::format("elbo_loss: input {} and reconstruction {} differ in shape", c10::str(x.sizes()), c10::str(reconstruction.sizes())) };
    }
    params.validate();
    if (params.mean.dim() != 2 || params.mean.size(0) != x.size(0)) {
        throw ShapeError{ "elbo_loss: params must be [batch, k] with the input's batch size" };
    }
    if (!finite(x) || !finite(reconstruction) || !finite(log_gamma)) {
        throw NumericError{ "elbo_loss: non-finite input" };
    }
    return elbo_unchecked(x, reconstruction, params, log_gamma);
}

// ---- networks ----

VaeNetImpl::VaeNetImpl(const VaeStageConfig &config) :
    config_{ config } {
    config_.validate();
    log_gamma_ = register_parameter("log_gamma", torch::full({ 1 }, std::log(config.gamma_init)), config.learn_gamma);
}

ElboTerms VaeNetImpl::forward_loss(const torch::Tensor &x, const torch::Tensor &noise) {
    const auto params = encode(x);
    const auto z = reparameterize(params, noise);
    return elbo_unchecked(x, decode(z), params, log_gamma_);
}

namespace {

// pre-activation residual block: x + conv(relu(conv(relu(x))))
class ResidualBlockImpl : public nn::Module {
  public:
    ResidualBlockImpl(const std::int64_t channels, const std::int64_t kernel) :
        conv1_{ register_module("conv1", nn::Conv2d{ nn::Conv2dOptions(channels, channels, kernel).padding(kernel / 2) }) },
        conv2_{ register_module("conv2", nn::Conv2d{ nn::Conv2dOptions(channels, channels, kernel).padding(kernel / 2) }) } {}

    torch::Tensor forward(const torch::Tensor &x) {
        return x + conv2_(torch::relu(conv1_(torch::relu(x))));
    }

  private:
    nn::Conv2d conv1_;
    nn::Conv2d conv2_;
};
TORCH_MODULE(ResidualBlock);

std::int64_t level_channels(const int base, const int level) {
    return static_cast<std::int64_t>(base) << std::min(level, 3);
}

class ConvVaeImpl final : public VaeNetImpl {
  public:
    explicit ConvVaeImpl(const VaeStageConfig &c) :
        VaeNetImpl{ c },
        levels_{ levels_for(c.input_size) } {
        const std::int64_t k = c.kernel_size;
        const std::int64_t pad = k / 2;
        top_channels_ = level_channels(c.base_dim, levels_);

        encoder_->push_back(nn::Conv2d{ nn::Conv2dOptions(3, level_channels(c.base_dim, 0), k).padding(pad) });
        for (int i = 0; i < levels_; ++i) {
            const auto ch = level_channels(c.base_dim, i);
            for (int b = 0; b < c.blocks_per_level; ++b) {
                encoder_->push_back(ResidualBlock{ ch, k });
            }
            encoder_->push_back(nn::Functional{ torch::relu });
            encoder_->push_back(nn::Conv2d{ nn::Conv2dOptions(ch, level_channels(c.base_dim, i + 1), k).stride(2).padding(pad) });
        }
        for (int b = 0; b < c.blocks_per_level; ++b) {
            encoder_->push_back(ResidualBlock{ top_channels_, k });
        }
        encoder_->push_back(nn::Functional{ torch::relu });
        encoder_->push_back(nn::Flatten{});
        register_module("encoder", encoder_);

        const std::int64_t flat = top_channels_ * 16;
        mean_head_ = register_module("mean_head", nn::Linear{ flat, c.latent_dim });
        log_variance_head_ = register_module("log_variance_head", nn::Linear{ flat, c.latent_dim });

        latent_in_ = register_module("latent_in", nn::Linear{ c.latent_dim, flat });
        for (int i = levels_ - 1; i >= 0; --i) {
            const auto ch = level_channels(c.base_dim, i);
            decoder_->push_back(nn::Upsample{ nn::UpsampleOptions().scale_factor(std::vector<double>{ 2.0, 2.0 }).mode(torch::kNearest) });
            decoder_->push_back(nn::Conv2d{ nn::Conv2dOptions(level_channels(c.base_dim, i + 1), ch, k).padding(pad) });
            for (int b = 0; b < c.blocks_per_level; ++b) {
                decoder_->push_back(ResidualBlock{ ch, k });
            }
        }
        decoder_->push_back(nn::Functional{ torch::relu });
        decoder_->push_back(nn::Conv2d{ nn::Conv2dOptions(level_channels(c.base_dim, 0), 3, k).padding(pad) });
        register_module("decoder", decoder_);
    }

    GaussianParams encode(const torch::Tensor &x) override {
        const auto h = encoder_->forward(x);
        return { mean_head_(h), log_variance_head_(h) };
    }

    torch::Tensor decode(const torch::Tensor &z) override {
        const auto h = torch::relu(latent_in_(z)).view({ z.size(0), top_channels_, 4, 4 });
        return torch::sigmoid(decoder_->forward(h));
    }

  private:
    int levels_;
    std::int64_t top_channels_{ 0 };
    nn::Sequential encoder_;
    nn::Linear mean_head_{ nullptr };
    nn::Linear log_variance_head_{ nullptr };
    nn::Linear latent_in_{ nullptr };
    nn::Sequential decoder_;
};

class DenseVaeImpl final : public VaeNetImpl {
  public:
    explicit DenseVaeImpl(const VaeStageConfig &c) :
        VaeNetImpl{ c } {
        std::int64_t width = c.input_size;
        for (int i = 0; i < c.dense_layers; ++i) {
            encoder_->push_back(nn::Linear{ width, c.dense_dim });
            encoder_->push_back(nn::Functional{ torch::relu });
            width = c.dense_dim;
        }
        register_module("encoder", encoder_);
        mean_head_ = register_module("mean_head", nn::Linear{ width, c.latent_dim });
        log_variance_head_ = register_module("log_variance_head", nn::Linear{ width, c.latent_dim });

        width = c.latent_dim;
        for (int i = 0; i < c.dense_layers; ++i) {
            decoder_->push_back(nn::Linear{ width, c.dense_dim });
            decoder_->push_back(nn::Functional{ torch::relu });
            width = c.dense_dim;
        }
        decoder_->push_back(nn::Linear{ width, c.input_size });
        register_module("decoder", decoder_);
    }

    GaussianParams encode(const torch::Tensor &x) override {
        const auto h = encoder_->forward(x);
        return { mean_head_(h), log_variance_head_(h) };
    }

    torch::Tensor decode(const torch::Tensor &z) override { return decoder_->forward(z); }

  private:
    nn::Sequential encoder_;
    nn::Linear mean_head_{ nullptr };
    nn::Linear log_variance_head_{ nullptr };
    nn::Sequential decoder_;
};

std::string kind_tag(const int stage) { return stage == 1 ? "vae-stage1" : "vae-stage2"; }

}  // namespace

std::shared_ptr<VaeNetImpl> make_network(const VaeStageConfig &config) {
    config.validate();
    torch::manual_seed(config.seed);
    if (config.stage == 1) {
        return std::make_shared<ConvVaeImpl>(config);
    }
    return std::make_shared<DenseVaeImpl>(config);
}

// ---- checkpoints ----

void VaeCheckpoint::save(const std::filesystem::path &path) const {
    ModelFile file;
    file.kind = kind_tag(config.stage);
    file.meta["format_version"] = format_version;
    file.meta["config"] = config.to_json();
    nlohmann::ordered_json log = nlohmann::ordered_json::array();
    for (const auto &entry : training_log) {
        log.push_back(entry.to_json());
    }
    file.meta["training_log"] = std::move(log);
    file.tensors = weights;
    save_model_file(file, path);
}

VaeCheckpoint VaeCheckpoint::load(const std::filesystem::path &path) {
    const ModelFile file = load_model_file(path);
    if (file.kind != "vae-stage1" && file.kind != "vae-stage2") {
        throw IoError{ path.string() + " is not a VAE checkpoint (kind '" + file.kind + "')" };
    }
    if (file.meta.at("format_version").get<int>() != format_version) {
        throw IoError{ path.string() + ": unsupported checkpoint format version" };
    }
    VaeCheckpoint ckpt;
    ckpt.config = VaeStageConfig::from_json(file.meta.at("config"));
    for (const auto &entry : file.meta.at("training_log")) {
        ckpt.training_log.push_back(TrainingLogEntry::from_json(entry));
    }
    ckpt.weights = file.tensors;
    return ckpt;
}

VaeModel::VaeModel(const VaeCheckpoint &checkpoint) :
    config_{ checkpoint.config },
    net_{ make_network(checkpoint.config) } {
    load_module_state(*net_, checkpoint.weights);
    net_->eval();
}

GaussianParams VaeModel::encode_batch(const torch::Tensor &x) const {
    if (config_.stage == 1) {
        if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != config_.input_size || x.size(3) != config_.input_size) {
            throw ShapeError{ fmt::format("stage-1 encoder expects [B, 3, {0}, {0}], got {1}", config_.input_size, c10::str(x.sizes())) };
        }
    } else if (x.dim() != 2 || x.size(1) != config_.input_size) {
        throw ShapeError{ fmt::format("stage-2 encoder expects [B, {}], got {}", config_.input_size, c10::str(x.sizes())) };
    }
    const torch::NoGradGuard no_grad;
    return net_->encode(x.to(torch::kFloat32));
}

torch::Tensor VaeModel::decode_batch(const torch::Tensor &z) const {
    if (z.dim() != 2 || z.size(1) != config_.latent_dim) {
        throw ShapeError{ fmt::format("stage-{} decoder expects [B, {}], got {}", config_.stage, config_.latent_dim, c10::str(z.sizes())) };
    }
    const torch::NoGradGuard no_grad;
    auto out = net_->decode(z.to(torch::kFloat32));
    return config_.stage == 1 ? out.clamp(0.0, 1.0) : out;
}

// ---- training ----

namespace {

torch::Tensor reconstruct_means(VaeNetImpl &net, const torch::Tensor &inputs, const int batch_size) {
    const torch::NoGradGuard no_grad;
    std::vector<torch::Tensor> parts;
    for (std::int64_t start = 0; start < inputs.size(0); start += batch_size) {
        const auto chunk = inputs.slice(0, start, std::min<std::int64_t>(start + batch_size, inputs.size(0)));
        parts.push_back(net.decode(net.encode(chunk).mean));
    }
    return torch::cat(parts);
}

double tensor_mae(const torch::Tensor &a, const torch::Tensor &b) {
    return (a - b).abs().mean().item<double>();
}

}  // namespace

VaeCheckpoint train_stage(const torch::Tensor &inputs, const VaeStageConfig &config, const EpochCallback &on_epoch, const torch::Tensor &input_log_variance) {
    config.validate();
    if (!inputs.defined() || inputs.size(0) == 0) {
        throw InvalidArgument{ "train_stage: empty training data" };
    }
    if (config.stage == 1 && (inputs.dim() != 4 || inputs.size(2) != config.input_size || inputs.size(3) != config.input_size)) {
        throw ShapeError{ fmt::format("stage-1 training expects [N, 3, {0}, {0}], got {1}", config.input_size, c10::str(inputs.sizes())) };
    }
    if (config.stage == 2 && (inputs.dim() != 2 || inputs.size(1) != config.input_size)) {
        throw ShapeError{ fmt::format("stage-2 training expects [N, {}], got {}", config.input_size, c10::str(inputs.sizes())) };
    }
    const bool sample_inputs = config.stage == 2 && config.train_on_sampled_latents && input_log_variance.defined();

    const auto data = inputs.to(torch::kFloat32).contiguous();
    const auto data_log_variance = sample_inputs ? input_log_variance.to(torch::kFloat32).contiguous() : torch::Tensor{};
    const auto n = static_cast<std::size_t>(data.size(0));

    // held-out validation slice for the MAE stopping rule
    const auto split_order = Rng{ config.seed, 0x5eed }.permutation(n);
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.validation_fraction));
    std::vector<std::int64_t> train_idx;
    std::vector<std::int64_t> val_idx;
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_val ? val_idx : train_idx).push_back(static_cast<std::int64_t>(split_order[i]));
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    const auto train_index = torch::tensor(train_idx, torch::kInt64);
    const auto val_data = val_idx.empty() ? data : data.index_select(0, torch::tensor(val_idx, torch::kInt64));

    auto net = make_network(config);
    net->train();
    torch::optim::Adam optimizer{ net->parameters(), torch::optim::AdamOptions(config.learning_rate) };
    auto noise_gen = at::detail::createCPUGenerator(Rng{ config.seed, 0x0015e }.next());

    VaeCheckpoint ckpt;
    ckpt.config = config;
    double best_mae = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        torch::Tensor epoch_data = data;
        if (sample_inputs) {
            const auto eps = torch::randn(data.sizes(), noise_gen, torch::kFloat32);
            epoch_data = data + torch::exp(0.5 * data_log_variance) * eps;
        }
        Rng order_rng{ config.seed, static_cast<std::uint64_t>(epoch) };
        const auto order = order_rng.permutation(train_idx.size());
        std::vector<std::int64_t> shuffled(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            shuffled[i] = train_idx[order[i]];
        }

        double sum_total = 0.0;
        double sum_recon = 0.0;
        double sum_kl = 0.0;
        for (std::size_t start = 0; start < shuffled.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(shuffled.size(), start + static_cast<std::size_t>(config.batch_size));
            const auto idx = torch::tensor(std::vector<std::int64_t>(shuffled.begin() + static_cast<std::ptrdiff_t>(start), shuffled.begin() + static_cast<std::ptrdiff_t>(stop)), torch::kInt64);
            const auto batch = epoch_data.index_select(0, idx);
            const auto noise = torch::randn({ batch.size(0), config.latent_dim }, noise_gen, torch::kFloat32);

            optimizer.zero_grad();
            const auto terms = net->forward_loss(batch, noise);
            const double total = terms.total.item<double>();
            if (!std::isfinite(total)) {
                throw TrainingDiverged{ epoch, ckpt.training_log };
            }
            terms.total.backward();
            optimizer.step();

            const auto weight = static_cast<double>(stop - start);
            sum_total += total * weight;
            sum_recon += terms.reconstruction.item<double>() * weight;
            sum_kl += terms.kl.item<double>() * weight;
        }

        net->eval();
        const double val_mae = tensor_mae(val_data, reconstruct_means(*net, val_data, std::max(config.batch_size, 64)));
        net->train();

        const auto count = static_cast<double>(shuffled.size());
        TrainingLogEntry entry{ epoch, sum_total / count, sum_recon / count, sum_kl / count, val_mae };
        ckpt.training_log.push_back(entry);
        if (on_epoch) {
            on_epoch(entry);
        }

        if (val_mae < best_mae - config.mae_min_delta) {
            best_mae = val_mae;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.mae_patience) {
            break;
        }
    }
    net->eval();
    ckpt.weights = module_state(*net);
    return ckpt;
}

VaeCheckpoint train_stage1(const Manifest &data, const VaeStageConfig &config, const EpochCallback &on_epoch) {
    if (data.empty()) {
        throw InvalidArgument{ "train_stage1: empty manifest" };
    }
    return train_stage(load_tensor(data, config.input_size), config, on_epoch);
}

VaeCheckpoint train_stage2(const VaeModel &stage1, const torch::Tensor &images, const VaeStageConfig &config, const EpochCallback &on_epoch) {
    if (stage1.config().stage != 1) {
        throw InvalidArgument{ "train_stage2 needs a stage-1 model" };
    }
    if (config.stage != 2 || config.input_size != stage1.config().latent_dim) {
        throw ShapeError{ fmt::format("stage-2 input_size {} must equal the stage-1 latent_dim {}", config.input_size, stage1.config().latent_dim) };
    }
    std::vector<torch::Tensor> means;
    std::vector<torch::Tensor> log_variances;
    for (std::int64_t start = 0; start < images.size(0); start += 64) {
        const auto params = stage1.encode_batch(images.slice(0, start, std::min<std::int64_t>(start + 64, images.size(0))));
        means.push_back(params.mean);
        log_variances.push_back(params.log_variance);
    }
    return train_stage(torch::cat(means), config, on_epoch, torch::cat(log_variances));
}

// ---- inference ----

GaussianParams encode(const Image &x, const VaeModel &stage1) {
    if (stage1.config().stage != 1) {
        throw InvalidArgument{ "encoding an image needs a stage-1 model" };
    }
    if (x.height() != stage1.config().input_size || x.width() != stage1.config().input_size) {
        throw ShapeError{ fmt::format("stage-1 encoder expects {0}x{0}x3, got {1}x{2}x3", stage1.config().input_size, x.height(), x.width()) };
    }
    const auto params = stage1.encode_batch(to_tensor(x).unsqueeze(0));
    return { params.mean.squeeze(0), params.log_variance.squeeze(0) };
}

GaussianParams encode(std::span<const float> latent, const VaeModel &stage2) {
    if (stage2.config().stage != 2) {
        throw InvalidArgument{ "encoding a latent vector needs a stage-2 model" };
    }
    if (static_cast<int>(latent.size()) != stage2.config().input_size) {
        throw ShapeError{ fmt::format("stage-2 encoder expects a {}-dim latent, got {}", stage2.config().input_size, latent.size()) };
    }
    const auto x = torch::tensor(std::vector<float>(latent.begin(), latent.end()), torch::kFloat32).unsqueeze(0);
    const auto params = stage2.encode_batch(x);
    return { params.mean.squeeze(0), params.log_variance.squeeze(0) };
}

namespace {

void check_pair(const VaeModel &stage1, const VaeModel &stage2) {
    if (stage1.config().stage != 1 || stage2.config().stage != 2) {
        throw InvalidArgument{ "expected a stage-1 and a stage-2 checkpoint" };
    }
    if (stage2.config().input_size != stage1.config().latent_dim) {
        throw ShapeError{ fmt::format("stage-2 input dimension {} differs from the stage-1 latent_dim {}", stage2.config().input_size, stage1.config().latent_dim) };
    }
}

constexpr std::int64_t generation_chunk = 64;

}  // namespace

void generate(const std::size_t n, const VaeModel &stage1, const VaeModel &stage2, const std::uint64_t seed, const std::function<void(std::size_t, const Image &)> &sink) {
    check_pair(stage1, stage2);
    if (n == 0) {
        return;
    }
    auto gen = at::detail::createCPUGenerator(seed);
    const auto u = torch::randn({ static_cast<std::int64_t>(n), stage2.config().latent_dim }, gen, torch::kFloat32);
    for (std::int64_t start = 0; start < u.size(0); start += generation_chunk) {
        const auto chunk = u.slice(0, start, std::min<std::int64_t>(start + generation_chunk, u.size(0)));
        const auto images = stage1.decode_batch(stage2.decode_batch(chunk));
        for (std::int64_t i = 0; i < images.size(0); ++i) {
            sink(static_cast<std::size_t>(start + i), to_image(images[i]));
        }
    }
}

std::vector<Image> generate(const std::size_t n, const VaeModel &stage1, const VaeModel &stage2, const std::uint64_t seed) {
    std::vector<Image> out(n);
    generate(n, stage1, stage2, seed, [&](const std::size_t i, const Image &img) { out[i] = img; });
    return out;
}

std::vector<Image> generate_stage1(const std::size_t n, const VaeModel &stage1, const std::uint64_t seed) {
    if (stage1.config().stage != 1) {
        throw InvalidArgument{ "generate_stage1 needs a stage-1 model" };
    }
    std::vector<Image> out;
    if (n == 0) {
        return out;
    }
    auto gen = at::detail::createCPUGenerator(seed);
    const auto z = torch::randn({ static_cast<std::int64_t>(n), stage1.config().latent_dim }, gen, torch::kFloat32);
    for (std::int64_t start = 0; start < z.size(0); start += generation_chunk) {
        const auto images = stage1.decode_batch(z.slice(0, start, std::min<std::int64_t>(start + generation_chunk, z.size(0))));
        for (auto &img : to_images(images)) {
            out.push_back(std::move(img));
        }
    }
    return out;
}

torch::Tensor reconstruct_batch(const torch::Tensor &x, const VaeModel &stage1, const VaeModel *stage2) {
    if (stage2 != nullptr) {
        check_pair(stage1, *stage2);
    }
    auto z = stage1.encode_batch(x).mean;
    if (stage2 != nullptr) {
        z = stage2->decode_batch(stage2->encode_batch(z).mean);
    }
    return stage1.decode_batch(z);
}

Image reconstruct(const Image &x, const VaeModel &stage1, const VaeModel *stage2) {
    if (x.height() != stage1.config().input_size || x.width() != stage1.config().input_size) {
        throw ShapeError{ fmt::format("reconstruct expects {0}x{0}x3, got {1}x{2}x3", stage1.config().input_size, x.height(), x.width()) };
    }
    return to_image(reconstruct_batch(to_tensor(x).unsqueeze(0), stage1, stage2)[0]);
}

}  // namespace genaug::vae
