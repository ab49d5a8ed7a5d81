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

#include "genaug/quality_filter.hpp"

#include "genaug/model_file.hpp"
#include "genaug/rng.hpp"
#include "genaug/tensor_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <optional>

namespace genaug::quality {

namespace nn = torch::nn;

// ---- labels ----

std::string_view to_string(const Verdict verdict) { return verdict == Verdict::good ? "good" : "bad"; }

Verdict parse_verdict(const std::string_view text) {
    if (text == "good") {
        return Verdict::good;
    }
    if (text == "bad") {
        return Verdict::bad;
    }
    throw InvalidArgument{ "verdict must be 'good' or 'bad', got '" + std::string{ text } + "'" };
}

nlohmann::ordered_json LabelRecord::to_json() const {
    return { { "image_id", image_id }, { "verdict", to_string(verdict) }, { "annotator", annotator }, { "labeled_at", labeled_at } };
}

LabelRecord LabelRecord::from_json(const nlohmann::json &j) {
    return { j.at("image_id").get<std::string>(), parse_verdict(j.at("verdict").get<std::string>()), j.at("annotator").get<std::string>(), j.at("labeled_at").get<std::int64_t>() };
}

std::map<std::string, Verdict> resolve_labels(const std::vector<LabelRecord> &records) {
    // latest record per (image, annotator); later file position breaks timestamp ties
    std::map<std::pair<std::string, std::string>, const LabelRecord *> latest;
    for (const auto &r : records) {
        auto &slot = latest[{ r.image_id, r.annotator }];
        if (slot == nullptr || r.labeled_at >= slot->labeled_at) {
            slot = &r;
        }
    }
    struct Tally {
        int good{ 0 };
        int bad{ 0 };
        const LabelRecord *newest{ nullptr };
    };
    std::map<std::string, Tally> tallies;
    for (const auto &[key, record] : latest) {
        auto &t = tallies[key.first];
        (record->verdict == Verdict::good ? t.good : t.bad) += 1;
        if (t.newest == nullptr || record->labeled_at > t.newest->labeled_at) {
            t.newest = record;
        }
    }
    std::map<std::string, Verdict> resolved;
    for (const auto &[id, t] : tallies) {
        resolved[id] = t.good > t.bad ? Verdict::good : t.bad > t.good ? Verdict::bad : t.newest->verdict;
    }
    return resolved;
}

LabelStore::LabelStore(std::filesystem::path path) :
    path_{ std::move(path) } {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    std::ifstream in{ path_ };
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto record = LabelRecord::from_json(nlohmann::json::parse(line));
        latest_[{ record.image_id, record.annotator }] = records_.size();
        records_.push_back(record);
    }
}

LabelStore::AppendResult LabelStore::append(const LabelRecord &record) {
    const std::lock_guard lock{ mutex_ };
    const auto key = std::make_pair(record.image_id, record.annotator);
    if (const auto it = latest_.find(key); it != latest_.end() && records_[it->second].verdict == record.verdict) {
        return AppendResult::duplicate;
    }
    std::ofstream out{ path_, std::ios::app | std::ios::binary };
    const std::string line = record.to_json().dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) {
        throw IoError{ "cannot append to label store " + path_.string() };
    }
    latest_[key] = records_.size();
    records_.push_back(record);
    return AppendResult::recorded;
}

std::vector<LabelRecord> LabelStore::records() const {
    const std::lock_guard lock{ mutex_ };
    return records_;
}

std::map<std::string, Verdict> LabelStore::resolved() const { return resolve_labels(records()); }

std::size_t LabelStore::size() const {
    const std::lock_guard lock{ mutex_ };
    return records_.size();
}

// ---- config ----

void FilterConfig::validate() const {
    if (architecture != "resnet-small" && architecture != "resnet50") {
        throw InvalidArgument{ "filter architecture must be 'resnet-small' or 'resnet50', got '" + architecture + "'" };
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidArgument{ fmt::format("filter threshold must lie in (0, 1), got {}", threshold) };
    }
    if (base_width < 1 || epochs < 1 || batch_size < 1 || !(learning_rate > 0.0)) {
        throw InvalidArgument{ "filter base_width, epochs and batch_size must be >= 1 and learning_rate positive" };
    }
    if (!(train_fraction > 0.0) || val_fraction < 0.0 || train_fraction + val_fraction > 1.0) {
        throw InvalidArgument{ "filter split fractions must be non-negative with train > 0 and train + val <= 1" };
    }
}

nlohmann::ordered_json FilterConfig::to_json() const {
    return { { "architecture", architecture }, { "base_width", base_width }, { "epochs", epochs }, { "batch_size", batch_size }, { "learning_rate", learning_rate }, { "threshold", threshold }, { "seed", seed }, { "train_fraction", train_fraction }, { "val_fraction", val_fraction } };
}

FilterConfig FilterConfig::from_json(const nlohmann::json &j) {
    FilterConfig c;
    const auto read = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    read("architecture", c.architecture);
    read("base_width", c.base_width);
    read("epochs", c.epochs);
    read("batch_size", c.batch_size);
    read("learning_rate", c.learning_rate);
    read("threshold", c.threshold);
    read("seed", c.seed);
    read("train_fraction", c.train_fraction);
    read("val_fraction", c.val_fraction);
    c.validate();
    return c;
}

nlohmann::ordered_json TrainingStats::to_json() const {
    return { { "train_acc", train_acc }, { "val_acc", val_acc }, { "test_acc", test_acc }, { "n_train", n_train }, { "n_val", n_val }, { "n_test", n_test }, { "warnings", warnings } };
}

TrainingStats TrainingStats::from_json(const nlohmann::json &j) {
    TrainingStats s;
    s.train_acc = j.at("train_acc").get<double>();
    s.val_acc = j.at("val_acc").get<double>();
    s.test_acc = j.at("test_acc").get<double>();
    s.n_train = j.at("n_train").get<std::size_t>();
    s.n_val = j.at("n_val").get<std::size_t>();
    s.n_test = j.at("n_test").get<std::size_t>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
}

// ---- networks ----

namespace {

nn::Conv2d conv(const std::int64_t in, const std::int64_t out, const std::int64_t k, const std::int64_t stride = 1) {
    return nn::Conv2d{ nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2).bias(false) };
}

class BasicBlockImpl : public nn::Module {
  public:
    BasicBlockImpl(const std::int64_t in, const std::int64_t out, const std::int64_t stride) :
        conv1_{ register_module("conv1", conv(in, out, 3, stride)) },
        bn1_{ register_module("bn1", nn::BatchNorm2d{ out }) },
        conv2_{ register_module("conv2", conv(out, out, 3)) },
        bn2_{ register_module("bn2", nn::BatchNorm2d{ out }) } {
        if (stride != 1 || in != out) {
            shortcut_ = register_module("shortcut", nn::Sequential{ conv(in, out, 1, stride), nn::BatchNorm2d{ out } });
        }
    }

    torch::Tensor forward(const torch::Tensor &x) {
        auto y = torch::relu(bn1_(conv1_(x)));
        y = bn2_(conv2_(y));
        return torch::relu(y + (shortcut_ ? shortcut_->forward(x) : x));
    }

  private:
    nn::Conv2d conv1_;
    nn::BatchNorm2d bn1_;
    nn::Conv2d conv2_;
    nn::BatchNorm2d bn2_;
    nn::Sequential shortcut_{ nullptr };
};
TORCH_MODULE(BasicBlock);

class BottleneckImpl : public nn::Module {
  public:
    static constexpr std::int64_t expansion = 4;

    BottleneckImpl(const std::int64_t in, const std::int64_t mid, const std::int64_t stride) :
        conv1_{ register_module("conv1", conv(in, mid, 1)) },
        bn1_{ register_module("bn1", nn::BatchNorm2d{ mid }) },
        conv2_{ register_module("conv2", conv(mid, mid, 3, stride)) },
        bn2_{ register_module("bn2", nn::BatchNorm2d{ mid }) },
        conv3_{ register_module("conv3", conv(mid, mid * expansion, 1)) },
        bn3_{ register_module("bn3", nn::BatchNorm2d{ mid * expansion }) } {
        if (stride != 1 || in != mid * expansion) {
            shortcut_ = register_module("shortcut", nn::Sequential{ conv(in, mid * expansion, 1, stride), nn::BatchNorm2d{ mid * expansion } });
        }
    }

    torch::Tensor forward(const torch::Tensor &x) {
        auto y = torch::relu(bn1_(conv1_(x)));
        y = torch::relu(bn2_(conv2_(y)));
        y = bn3_(conv3_(y));
        return torch::relu(y + (shortcut_ ? shortcut_->forward(x) : x));
    }

  private:
    nn::Conv2d conv1_;
    nn::BatchNorm2d bn1_;
    nn::Conv2d conv2_;
    nn::BatchNorm2d bn2_;
    nn::Conv2d conv3_;
    nn::BatchNorm2d bn3_;
    nn::Sequential shortcut_{ nullptr };
};
TORCH_MODULE(Bottleneck);

}  // namespace

struct FilterModel::Net : nn::Module {
    explicit Net(const FilterConfig &c) {
        if (c.architecture == "resnet50") {
            trunk = nn::Sequential{ conv(3, 64, 7, 2), nn::BatchNorm2d{ 64 }, nn::Functional{ torch::relu }, nn::MaxPool2d{ nn::MaxPool2dOptions(3).stride(2).padding(1) } };
            std::int64_t in = 64;
            const std::array<int, 4> blocks{ 3, 4, 6, 3 };
            for (std::size_t s = 0; s < blocks.size(); ++s) {
                const std::int64_t mid = 64LL << s;
                for (int b = 0; b < blocks[s]; ++b) {
                    trunk->push_back(Bottleneck{ in, mid, (b == 0 && s > 0) ? 2 : 1 });
                    in = mid * BottleneckImpl::expansion;
                }
            }
            features = in;
        } else {
            const std::int64_t w = c.base_width;
            trunk = nn::Sequential{ conv(3, w, 3, 2), nn::BatchNorm2d{ w }, nn::Functional{ torch::relu } };
            std::int64_t in = w;
            for (int s = 0; s < 4; ++s) {
                const std::int64_t out = w << s;
                trunk->push_back(BasicBlock{ in, out, s == 0 ? 1 : 2 });
                in = out;
            }
            features = in;
        }
        register_module("trunk", trunk);
        head = register_module("head", nn::Linear{ features, 1 });
    }

    torch::Tensor forward(const torch::Tensor &x) {
        const auto h = trunk->forward(x).mean({ 2, 3 });
        return head(h).squeeze(1);
    }

    nn::Sequential trunk{ nullptr };
    nn::Linear head{ nullptr };
    std::int64_t features{ 0 };
};

FilterModel::FilterModel(FilterConfig config) :
    config_{ std::move(config) } {
    config_.validate();
    torch::manual_seed(config_.seed);
    net_ = std::make_shared<Net>(config_);
    net_->eval();
}

FilterModel FilterModel::with_threshold(const double threshold) const {
    FilterModel copy = *this;
    copy.config_.threshold = threshold;
    copy.config_.validate();
    return copy;
}

torch::nn::Module &FilterModel::network() { return *net_; }

torch::Tensor FilterModel::forward_logits(const torch::Tensor &x) { return net_->forward(x); }

torch::Tensor FilterModel::predict_batch(const torch::Tensor &x) const {
    if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != filter_input_size || x.size(3) != filter_input_size) {
        throw ShapeError{ fmt::format("filter expects [B, 3, {0}, {0}], got {1}", filter_input_size, c10::str(x.sizes())) };
    }
    const torch::NoGradGuard no_grad;
    return torch::sigmoid(net_->forward(x.to(torch::kFloat32))).to(torch::kFloat64);
}

void FilterModel::save(const std::filesystem::path &path) const {
    ModelFile file;
    file.kind = "quality-filter";
    file.meta["input_shape"] = input_shape;
    file.meta["config"] = config_.to_json();
    file.meta["training_stats"] = stats_.to_json();
    file.tensors = module_state(*net_);
    save_model_file(file, path);
}

FilterModel FilterModel::load(const std::filesystem::path &path) {
    const ModelFile file = load_model_file(path, "quality-filter");
    if (file.meta.at("input_shape").get<std::array<int, 3>>() != input_shape) {
        throw ShapeError{ path.string() + ": filter input shape must be 128x128x3" };
    }
    FilterModel model{ FilterConfig::from_json(file.meta.at("config")) };
    load_module_state(*model.net_, file.tensors);
    model.net_->eval();
    model.stats_ = TrainingStats::from_json(file.meta.at("training_stats"));
    return model;
}

// ---- training / inference ----

namespace {

struct Split3 {
    std::vector<std::int64_t> train, val, test;
};

// per-class split so each part keeps the class ratio
Split3 stratified_split(const std::size_t n_good, const std::size_t n_bad, const FilterConfig &c) {
    Split3 split;
    const auto assign = [&](const std::size_t count, const std::int64_t offset, const std::uint64_t stream) {
        const auto order = Rng{ c.seed, stream }.permutation(count);
        const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(count) * c.train_fraction));
        const auto n_val = std::min(count - n_train, static_cast<std::size_t>(std::llround(static_cast<double>(count) * c.val_fraction)));
        for (std::size_t i = 0; i < count; ++i) {
            auto &dst = i < n_train ? split.train : i < n_train + n_val ? split.val : split.test;
            dst.push_back(offset + static_cast<std::int64_t>(order[i]));
        }
    };
    assign(n_good, 0, 1);
    assign(n_bad, static_cast<std::int64_t>(n_good), 2);
    return split;
}

// Re-estimates batch-norm running statistics as a plain average over the
// training batches, with the weights fixed.
void recalibrate_batch_norm(FilterModel &model, const torch::Tensor &images, const std::vector<std::int64_t> &idx, const int batch_size) {
    std::vector<torch::nn::BatchNorm2dImpl *> layers;
    for (const auto &m : model.network().modules()) {
        if (auto *bn = dynamic_cast<torch::nn::BatchNorm2dImpl *>(m.get())) {
            layers.push_back(bn);
        }
    }
    std::vector<std::optional<double>> momentum;
    for (auto *bn : layers) {
        momentum.push_back(bn->options.momentum());
        bn->options.momentum(std::nullopt);
        bn->reset_running_stats();
    }
    const torch::NoGradGuard no_grad;
    model.network().train();
    for (std::size_t start = 0; start + 1 < idx.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t stop = std::min(idx.size(), start + static_cast<std::size_t>(batch_size));
        if (stop - start < 2) {
            break;
        }
        const std::vector<std::int64_t> batch(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(stop));
        (void)model.forward_logits(images.index_select(0, torch::tensor(batch, torch::kInt64)));
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i]->options.momentum(momentum[i]);
    }
    model.network().eval();
}

double accuracy(const FilterModel &model, const torch::Tensor &images, const torch::Tensor &labels, const std::vector<std::int64_t> &idx) {
    if (idx.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (std::size_t start = 0; start < idx.size(); start += 64) {
        const std::size_t stop = std::min(idx.size(), start + 64);
        const auto sel = torch::tensor(std::vector<std::int64_t>(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(stop)), torch::kInt64);
        const auto predicted = model.predict_batch(images.index_select(0, sel)).ge(model.threshold()).to(torch::kFloat32);
        correct += static_cast<std::size_t>(predicted.eq(labels.index_select(0, sel)).sum().item<std::int64_t>());
    }
    return static_cast<double>(correct) / static_cast<double>(idx.size());
}

}  // namespace

FilterModel train_filter(const Manifest &good, const Manifest &bad, const FilterConfig &config) {
    config.validate();
    if (good.empty() || bad.empty()) {
        throw InvalidArgument{ std::string{ "train_filter: the " } + (good.empty() ? "good" : "bad") + " class is empty" };
    }
    TrainingStats stats;
    const double ratio = static_cast<double>(std::max(good.size(), bad.size())) / static_cast<double>(std::min(good.size(), bad.size()));
    if (ratio > 10.0) {
        stats.warnings.push_back(fmt::format("class imbalance {:.1f}:1 (good {}, bad {})", ratio, good.size(), bad.size()));
    }

    const auto images = torch::cat({ load_tensor(good, filter_input_size), load_tensor(bad, filter_input_size) });
    const auto labels = torch::cat({ torch::ones({ static_cast<std::int64_t>(good.size()) }), torch::zeros({ static_cast<std::int64_t>(bad.size()) }) });
    const auto split = stratified_split(good.size(), bad.size(), config);

    FilterModel model{ config };
    auto &net = model.network();
    net.train();
    torch::optim::Adam optimizer{ net.parameters(), torch::optim::AdamOptions(config.learning_rate) };

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = Rng{ config.seed, static_cast<std::uint64_t>(epoch) }.permutation(split.train.size());
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<std::int64_t> batch_idx;
            for (std::size_t i = start; i < stop; ++i) {
                batch_idx.push_back(split.train[order[i]]);
            }
            if (batch_idx.size() < 2) {
                continue;  // batch norm needs two samples
            }
            const auto sel = torch::tensor(batch_idx, torch::kInt64);
            optimizer.zero_grad();
            const auto logits = model.forward_logits(images.index_select(0, sel));
            const auto loss = torch::binary_cross_entropy_with_logits(logits, labels.index_select(0, sel));
            loss.backward();
            optimizer.step();
        }
    }
    recalibrate_batch_norm(model, images, split.train, config.batch_size);

    stats.n_train = split.train.size();
    stats.n_val = split.val.size();
    stats.n_test = split.test.size();
    stats.train_acc = accuracy(model, images, labels, split.train);
    stats.val_acc = accuracy(model, images, labels, split.val);
    stats.test_acc = accuracy(model, images, labels, split.test);
    model.set_training_stats(std::move(stats));
    return model;
}

double predict(const FilterModel &model, const Image &image) {
    if (image.height() != filter_input_size || image.width() != filter_input_size) {
        throw ShapeError{ fmt::format("filter expects a {0}x{0}x3 image, got {1}x{2}x3", filter_input_size, image.height(), image.width()) };
    }
    return model.predict_batch(to_tensor(image).unsqueeze(0))[0].item<double>();
}

FilterOutcome filter_pool(const FilterModel &model, const Manifest &pool) {
    if (pool.empty()) {
        throw InvalidArgument{ "filter_pool: empty pool" };
    }
    FilterOutcome outcome{ pool.empty_like(), pool.empty_like(), {} };
    outcome.scores.reserve(pool.size());
    for (const auto &entry : pool.entries()) {
        const Image img = resize_bilinear(pool.load(entry), filter_input_size, filter_input_size);
        const double p = predict(model, img);
        outcome.scores.push_back(p);
        (p >= model.threshold() ? outcome.accepted : outcome.rejected).add(entry);
    }
    return outcome;
}

}  // namespace genaug::quality
