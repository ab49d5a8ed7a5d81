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

#include "genaug/eval_harness.hpp"

#include "genaug/error.hpp"
#include "genaug/model_file.hpp"
#include "genaug/rng.hpp"
#include "genaug/tensor_io.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <set>

namespace genaug::eval {

namespace nn = torch::nn;

void ClassifierConfig::validate() const {
    if (conv1_channels < 1 || conv2_channels < 1 || dense_dim < 1 || kernel_size < 1 || kernel_size % 2 == 0) {
        throw InvalidArgument{ "classifier channel counts and dense width must be >= 1, kernel size odd" };
    }
    if (!(dropout >= 0.0 && dropout < 1.0) || !(learning_rate > 0.0)) {
        throw InvalidArgument{ "classifier dropout must lie in [0, 1) and learning_rate be positive" };
    }
}

nlohmann::ordered_json ClassifierConfig::to_json() const {
    return { { "conv1_channels", conv1_channels }, { "conv2_channels", conv2_channels }, { "kernel_size", kernel_size }, { "dense_dim", dense_dim }, { "dropout", dropout }, { "learning_rate", learning_rate } };
}

ClassifierConfig ClassifierConfig::from_json(const nlohmann::json &j) {
    ClassifierConfig c;
    const auto read = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    read("conv1_channels", c.conv1_channels);
    read("conv2_channels", c.conv2_channels);
    read("kernel_size", c.kernel_size);
    read("dense_dim", c.dense_dim);
    read("dropout", c.dropout);
    read("learning_rate", c.learning_rate);
    c.validate();
    return c;
}

void ExperimentSpec::validate() const {
    if (trash_class != ClassLabel::bag && trash_class != ClassLabel::bottle) {
        throw InvalidArgument{ "trash_class must be bag or bottle" };
    }
    if (train_size < 3 || test_size < 1 || epochs < 1 || batch_size < 1) {
        throw InvalidArgument{ "train_size must be >= 3; test_size, epochs and batch_size >= 1" };
    }
    network.validate();
}

nlohmann::ordered_json ExperimentSpec::to_json() const {
    return { { "trash_class", to_string(trash_class) }, { "composition", dataset::to_string(composition) }, { "train_size", train_size }, { "test_size", test_size }, { "epochs", epochs }, { "batch_size", batch_size }, { "seed", seed }, { "network", network.to_json() } };
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json &j) {
    ExperimentSpec s;
    if (j.contains("trash_class")) {
        s.trash_class = parse_class_label(j.at("trash_class").get<std::string>());
    }
    if (j.contains("composition")) {
        s.composition = dataset::parse_composition(j.at("composition").get<std::string>());
    }
    const auto read = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    read("train_size", s.train_size);
    read("test_size", s.test_size);
    read("epochs", s.epochs);
    read("batch_size", s.batch_size);
    read("seed", s.seed);
    if (j.contains("network")) {
        s.network = ClassifierConfig::from_json(j.at("network"));
    }
    s.validate();
    return s;
}

std::vector<std::string> eval_classes(const ClassLabel trash_class) {
    return { std::string{ to_string(trash_class) }, std::string{ to_string(ClassLabel::fish) }, std::string{ to_string(ClassLabel::background) } };
}

const std::map<std::string, std::string> &display_names() {
    static const std::map<std::string, std::string> names{ { "background", "empty" } };
    return names;
}

std::string table_title(const ClassLabel trash_class) { return trash_class == ClassLabel::bottle ? "Plastic Bottle" : "Plastic Bag"; }

// ---- model ----

struct EvalModel::Net : nn::Module {
    explicit Net(const ClassifierConfig &c) :
        conv1{ register_module("conv1", nn::Conv2d{ nn::Conv2dOptions(3, c.conv1_channels, c.kernel_size).padding(c.kernel_size / 2) }) },
        conv2{ register_module("conv2", nn::Conv2d{ nn::Conv2dOptions(c.conv1_channels, c.conv2_channels, c.kernel_size).padding(c.kernel_size / 2) }) },
        dense{ register_module("dense", nn::Linear{ static_cast<std::int64_t>(c.conv2_channels) * (eval_input_size / 4) * (eval_input_size / 4), c.dense_dim }) },
        dropout{ register_module("dropout", nn::Dropout{ c.dropout }) },
        out{ register_module("out", nn::Linear{ c.dense_dim, 3 }) } {}

    torch::Tensor forward(const torch::Tensor &x) {
        auto h = torch::max_pool2d(torch::relu(conv1(x)), 2);
        h = torch::max_pool2d(torch::relu(conv2(h)), 2);
        h = dropout(torch::relu(dense(h.flatten(1))));
        return out(h);
    }

    nn::Conv2d conv1;
    nn::Conv2d conv2;
    nn::Linear dense;
    nn::Dropout dropout;
    nn::Linear out;
};

EvalModel::EvalModel(std::vector<std::string> classes, ClassifierConfig config, const std::uint64_t seed) :
    classes_{ std::move(classes) },
    config_{ config },
    seed_{ seed } {
    if (classes_.size() != 3) {
        throw InvalidArgument{ fmt::format("the evaluation classifier has exactly 3 classes, got {}", classes_.size()) };
    }
    config_.validate();
    torch::manual_seed(seed_);
    net_ = std::make_shared<Net>(config_);
    net_->eval();
}

torch::nn::Module &EvalModel::network() { return *net_; }

torch::Tensor EvalModel::forward_logits(const torch::Tensor &x) { return net_->forward(x); }

torch::Tensor EvalModel::predict_proba(const torch::Tensor &x) const {
    if (x.dim() != 4 || x.size(1) != 3 || x.size(2) != eval_input_size || x.size(3) != eval_input_size) {
        throw ShapeError{ fmt::format("classifier expects [B, 3, {0}, {0}], got {1}", eval_input_size, c10::str(x.sizes())) };
    }
    const torch::NoGradGuard no_grad;
    return torch::softmax(net_->forward(x.to(torch::kFloat32)), 1);
}

std::vector<std::string> EvalModel::predict(const Manifest &manifest) const {
    std::vector<std::string> labels;
    labels.reserve(manifest.size());
    if (manifest.empty()) {
        return labels;
    }
    const auto x = load_tensor(manifest, eval_input_size);
    for (std::int64_t start = 0; start < x.size(0); start += 256) {
        const auto idx = predict_proba(x.slice(0, start, std::min<std::int64_t>(x.size(0), start + 256))).argmax(1);
        for (std::int64_t i = 0; i < idx.size(0); ++i) {
            labels.push_back(classes_[static_cast<std::size_t>(idx[i].item<std::int64_t>())]);
        }
    }
    return labels;
}

void EvalModel::save(const std::filesystem::path &path) const {
    ModelFile file;
    file.kind = "eval-classifier";
    file.meta["input_shape"] = input_shape;
    file.meta["classes"] = classes_;
    file.meta["seed"] = seed_;
    file.meta["config"] = config_.to_json();
    file.tensors = module_state(*net_);
    save_model_file(file, path);
}

EvalModel EvalModel::load(const std::filesystem::path &path) {
    const ModelFile file = load_model_file(path, "eval-classifier");
    if (file.meta.at("input_shape").get<std::array<int, 3>>() != input_shape) {
        throw ShapeError{ path.string() + ": classifier input shape must be 32x32x3" };
    }
    EvalModel model{ file.meta.at("classes").get<std::vector<std::string>>(), ClassifierConfig::from_json(file.meta.at("config")), file.meta.at("seed").get<std::uint64_t>() };
    load_module_state(*model.net_, file.tensors);
    model.net_->eval();
    return model;
}

// ---- protocol ----

void check_disjoint(const Manifest &train, const Manifest &test) {
    for (const auto &e : test.entries()) {
        if (train.contains(e.image_id)) {
            throw InvalidArgument{ "image '" + e.image_id + "' appears in both the training and the test manifest" };
        }
    }
}

EvalModel train_eval_classifier(const Manifest &train, const ExperimentSpec &spec) {
    spec.validate();
    const auto classes = eval_classes(spec.trash_class);
    std::vector<std::int64_t> targets;
    targets.reserve(train.size());
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto &e : train.entries()) {
        const auto it = std::find(classes.begin(), classes.end(), to_string(e.class_label));
        if (it == classes.end()) {
            throw InvalidArgument{ fmt::format("training entry '{}' has class '{}', expected one of {}", e.image_id, to_string(e.class_label), fmt::join(classes, ", ")) };
        }
        const auto k = static_cast<std::size_t>(it - classes.begin());
        ++counts[k];
        targets.push_back(static_cast<std::int64_t>(k));
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        if (counts[k] == 0) {
            throw InvalidArgument{ "training manifest has no entries of class '" + classes[k] + "'" };
        }
    }

    const auto x = load_tensor(train, eval_input_size);
    const auto y = torch::tensor(targets, torch::kInt64);
    EvalModel model{ classes, spec.network, spec.seed };
    auto &net = model.network();
    net.train();
    torch::optim::Adam optimizer{ net.parameters(), torch::optim::AdamOptions(spec.network.learning_rate) };
    const auto batch = static_cast<std::size_t>(spec.batch_size);
    for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
        const auto order = Rng{ spec.seed, static_cast<std::uint64_t>(epoch) }.permutation(train.size());
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            const auto sel = torch::tensor(std::vector<std::int64_t>(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(stop)), torch::kInt64);
            optimizer.zero_grad();
            const auto loss = torch::cross_entropy_loss(model.forward_logits(x.index_select(0, sel)), y.index_select(0, sel));
            loss.backward();
            optimizer.step();
        }
    }
    net.eval();
    return model;
}

metrics::ClassificationReport evaluate(const EvalModel &model, const Manifest &test) {
    if (test.empty()) {
        throw InvalidArgument{ "evaluate: empty test manifest" };
    }
    std::vector<std::string> truths;
    truths.reserve(test.size());
    for (const auto &e : test.entries()) {
        if (e.provenance != Provenance::real) {
            throw InvalidArgument{ "evaluate: test entry '" + e.image_id + "' is generated; test images must be real" };
        }
        const std::string label{ to_string(e.class_label) };
        if (std::find(model.classes().begin(), model.classes().end(), label) == model.classes().end()) {
            throw InvalidArgument{ "evaluate: test entry '" + e.image_id + "' has class '" + label + "' unknown to the model" };
        }
        truths.push_back(label);
    }
    const auto predictions = model.predict(test);
    return metrics::classification_report(predictions, truths, model.classes());
}

nlohmann::ordered_json ComparisonTable::to_json() const {
    nlohmann::ordered_json columns = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        columns.push_back({ { "composition", dataset::to_string(compositions[i]) }, { "spec", specs[i].to_json() }, { "report", metrics::to_json(reports[i]) } });
    }
    return { { "trash_class", to_string(trash_class) }, { "columns", columns } };
}

std::string ComparisonTable::render() const {
    std::vector<std::string> titles;
    for (const auto c : compositions) {
        const auto name = dataset::to_string(c);
        titles.push_back(name == "real" ? "Real" : name == "generated" ? "Generated" : "Mixed");
    }
    return metrics::render_side_by_side(table_title(trash_class), titles, reports, display_names());
}

ComparisonTable run_comparison(const std::vector<ComparisonRun> &runs) {
    if (runs.empty()) {
        throw InvalidArgument{ "run_comparison: no experiments" };
    }
    ComparisonTable table;
    table.trash_class = runs.front().spec.trash_class;
    for (const auto &run : runs) {
        if (run.spec.trash_class != table.trash_class) {
            throw InvalidArgument{ "run_comparison: experiments disagree on the trash class" };
        }
        if (!(run.test == runs.front().test)) {
            throw InvalidArgument{ "run_comparison: experiments use different test manifests" };
        }
        check_disjoint(run.train, run.test);
    }
    for (const auto &run : runs) {
        const auto model = train_eval_classifier(run.train, run.spec);
        table.compositions.push_back(run.spec.composition);
        table.specs.push_back(run.spec);
        table.reports.push_back(evaluate(model, run.test));
    }
    return table;
}

}  // namespace genaug::eval
