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

// Acceptance checks. Each criterion prints one line: "criterion N: PASS|FAIL <detail>".

#include "genaug/dataset.hpp"
#include "genaug/error.hpp"
#include "genaug/eval_harness.hpp"
#include "genaug/metrics.hpp"
#include "genaug/quality_filter.hpp"
#include "genaug/synthetic.hpp"
#include "genaug/tensor_io.hpp"
#include "genaug/vae.hpp"

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>
#include <torch/torch.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace genaug;
using genaug::testing::TempDir;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass{ true };
    std::string detail;

    void require(const bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

class Stopwatch {
  public:
    [[nodiscard]] double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

  private:
    std::chrono::steady_clock::time_point start_{ std::chrono::steady_clock::now() };
};

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in{ p, std::ios::binary };
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- 1: KL ----

Outcome kl_correctness() {
    Outcome o;
    const Stopwatch clock;
    constexpr int dim = 8;
    constexpr std::int64_t samples = 100000;
    Rng rng{ 101 };
    auto gen = at::detail::createCPUGenerator(202);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto mean = torch::empty({ 1, dim }, torch::kFloat64);
        auto log_var = torch::empty({ 1, dim }, torch::kFloat64);
        for (int j = 0; j < dim; ++j) {
            mean[0][j] = rng.uniform(-1.5, 1.5);
            log_var[0][j] = rng.uniform(-1.5, 1.5);
        }
        const double closed = vae::kl_divergence({ mean, log_var }).item<double>();
        // E_q[log q(z) - log p(z)] with z ~ q
        const auto eps = torch::randn({ samples, dim }, gen, torch::kFloat64);
        const auto z = mean + torch::exp(0.5 * log_var) * eps;
        const auto log_q = (-0.5 * log_var - 0.5 * eps.pow(2)).sum(1);
        const auto log_p = (-0.5 * z.pow(2)).sum(1);
        const double mc = (log_q - log_p).mean().item<double>();
        const double rel = std::abs(closed - mc) / std::abs(mc);
        worst = std::max(worst, rel);
    }
    o.require(worst < 0.01, fmt::format("max relative error {:.4g}", worst));
    const auto zeros = torch::zeros({ 3, dim });
    const auto at_prior = vae::kl_divergence({ zeros, zeros });
    o.require(torch::equal(at_prior, torch::zeros({ 3 })), "KL at the prior is not exactly 0");
    o.require(clock.seconds() < 10.0, fmt::format("took {:.1f}s", clock.seconds()));
    if (o.pass) {
        o.detail = fmt::format("20 params, max relative error {:.4g}, {:.2f}s", worst, clock.seconds());
    }
    return o;
}

// ---- 2: gradient check ----

Outcome gradient_check() {
    Outcome o;
    const Stopwatch clock;
    const auto r = genaug::testing::elbo_gradcheck(8, 2, 11);
    o.require(r.max_relative_error < 1e-3, fmt::format("max relative error {:.3g} at {} (analytic {:.6g}, numeric {:.6g})", r.max_relative_error, r.worst, r.worst_analytic, r.worst_numeric));
    o.require(r.parameters > 0 && r.elements > 0, "no parameters checked");
    o.require(clock.seconds() < 60.0, fmt::format("took {:.1f}s", clock.seconds()));
    if (o.pass) {
        o.detail = fmt::format("{} tensors, {} elements, max relative error {:.3g}, {:.1f}s", r.parameters, r.elements, r.max_relative_error, clock.seconds());
    }
    return o;
}

// ---- 3: FID ----

Outcome fid_cases() {
    Outcome o;
    const Stopwatch clock;
    Rng rng{ 303 };

    const metrics::FeatureSet a{ genaug::testing::gaussian_rows(400, 8, 0.3, rng), "test" };
    const double self = metrics::fid(a, a).score;
    o.require(std::abs(self) <= 1e-6, fmt::format("fid(A, A) = {:.3g}", self));

    const Eigen::VectorXd m0 = Eigen::VectorXd::Constant(1, 0.0);
    const Eigen::VectorXd m1 = Eigen::VectorXd::Constant(1, 1.0);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    const double d1 = metrics::fid_from_stats(m0, one, m1, one).score;
    o.require(std::abs(d1 - 1.0) <= 1e-6, fmt::format("1-D case gives {:.9f}", d1));

    double worst_oracle = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto x = genaug::testing::gaussian_rows(300, 8, 0.0, rng);
        const auto g = genaug::testing::gaussian_rows(300, 8, 0.5, rng);
        const double got = metrics::fid({ x, "test" }, { g, "test" }).score;
        worst_oracle = std::max(worst_oracle, std::abs(got - genaug::testing::fid_oracle(x, g)));
    }
    o.require(worst_oracle <= 1e-6, fmt::format("D=8 oracle gap {:.3g}", worst_oracle));

    double worst_sqrt = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = genaug::testing::random_psd(16, rng);
        const auto r = metrics::matrix_sqrt_psd(m).root;
        worst_sqrt = std::max(worst_sqrt, (r * r - m).norm() / m.norm());
    }
    o.require(worst_sqrt <= 1e-6, fmt::format("PSD sqrt relative error {:.3g}", worst_sqrt));
    o.require(clock.seconds() < 10.0, fmt::format("took {:.1f}s", clock.seconds()));
    if (o.pass) {
        o.detail = fmt::format("fid(A,A)={:.2g}, 1-D={:.9f}, oracle gap {:.2g}, sqrt error {:.2g}, {:.2f}s", self, d1, worst_oracle, worst_sqrt, clock.seconds());
    }
    return o;
}

// ---- 4: overfit ----

Outcome overfit_capacity() {
    Outcome o;
    const Stopwatch clock;
    Rng rng{ 404 };
    std::vector<Image> images;
    const auto &modes = synthetic::color_modes(ClassLabel::bag);
    for (int i = 0; i < 8; ++i) {
        images.push_back(synthetic::blob_image(32, modes[static_cast<std::size_t>(i) % modes.size()], rng));
    }
    const auto x = stack_images(images);

    vae::VaeStageConfig c;
    c.stage = 1;
    c.input_size = 32;
    c.latent_dim = 16;
    c.base_dim = 16;
    c.batch_size = 8;
    c.max_epochs = 500;
    c.learning_rate = 1e-3;
    c.mae_patience = 500;
    c.validation_fraction = 0.0;
    c.seed = 4;
    const auto ckpt = vae::train_stage(x, c);
    const vae::VaeModel model{ ckpt };
    const double mae = (vae::reconstruct_batch(x, model) - x).abs().mean().item<double>();
    const auto &log = ckpt.training_log;
    o.require(mae < 0.05, fmt::format("reconstruction MAE {:.4f}", mae));
    o.require(log.size() == 500, fmt::format("{} log entries", log.size()));
    if (log.size() == 500) {
        o.require(log.back().elbo < log.front().elbo, fmt::format("loss {:.4g} at epoch 500 vs {:.4g} at epoch 1", log.back().elbo, log.front().elbo));
    }
    o.require(clock.seconds() < 300.0, fmt::format("took {:.1f}s", clock.seconds()));
    if (o.pass) {
        o.detail = fmt::format("MAE {:.4f}, loss {:.4g} -> {:.4g}, {:.1f}s", mae, log.front().elbo, log.back().elbo, clock.seconds());
    }
    return o;
}

// ---- 5: two-stage protocol ----

std::vector<std::pair<std::string, torch::Tensor>> snapshot(const torch::nn::Module &m) {
    std::vector<std::pair<std::string, torch::Tensor>> out;
    for (const auto &item : m.named_parameters()) {
        out.emplace_back(item.key(), item.value().detach().clone());
    }
    for (const auto &item : m.named_buffers()) {
        out.emplace_back(item.key(), item.value().detach().clone());
    }
    return out;
}

bool bit_identical(const std::vector<std::pair<std::string, torch::Tensor>> &a, const std::vector<std::pair<std::string, torch::Tensor>> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first || !torch::equal(a[i].second, b[i].second)) {
            return false;
        }
    }
    return true;
}

Outcome two_stage_protocol() {
    Outcome o;
    Rng rng{ 505 };
    std::vector<Image> images;
    for (int i = 0; i < 48; ++i) {
        const auto &modes = synthetic::color_modes(ClassLabel::bag);
        images.push_back(synthetic::blob_image(16, modes[static_cast<std::size_t>(i) % modes.size()], rng));
    }
    const auto x = stack_images(images);

    vae::VaeStageConfig c1;
    c1.stage = 1;
    c1.input_size = 16;
    c1.latent_dim = 6;
    c1.base_dim = 8;
    c1.batch_size = 16;
    c1.max_epochs = 10;
    c1.learning_rate = 1e-3;
    c1.seed = 5;
    const auto ckpt1 = vae::train_stage(x, c1);
    const vae::VaeModel stage1{ ckpt1 };

    vae::VaeStageConfig c2;
    c2.stage = 2;
    c2.input_size = 6;
    c2.latent_dim = 6;
    c2.dense_dim = 32;
    c2.dense_layers = 2;
    c2.batch_size = 16;
    c2.max_epochs = 20;
    c2.learning_rate = 1e-3;
    c2.seed = 6;

    const auto before = snapshot(stage1.network());
    const auto ckpt2 = vae::train_stage2(stage1, x, c2);
    const auto after = snapshot(stage1.network());
    o.require(bit_identical(before, after), "stage-1 weights changed during stage-2 training");
    bool matches_checkpoint = ckpt1.weights.size() == before.size();
    for (std::size_t i = 0; matches_checkpoint && i < before.size(); ++i) {
        matches_checkpoint = torch::equal(ckpt1.weights[i].second, after[i].second);
    }
    o.require(matches_checkpoint, "stage-1 weights differ from the stage-1 checkpoint");

    const vae::VaeModel stage2{ ckpt2 };
    const auto g1 = vae::generate(16, stage1, stage2, 99);
    const auto g2 = vae::generate(16, stage1, stage2, 99);
    o.require(g1 == g2, "generate(seed) differs between calls");
    const TempDir tmp;
    ckpt1.save(tmp / "s1.gam");
    ckpt2.save(tmp / "s2.gam");
    const vae::VaeModel r1{ vae::VaeCheckpoint::load(tmp / "s1.gam") };
    const vae::VaeModel r2{ vae::VaeCheckpoint::load(tmp / "s2.gam") };
    o.require(vae::generate(16, r1, r2, 99) == g1, "generate(seed) differs after a checkpoint round-trip");
    o.require(vae::generate(16, stage1, stage2, 100) != g1, "different seeds give identical samples");
    if (o.pass) {
        o.detail = fmt::format("{} stage-1 tensors bit-identical, 16 samples bit-identical across calls and reloads", before.size());
    }
    return o;
}

// ---- 6: filter ----

Manifest brightness_set(const std::filesystem::path &dir, const bool bright, const int n, const std::uint64_t seed) {
    Rng rng{ seed };
    std::vector<Image> images;
    for (int i = 0; i < n; ++i) {
        images.push_back(synthetic::brightness_image(32, bright, rng));
    }
    return genaug::testing::write_manifest(dir, bright ? "bright" : "dark", images, ClassLabel::bag, Provenance::generated);
}

Outcome filter_behavior() {
    Outcome o;
    const Stopwatch clock;
    const TempDir tmp;
    quality::FilterConfig c;
    c.base_width = 4;
    c.epochs = 10;
    c.batch_size = 16;
    c.seed = 6;
    const auto model = quality::train_filter(brightness_set(tmp / "good", true, 40, 1), brightness_set(tmp / "bad", false, 40, 2), c);
    const double acc = model.training_stats().train_acc;
    o.require(acc >= 0.95, fmt::format("training accuracy {:.3f}", acc));

    Rng rng{ 606 };
    std::vector<Image> mixed;
    for (int i = 0; i < 30; ++i) {
        mixed.push_back(synthetic::brightness_image(32, i % 3 != 0, rng));
    }
    const auto pool = genaug::testing::write_manifest(tmp / "pool", "gen", mixed, ClassLabel::bag, Provenance::generated);
    const auto out = quality::filter_pool(model, pool);
    bool exact = out.accepted.size() + out.rejected.size() == pool.size();
    for (const auto &e : pool.entries()) {
        exact = exact && (out.accepted.contains(e.image_id) != out.rejected.contains(e.image_id));
    }
    o.require(exact, "accepted and rejected do not partition the pool");

    bool monotone = true;
    std::size_t previous = pool.size() + 1;
    for (const double t : { 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99 }) {
        const auto n = quality::filter_pool(model.with_threshold(t), pool).accepted.size();
        monotone = monotone && n <= previous;
        previous = n;
    }
    o.require(monotone, "accepted count grows with the threshold");
    o.require(clock.seconds() < 120.0, fmt::format("took {:.1f}s", clock.seconds()));
    if (o.pass) {
        o.detail = fmt::format("train acc {:.3f}, {} accepted / {} rejected, {:.1f}s", acc, out.accepted.size(), out.rejected.size(), clock.seconds());
    }
    return o;
}

// ---- 7: report arithmetic ----

std::vector<std::string> cells_of(const std::string &row) {
    std::vector<std::string> out;
    std::stringstream s{ row };
    std::string part;
    while (std::getline(s, part, '|')) {
        out.push_back(part);
    }
    return out;
}

std::string last_token(const std::string &cell) {
    std::stringstream s{ cell };
    std::string token;
    std::string last;
    while (s >> token) {
        last = token;
    }
    return last;
}

Outcome report_arithmetic() {
    Outcome o;
    const std::vector<std::string> classes{ "bag", "fish", "background" };
    Rng rng{ 707 };
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(1 + rng.below(120));
        std::vector<std::string> pred(n);
        std::vector<std::string> truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = classes[rng.below(3)];
            truth[i] = classes[rng.below(3)];
        }
        const auto report = metrics::classification_report(pred, truth, classes);
        const auto oracle = genaug::testing::confusion_oracle(pred, truth, classes);
        double p = 0.0;
        double r = 0.0;
        double f = 0.0;
        for (const auto &c : classes) {
            const auto &m = report.at(c);
            const auto &want = oracle.at(c);
            if (m.precision != want.precision || m.recall != want.recall || m.f1 != want.f1 || m.support != want.support) {
                ++mismatches;
            }
            p += want.precision;
            r += want.recall;
            f += want.f1;
        }
        if (report.macro_average.precision != p / 3.0 || report.macro_average.recall != r / 3.0 || report.macro_average.f1 != f / 3.0 || report.total_support != n) {
            ++mismatches;
        }
    }
    o.require(mismatches == 0, fmt::format("{} mismatches against the confusion-matrix oracle", mismatches));

    // 300 test images per class, three side-by-side columns
    std::vector<std::string> truth;
    std::vector<std::string> pred;
    for (const auto &c : classes) {
        for (int i = 0; i < 300; ++i) {
            truth.push_back(c);
            pred.push_back(classes[rng.below(3)]);
        }
    }
    const auto report = metrics::classification_report(pred, truth, classes);
    const auto text = metrics::render_side_by_side(eval::table_title(ClassLabel::bag), { "Real", "Generated", "Mixed" }, { report, report, report }, eval::display_names());
    std::stringstream lines{ text };
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        rows.push_back(line);
    }
    const std::vector<std::string> row_names{ "bag", "fish", "empty", "avg/tot" };
    std::size_t found = 0;
    std::size_t expected_row = 0;
    for (const auto &row : rows) {
        if (expected_row >= row_names.size() || row.rfind(row_names[expected_row], 0) != 0) {
            continue;
        }
        const auto cells = cells_of(row);
        const std::string support = expected_row == 3 ? "900" : "300";
        bool ok = cells.size() == 4;
        for (std::size_t i = 1; ok && i < cells.size(); ++i) {
            ok = last_token(cells[i]) == support;
        }
        o.require(ok, "row '" + row_names[expected_row] + "' lacks support " + support + " in every column");
        ++found;
        ++expected_row;
    }
    o.require(found == 4, fmt::format("found {} of 4 table rows in order", found));
    o.require(text.find("Plastic Bag") != std::string::npos, "title missing");
    o.require(text.find("Precision  Recall  F1 score  Support") != std::string::npos, "column header missing");
    if (o.pass) {
        o.detail = "50 random vectors exact; rows bag/fish/empty at 300, avg/tot at 900";
    }
    return o;
}

// ---- 8: end-to-end ----

struct CommandResult {
    int status{ -1 };
    std::string output;
};

CommandResult run_command(const std::string &command) {
    CommandResult r;
    FILE *pipe = popen((command + " 2>&1").c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buffer{};
    while (fgets(buffer.data(), static_cast<int>(buffer.size()), pipe) != nullptr) {
        r.output += buffer.data();
    }
    r.status = pclose(pipe);
    return r;
}

std::string last_json_line(const std::string &output) {
    std::stringstream s{ output };
    std::string line;
    std::string last;
    while (std::getline(s, line)) {
        if (!line.empty() && line.front() == '{' && line.find("\"artifacts\"") != std::string::npos) {
            last = line;
        }
    }
    return last;
}

std::map<std::string, std::string> directory_contents(const std::filesystem::path &dir) {
    std::map<std::string, std::string> out;
    for (const auto &e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out[std::filesystem::relative(e.path(), dir).string()] = read_file(e.path());
        }
    }
    return out;
}

Outcome end_to_end() {
    Outcome o;
    const Stopwatch clock;
    const TempDir tmp;
    const std::string bin = GENAUG_PIPELINE_BIN;

    const auto toy = run_command(fmt::format("'{}' make-toy --out '{}' --per-class 200 --size 32 --seed 8", bin, (tmp / "corpus").string()));
    if (toy.status != 0) {
        o.require(false, "make-toy failed: " + toy.output);
        return o;
    }
    const json config{
        { "workspace_dir", "ws" },
        { "seed", 8 },
        { "image_size", 32 },
        { "sources", { { "bag", "corpus/bag" }, { "fish", "corpus/fish" }, { "background", "corpus/background" } } },
        { "test_per_class", 50 },
        { "vae",
          { { "bag",
              { { "stage1", { { "input_size", 32 }, { "latent_dim", 8 }, { "base_dim", 16 }, { "batch_size", 32 }, { "max_epochs", 60 }, { "learning_rate", 1e-3 }, { "mae_patience", 20 } } },
                { "stage2", { { "input_size", 8 }, { "latent_dim", 8 }, { "dense_dim", 128 }, { "dense_layers", 2 }, { "batch_size", 32 }, { "max_epochs", 200 }, { "learning_rate", 1e-3 }, { "mae_patience", 40 } } } } } } },
        { "generate_count", 400 },
        { "fid_samples", 200 },
        { "labeling", { { "mode", "scripted" }, { "annotator", "script" } } },
        { "filter", { { "base_width", 8 }, { "epochs", 8 }, { "batch_size", 16 }, { "learning_rate", 1e-3 } } },
        { "experiment", { { "train_size", 300 }, { "test_size", 50 }, { "epochs", 30 }, { "batch_size", 100 } } },
    };
    std::ofstream{ tmp / "toy.json" } << config.dump(2);

    std::map<std::string, std::filesystem::path> dirs;
    for (const auto &step : { "ingest", "augment", "train-vae-1", "train-vae-2", "generate", "label-serve", "train-filter", "filter", "compose", "train-eval", "evaluate", "report" }) {
        const auto r = run_command(fmt::format("'{}' {} --config '{}' --quiet", bin, step, (tmp / "toy.json").string()));
        const auto line = last_json_line(r.output);
        if (r.status != 0 || line.empty()) {
            o.require(false, fmt::format("step {} failed: {}", step, r.output));
            return o;
        }
        dirs[step] = json::parse(line).at("directory").get<std::string>();
    }
    const double run_seconds = clock.seconds();

    // exact 4x augmentation of the non-held-out sources
    for (const std::string name : { "bag", "fish", "background" }) {
        const auto ingested = Manifest::read(dirs["ingest"] / (name + ".tsv"));
        const auto train = Manifest::read(dirs["augment"] / (name + ".train.tsv"));
        const auto test = Manifest::read(dirs["augment"] / (name + ".test.tsv"));
        o.require(train.size() == 4 * (ingested.size() - test.size()), fmt::format("{}: {} augmented from {} sources", name, train.size(), ingested.size() - test.size()));
    }

    const auto ws = tmp / "ws";
    std::size_t ledger_lines = 0;
    {
        std::ifstream in{ ws / "ledger.jsonl" };
        std::string line;
        while (std::getline(in, line)) {
            ++ledger_lines;
        }
    }
    o.require(ledger_lines == 12, fmt::format("ledger has {} entries", ledger_lines));

    const auto report_dir = dirs["report"];
    for (const auto *file : { "report.txt", "table1_fid.txt", "table1_fid.json", "table2_filter.txt", "table2_filter.json", "table3_comparison.txt", "table3_comparison.json", "config.json", "bundle.json" }) {
        o.require(std::filesystem::exists(report_dir / file) && std::filesystem::file_size(report_dir / file) > 0, std::string{ "bundle lacks " } + file);
    }
    const auto table3 = read_file(report_dir / "table3_comparison.txt");
    for (const auto *column : { "Real", "Generated", "Mixed" }) {
        o.require(table3.find(column) != std::string::npos, std::string{ "table 3 lacks column " } + column);
    }

    const auto original = directory_contents(report_dir);
    std::filesystem::remove_all(ws / "artifacts");
    const auto replayed = run_command(fmt::format("'{}' replay --workspace '{}' --quiet", bin, ws.string()));
    o.require(replayed.status == 0, "replay failed: " + replayed.output);
    const auto again = std::filesystem::exists(report_dir) ? directory_contents(report_dir) : std::map<std::string, std::string>{};
    o.require(!again.empty() && again == original, "replayed report bundle differs");

    o.require(run_seconds < 900.0, fmt::format("run took {:.0f}s", run_seconds));
    if (o.pass) {
        o.detail = fmt::format("12 steps in {:.0f}s, {} bundle files, replay byte-identical ({:.0f}s total)", run_seconds, original.size(), clock.seconds());
    }
    return o;
}

// ---- 9: directional claim ----

std::uint64_t derive(const std::uint64_t seed, const std::uint64_t stream) { return Rng{ seed, stream }.next(); }

struct DirectionalRun {
    double real_recall{ 0.0 };
    double mixed_recall{ 0.0 };
};

DirectionalRun directional_seed(const std::uint64_t seed) {
    const TempDir tmp;
    synthetic::ToyCorpusSpec toy;
    toy.size = 32;
    toy.per_class = 160;
    toy.seed = seed;
    const auto sources = synthetic::write_toy_corpus(tmp / "corpus", toy);

    std::map<ClassLabel, Manifest> train;
    std::map<ClassLabel, Manifest> test;
    std::uint64_t stream = 0;
    for (const auto &[label, dir] : sources) {
        const auto ingested = dataset::ingest(dir, label, 32, 32, tmp / "ingest" / std::string{ to_string(label) }).manifest;
        const auto split = dataset::assign_holdout(ingested, 40, derive(seed, ++stream));
        test[label] = split.filter([](const ManifestEntry &e) { return e.split == Split::test; });
        train[label] = dataset::augment(split.filter([](const ManifestEntry &e) { return e.split == Split::train; }));
    }

    // the generator sees every bag colour mode
    vae::VaeStageConfig c1;
    c1.stage = 1;
    c1.input_size = 32;
    c1.latent_dim = 8;
    c1.base_dim = 16;
    c1.batch_size = 32;
    c1.max_epochs = 60;
    c1.learning_rate = 1e-3;
    c1.mae_patience = 20;
    c1.seed = derive(seed, ++stream);
    const vae::VaeModel stage1{ vae::train_stage1(train[ClassLabel::bag], c1) };
    vae::VaeStageConfig c2;
    c2.stage = 2;
    c2.input_size = 8;
    c2.latent_dim = 8;
    c2.dense_dim = 128;
    c2.dense_layers = 2;
    c2.batch_size = 32;
    c2.max_epochs = 200;
    c2.learning_rate = 1e-3;
    c2.mae_patience = 40;
    c2.seed = derive(seed, ++stream);
    const vae::VaeModel stage2{ vae::train_stage2(stage1, load_tensor(train[ClassLabel::bag], 32), c2) };
    const auto samples = vae::generate(400, stage1, stage2, derive(seed, ++stream));
    const auto generated = genaug::testing::write_manifest(tmp / "generated", "gen", samples, ClassLabel::bag, Provenance::generated);

    // the real training set never shows the second bag mode
    const auto impoverished = train[ClassLabel::bag].filter([](const ManifestEntry &e) { return synthetic::mode_of(e.image_id) == 0; });

    constexpr std::size_t per_class = 200;
    const auto others = [&](Manifest bag_part) {
        std::vector<Manifest> parts{ std::move(bag_part) };
        parts.push_back(dataset::subsample(train[ClassLabel::fish], per_class, derive(seed, 100)));
        parts.push_back(dataset::subsample(train[ClassLabel::background], per_class, derive(seed, 101)));
        return concat(parts, tmp.path());
    };
    const auto real_set = others(dataset::compose(impoverished, generated, dataset::Composition::real, per_class, derive(seed, 102)));
    const auto mixed_set = others(dataset::compose(impoverished, generated, dataset::Composition::mixed, per_class, derive(seed, 102)));
    const auto test_set = concat({ test[ClassLabel::bag], test[ClassLabel::fish], test[ClassLabel::background] }, tmp.path());

    eval::ExperimentSpec spec;
    spec.trash_class = ClassLabel::bag;
    spec.epochs = 30;
    spec.batch_size = 100;
    spec.seed = derive(seed, 103);
    DirectionalRun run;
    run.real_recall = eval::evaluate(eval::train_eval_classifier(real_set, spec), test_set).macro_average.recall;
    spec.composition = dataset::Composition::mixed;
    run.mixed_recall = eval::evaluate(eval::train_eval_classifier(mixed_set, spec), test_set).macro_average.recall;
    return run;
}

Outcome directional_claim() {
    Outcome o;
    const Stopwatch clock;
    double gain = 0.0;
    std::string per_seed;
    for (const std::uint64_t seed : { 1, 2, 3 }) {
        const auto r = directional_seed(seed);
        gain += (r.mixed_recall - r.real_recall) / 3.0;
        per_seed += fmt::format("{}seed {}: real {:.3f} mixed {:.3f}", per_seed.empty() ? "" : ", ", seed, r.real_recall, r.mixed_recall);
    }
    o.require(gain * 100.0 >= 5.0, fmt::format("mean macro-recall gain {:.1f} points ({})", gain * 100.0, per_seed));
    if (o.pass) {
        o.detail = fmt::format("mean macro-recall gain {:.1f} points ({}), {:.0f}s", gain * 100.0, per_seed, clock.seconds());
    }
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Acceptance checks" };
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    torch::set_num_threads(1);
    const std::vector<std::function<Outcome()>> criteria{ kl_correctness, gradient_check, fid_cases, overfit_capacity, two_stage_protocol, filter_behavior, report_arithmetic, end_to_end, directional_claim };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (only != 0 && only != number) {
            continue;
        }
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string{ "exception: " } + e.what();
        }
        std::cout << fmt::format("criterion {}: {} {}", number, o.pass ? "PASS" : "FAIL", o.detail) << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
