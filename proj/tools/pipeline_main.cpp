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

#include "genaug/dataset.hpp"
#include "genaug/error.hpp"
#include "genaug/pipeline/config.hpp"
#include "genaug/pipeline/steps.hpp"
#include "genaug/synthetic.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using namespace genaug;

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string workspace;
    bool quiet{ false };
};

void emit(const pipeline::StepResult &r) {
    const nlohmann::ordered_json j{ { "step", r.step }, { "artifacts", r.artifacts }, { "reused", r.reused }, { "directory", r.directory.string() } };
    std::cout << j.dump() << std::endl;
}

pipeline::PipelineConfig load(const RunOptions &o) {
    auto config = pipeline::PipelineConfig::load(o.config);
    if (o.seed) {
        config.set_seed(*o.seed);
    }
    if (!o.workspace.empty()) {
        config.workspace_dir = std::filesystem::absolute(o.workspace).lexically_normal();
    }
    return config;
}

pipeline::Logger logger(const RunOptions &o) {
    if (o.quiet) {
        return {};
    }
    return [](const std::string &line) { fmt::print(stderr, "{}\n", line); };
}

int fail(const std::string &kind, const std::string &message, const std::string &step) {
    const nlohmann::ordered_json j{ { "error", kind }, { "message", message }, { "step", step } };
    std::cerr << j.dump() << std::endl;
    return 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Generative augmentation pipeline: two-stage VAE, quality filter, evaluation." };
    app.require_subcommand(1);

    RunOptions run;
    std::string current_step;
    std::function<int()> action;

    // direct-mode options of ingest / augment
    std::string src, out, class_name, manifest_in;
    int size = 128;
    std::size_t target_count = 0;

    for (const auto &step : pipeline::step_names()) {
        auto *cmd = app.add_subcommand(step, "Run the '" + step + "' step");
        cmd->add_option("--config", run.config, "Pipeline config (JSON)");
        cmd->add_option("--seed", run.seed, "Override the run seed");
        cmd->add_option("--workspace", run.workspace, "Override the workspace directory");
        cmd->add_flag("--quiet", run.quiet, "No progress output");
        if (step == "ingest") {
            cmd->add_option("--class", class_name, "Direct mode: class label");
            cmd->add_option("--src", src, "Direct mode: source image directory");
            cmd->add_option("--size", size, "Direct mode: canonical size");
            cmd->add_option("--out", out, "Direct mode: output directory");
        }
        if (step == "augment") {
            cmd->add_option("--manifest", manifest_in, "Direct mode: input manifest");
            cmd->add_option("--out", out, "Direct mode: output manifest");
            cmd->add_option("--target-count", target_count, "Direct mode: entries kept after augmentation (0 = all)");
        }
        cmd->callback([&, step] {
            current_step = step;
            if (step == "ingest" && !src.empty()) {
                action = [&] {
                    const auto result = dataset::ingest(src, parse_class_label(class_name), size, size, out);
                    result.manifest.write(std::filesystem::path{ out } / (class_name + ".tsv"));
                    nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
                    for (const auto &s : result.skipped) {
                        skipped.push_back({ { "file", s.path.string() }, { "reason", s.reason } });
                    }
                    std::cout << nlohmann::ordered_json{ { "manifest", (std::filesystem::path{ out } / (class_name + ".tsv")).string() }, { "images", result.manifest.size() }, { "skipped", skipped } }.dump() << std::endl;
                    return 0;
                };
                return;
            }
            if (step == "augment" && !manifest_in.empty()) {
                action = [&] {
                    auto m = dataset::augment(Manifest::read(manifest_in));
                    if (target_count > 0) {
                        m = dataset::subsample(m, target_count, run.seed.value_or(0));
                    }
                    m.rebased(std::filesystem::absolute(out).parent_path()).write(out);
                    std::cout << nlohmann::ordered_json{ { "manifest", out }, { "entries", m.size() } }.dump() << std::endl;
                    return 0;
                };
                return;
            }
            if (run.config.empty()) {
                throw CLI::ValidationError{ "--config", "required" };
            }
            action = [&, step] {
                emit(pipeline::run_step(step, load(run), logger(run)));
                return 0;
            };
        });
    }

    auto *all = app.add_subcommand("run-all", "Run every step in order");
    all->add_option("--config", run.config, "Pipeline config (JSON)")->required();
    all->add_option("--seed", run.seed, "Override the run seed");
    all->add_option("--workspace", run.workspace, "Override the workspace directory");
    all->add_flag("--quiet", run.quiet, "No progress output");
    all->callback([&] {
        action = [&] {
            const auto config = load(run);
            for (const auto &step : pipeline::step_names()) {
                current_step = step;
                emit(pipeline::run_step(step, config, logger(run)));
            }
            return 0;
        };
    });

    std::string replay_dir;
    auto *rep = app.add_subcommand("replay", "Re-run a workspace's ledger, recomputing missing artifacts");
    rep->add_option("--workspace", replay_dir, "Workspace directory")->required();
    rep->add_flag("--quiet", run.quiet, "No progress output");
    rep->callback([&] {
        current_step = "replay";
        action = [&] {
            for (const auto &r : pipeline::replay(replay_dir, logger(run))) {
                emit(r);
            }
            return 0;
        };
    });

    synthetic::ToyCorpusSpec toy;
    std::string toy_out;
    auto *mk = app.add_subcommand("make-toy", "Write a synthetic 3-class corpus of coloured blobs");
    mk->add_option("--out", toy_out, "Output directory")->required();
    mk->add_option("--per-class", toy.per_class, "Images per class");
    mk->add_option("--size", toy.size, "Image size");
    mk->add_option("--seed", toy.seed, "Seed");
    mk->callback([&] {
        current_step = "make-toy";
        action = [&] {
            nlohmann::ordered_json dirs = nlohmann::ordered_json::object();
            for (const auto &[label, dir] : synthetic::write_toy_corpus(toy_out, toy)) {
                dirs[std::string{ to_string(label) }] = dir.string();
            }
            std::cout << dirs.dump() << std::endl;
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }
    try {
        return action();
    } catch (const Error &e) {
        return fail(e.kind(), e.what(), current_step);
    } catch (const std::exception &e) {
        return fail("internal", e.what(), current_step);
    }
}
