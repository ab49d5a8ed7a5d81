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

#include "genaug/pipeline/steps.hpp"

#include "genaug/dataset.hpp"
#include "genaug/eval_harness.hpp"
#include "genaug/features.hpp"
#include "genaug/pipeline/label_service.hpp"
#include "genaug/pipeline/report.hpp"
#include "genaug/pipeline/workspace.hpp"
#include "genaug/quality_filter.hpp"
#include "genaug/rng.hpp"
#include "genaug/tensor_io.hpp"
#include "genaug/vae.hpp"

#include <fmt/format.h>

#include <chrono>
#include <map>

namespace genaug::pipeline {

namespace fs = std::filesystem;

namespace {

struct StepDef {
    std::string name;
    /// What the step produces, as named in missing-upstream errors.
    std::string product;
    std::vector<std::string> inputs;
};

const std::vector<StepDef> &defs() {
    static const std::vector<StepDef> table{
        { "ingest", "ingested images", {} },
        { "augment", "augmented dataset", { "ingest" } },
        { "train-vae-1", "stage-1 VAE", { "augment" } },
        { "train-vae-2", "stage-2 VAE", { "train-vae-1", "augment" } },
        { "generate", "generated pool", { "train-vae-2", "train-vae-1", "augment" } },
        { "label-serve", "labels", { "generate", "augment" } },
        { "train-filter", "filter model", { "label-serve" } },
        { "filter", "filtered pool", { "train-filter", "generate" } },
        { "compose", "composed datasets", { "filter", "augment" } },
        { "train-eval", "evaluation classifiers", { "compose" } },
        { "evaluate", "evaluation reports", { "train-eval", "compose" } },
        { "report", "report bundle", { "evaluate", "filter", "train-filter", "generate" } },
    };
    return table;
}

const StepDef &def(const std::string &step) {
    for (const auto &d : defs()) {
        if (d.name == step) {
            return d;
        }
    }
    throw InvalidArgument{ "unknown step '" + step + "'" };
}

std::uint64_t derive(const std::uint64_t seed, const std::uint64_t stream) { return Rng{ seed, stream }.next(); }

std::string name_of(const ClassLabel label) { return std::string{ to_string(label) }; }

void write_json(const fs::path &path, const nlohmann::ordered_json &j) { write_text_atomic(path, j.dump(2) + "\n"); }

nlohmann::ordered_json read_json(const fs::path &path) { return nlohmann::ordered_json::parse(read_text(path)); }

struct Ctx {
    const PipelineConfig &cfg;
    fs::path out;
    std::map<std::string, fs::path> in;
    Logger log;

    [[nodiscard]] const fs::path &input(const std::string &step) const { return in.at(step); }
    [[nodiscard]] Manifest manifest(const std::string &step, const std::string &file) const { return Manifest::read(input(step) / file); }
    void say(const std::string &message) const {
        if (log) {
            log(message);
        }
    }
};

vae::EpochCallback epoch_logger(const Ctx &ctx, const std::string &what, const int every) {
    return [&ctx, what, every](const vae::TrainingLogEntry &e) {
        if (e.epoch == 1 || e.epoch % every == 0) {
            ctx.say(fmt::format("{} epoch {}: loss {:.4f} (rec {:.4f}, kl {:.4f}) mae {:.4f}", what, e.epoch, e.elbo, e.reconstruction, e.kl, e.mae));
        }
    };
}

// ---- steps ----

void do_ingest(const Ctx &ctx) {
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto &[label, source] : ctx.cfg.sources) {
        const auto name = name_of(label);
        const auto result = dataset::ingest(source, label, ctx.cfg.image_size, ctx.cfg.image_size, ctx.out / name);
        result.manifest.write(ctx.out / (name + ".tsv"));
        nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
        for (const auto &s : result.skipped) {
            skipped.push_back({ { "file", s.path.filename().string() }, { "reason", s.reason } });
        }
        summary[name] = { { "images", result.manifest.size() }, { "skipped", skipped } };
        ctx.say(fmt::format("ingested {} {} images ({} skipped)", result.manifest.size(), name, result.skipped.size()));
    }
    write_json(ctx.out / "ingest.json", summary);
}

void do_augment(const Ctx &ctx) {
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto &[label, source] : ctx.cfg.sources) {
        const auto name = name_of(label);
        const auto all = ctx.manifest("ingest", name + ".tsv");
        // hold out whole source images so no flip of a test image is trained on
        const auto held = dataset::assign_holdout(all, ctx.cfg.test_per_class, derive(ctx.cfg.seed, 100 + static_cast<std::uint64_t>(label)));
        const auto train = held.filter([](const ManifestEntry &e) { return e.split == Split::train; });
        const auto test = held.filter([](const ManifestEntry &e) { return e.split == Split::test; });
        auto augmented = dataset::augment(train);
        if (ctx.cfg.augment_target > 0) {
            augmented = dataset::subsample(augmented, ctx.cfg.augment_target, derive(ctx.cfg.seed, 200 + static_cast<std::uint64_t>(label)));
        }
        augmented.write(ctx.out / (name + ".train.tsv"));
        test.write(ctx.out / (name + ".test.tsv"));
        summary[name] = { { "source_train", train.size() }, { "augmented_train", augmented.size() }, { "test", test.size() } };
        ctx.say(fmt::format("{}: {} train sources -> {} augmented, {} held out", name, train.size(), augmented.size(), test.size()));
    }
    write_json(ctx.out / "augment.json", summary);
}

void do_train_vae1(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto train = ctx.manifest("augment", name + ".train.tsv");
        const auto ckpt = vae::train_stage1(train, ctx.cfg.vae_for(label).stage1, epoch_logger(ctx, name + " stage 1", 25));
        ckpt.save(ctx.out / (name + ".stage1.gam"));
        ctx.say(fmt::format("{} stage 1 stopped after {} epochs", name, ckpt.training_log.size()));
    }
}

void do_train_vae2(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const vae::VaeModel stage1{ vae::VaeCheckpoint::load(ctx.input("train-vae-1") / (name + ".stage1.gam")) };
        const auto images = load_tensor(ctx.manifest("augment", name + ".train.tsv"), stage1.config().input_size);
        const auto ckpt = vae::train_stage2(stage1, images, ctx.cfg.vae_for(label).stage2, epoch_logger(ctx, name + " stage 2", 100));
        ckpt.save(ctx.out / (name + ".stage2.gam"));
        ctx.say(fmt::format("{} stage 2 stopped after {} epochs", name, ckpt.training_log.size()));
    }
}

void do_generate(const Ctx &ctx) {
    const auto extractor = metrics::make_extractor(ctx.cfg.feature_extractor);
    nlohmann::ordered_json fid = nlohmann::ordered_json::object();
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const vae::VaeModel stage1{ vae::VaeCheckpoint::load(ctx.input("train-vae-1") / (name + ".stage1.gam")) };
        const vae::VaeModel stage2{ vae::VaeCheckpoint::load(ctx.input("train-vae-2") / (name + ".stage2.gam")) };
        const int size = stage1.config().input_size;
        const auto real = ctx.manifest("augment", name + ".train.tsv");

        std::size_t n_fid = std::min(real.size(), ctx.cfg.generate_count);
        if (ctx.cfg.fid_samples > 0) {
            n_fid = std::min(n_fid, ctx.cfg.fid_samples);
        }
        const auto seed = derive(ctx.cfg.seed, 300 + static_cast<std::uint64_t>(label));

        fs::create_directories(ctx.out / name);
        Manifest pool{ ctx.out, ctx.cfg.image_size, ctx.cfg.image_size };
        std::vector<Image> two_stage;
        vae::generate(ctx.cfg.generate_count, stage1, stage2, seed, [&](const std::size_t i, const Image &img) {
            const fs::path file = fs::path{ name } / fmt::format("{}-gen-{:05d}.png", name, i);
            write_png(img, ctx.out / file);
            pool.add(ManifestEntry{ fmt::format("{}-gen-{:05d}", name, i), file, label, Provenance::generated, Split::train, Transform::identity() });
            if (two_stage.size() < n_fid) {
                two_stage.push_back(img);
            }
        });
        pool.write(ctx.out / (name + ".pool.tsv"));
        ctx.say(fmt::format("{}: generated {} images", name, pool.size()));

        const auto real_sub = dataset::subsample(real, n_fid, derive(seed, 1));
        const auto real_images = load_images(real_sub, size);
        const auto real_features = metrics::extract_features(real_images, *extractor);
        const auto stage1_only = vae::generate_stage1(n_fid, stage1, derive(seed, 2));
        const auto reconstructions = to_images(vae::reconstruct_batch(stack_images(real_images), stage1));

        const auto s1 = metrics::fid(real_features, metrics::extract_features(stage1_only, *extractor));
        const auto s2 = metrics::fid(real_features, metrics::extract_features(two_stage, *extractor));
        const auto rec = metrics::fid(real_features, metrics::extract_features(reconstructions, *extractor));
        fid[name] = { { "stage1", metrics::to_json(s1) }, { "stage2", metrics::to_json(s2) }, { "reconstruction", metrics::to_json(rec) } };
        ctx.say(fmt::format("{} FID: stage 1 {:.2f}, stage 2 {:.2f}, reconstruction {:.2f}", name, s1.score, s2.score, rec.score));
    }
    write_json(ctx.out / "fid.json", fid);
}

// nearest real image by mean absolute error, at the VAE resolution
struct NearestReal {
    torch::Tensor real;
    int size;

    [[nodiscard]] double score(const Image &img) const {
        const auto x = to_tensor(resize_bilinear(img, size, size)).reshape({ 1, -1 }).to(torch::kFloat64);
        return torch::cdist(x, real, 1).min().item<double>() / static_cast<double>(x.size(1));
    }
};

void do_label_serve(const Ctx &ctx, const Workspace &ws, const std::string &id) {
    std::map<ClassLabel, Manifest> pools;
    std::vector<Manifest> parts;
    for (const auto label : ctx.cfg.trash_classes()) {
        auto pool = ctx.manifest("generate", name_of(label) + ".pool.tsv");
        if (ctx.cfg.labeling.max_images > 0 && pool.size() > ctx.cfg.labeling.max_images) {
            Manifest head = pool.empty_like();
            for (std::size_t i = 0; i < ctx.cfg.labeling.max_images; ++i) {
                head.add(pool[i]);
            }
            pool = head;
        }
        parts.push_back(pool);
        pools.emplace(label, std::move(pool));
    }
    const Manifest combined = concat(parts, ctx.input("generate"));

    const bool scripted = ctx.cfg.labeling.mode == "scripted";
    // interactive labels live outside the artifact so an interrupted session resumes
    const fs::path store_path = scripted ? ctx.out / "labels.jsonl" : ws.dir() / "labels" / (id + ".jsonl");
    quality::LabelStore store{ store_path };
    LabelService service{ combined, store };

    if (scripted) {
        std::map<std::string, const NearestReal *> judge_of;
        std::map<ClassLabel, NearestReal> judges;
        std::map<ClassLabel, double> thresholds;
        for (const auto &[label, pool] : pools) {
            const int size = ctx.cfg.vae_for(label).stage1.input_size;
            const auto real = load_tensor(ctx.manifest("augment", name_of(label) + ".train.tsv"), size);
            auto &judge = judges.emplace(label, NearestReal{ real.reshape({ real.size(0), -1 }).to(torch::kFloat64), size }).first->second;
            std::vector<double> scores;
            for (const auto &e : pool.entries()) {
                scores.push_back(judge.score(pool.load(e)));
                judge_of[e.image_id] = &judge;
            }
            // good when at least as close to the real set as the pool median
            std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>((scores.size() - 1) / 2), scores.end());
            thresholds[label] = scores[(scores.size() - 1) / 2];
        }
        const int port = service.start("127.0.0.1", 0);
        const auto recorded = label_via_http("127.0.0.1", port, ctx.cfg.labeling.annotator, [&](const std::string &image_id, const Image &img) {
            const auto *judge = judge_of.at(image_id);
            const auto label = combined[*combined.find(image_id)].class_label;
            return judge->score(img) <= thresholds.at(label) ? quality::Verdict::good : quality::Verdict::bad;
        });
        service.stop();
        ctx.say(fmt::format("scripted labeling recorded {} verdicts", recorded));
    } else {
        const auto p = service.progress();
        if (p.remaining > 0) {
            const int port = service.start(ctx.cfg.labeling.host, ctx.cfg.labeling.port);
            ctx.say(fmt::format("labeling service on http://{}:{}/ ({} images to label)", ctx.cfg.labeling.host, port, p.remaining));
            service.wait_until_complete();
            service.stop();
        }
        fs::copy_file(store_path, ctx.out / "labels.jsonl", fs::copy_options::overwrite_existing);
    }

    const auto resolved = store.resolved();
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto &[label, pool] : pools) {
        const auto name = name_of(label);
        const auto verdict_is = [&](const quality::Verdict v) {
            return pool.filter([&](const ManifestEntry &e) {
                const auto it = resolved.find(e.image_id);
                return it != resolved.end() && it->second == v;
            });
        };
        const auto good = verdict_is(quality::Verdict::good);
        const auto bad = verdict_is(quality::Verdict::bad);
        good.rebased(ctx.out).write(ctx.out / (name + ".good.tsv"));
        bad.rebased(ctx.out).write(ctx.out / (name + ".bad.tsv"));
        summary[name] = { { "labeled_good", good.size() }, { "labeled_bad", bad.size() }, { "remaining", pool.size() - good.size() - bad.size() } };
        ctx.say(fmt::format("{}: {} good, {} bad", name, good.size(), bad.size()));
    }
    summary["mode"] = ctx.cfg.labeling.mode;
    write_json(ctx.out / "labels.json", summary);
}

void do_train_filter(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto model = quality::train_filter(ctx.manifest("label-serve", name + ".good.tsv"), ctx.manifest("label-serve", name + ".bad.tsv"), ctx.cfg.filter);
        model.save(ctx.out / (name + ".filter.gam"));
        write_json(ctx.out / (name + ".filter.json"), model.training_stats().to_json());
        const auto &s = model.training_stats();
        ctx.say(fmt::format("{} filter: train {:.3f}, val {:.3f}, test {:.3f}", name, s.train_acc, s.val_acc, s.test_acc));
        for (const auto &w : s.warnings) {
            ctx.say("warning: " + w);
        }
    }
}

void do_filter(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto model = quality::FilterModel::load(ctx.input("train-filter") / (name + ".filter.gam"));
        const auto pool = ctx.manifest("generate", name + ".pool.tsv");
        const auto outcome = quality::filter_pool(model, pool);
        outcome.accepted.rebased(ctx.out).write(ctx.out / (name + ".accepted.tsv"));
        outcome.rejected.rebased(ctx.out).write(ctx.out / (name + ".rejected.tsv"));
        write_json(ctx.out / (name + ".filter-summary.json"), { { "pool", pool.size() }, { "accepted", outcome.accepted.size() }, { "rejected", outcome.rejected.size() }, { "threshold", model.threshold() } });
        ctx.say(fmt::format("{}: {} of {} generated images passed the filter", name, outcome.accepted.size(), pool.size()));
    }
}

void do_compose(const Ctx &ctx) {
    const auto &exp = ctx.cfg.experiment;
    const std::size_t per_class = exp.train_size / 3;
    const auto fish = ctx.manifest("augment", "fish.train.tsv");
    const auto background = ctx.manifest("augment", "background.train.tsv");
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto seed = derive(ctx.cfg.seed, 400 + static_cast<std::uint64_t>(label));
        std::vector<Manifest> test_parts;
        std::uint64_t stream = 0;
        for (const auto part : { label, ClassLabel::fish, ClassLabel::background }) {
            test_parts.push_back(dataset::subsample(ctx.manifest("augment", name_of(part) + ".test.tsv"), exp.test_size, derive(seed, ++stream)));
        }
        const auto test = concat(test_parts, ctx.out);
        test.write(ctx.out / (name + ".test.tsv"));

        const auto real = ctx.manifest("augment", name + ".train.tsv");
        const auto generated = ctx.manifest("filter", name + ".accepted.tsv");
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        for (const auto composition : ctx.cfg.compositions) {
            const auto comp = std::string{ dataset::to_string(composition) };
            const auto trash = dataset::compose(real, generated, composition, per_class, derive(seed, 10));
            const auto train = concat({ trash, dataset::subsample(fish, per_class, derive(seed, 11)), dataset::subsample(background, per_class, derive(seed, 12)) }, ctx.out);
            train.write(ctx.out / (name + "." + comp + ".train.tsv"));
            std::size_t n_generated = 0;
            for (const auto &e : train.entries()) {
                n_generated += e.provenance == Provenance::generated ? 1 : 0;
            }
            counts[comp] = { { "train", train.size() }, { "generated", n_generated } };
        }
        summary[name] = { { "test", test.size() }, { "compositions", counts } };
    }
    write_json(ctx.out / "compose.json", summary);
}

void do_train_eval(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto test = ctx.manifest("compose", name + ".test.tsv");
        for (const auto composition : ctx.cfg.compositions) {
            const auto comp = std::string{ dataset::to_string(composition) };
            const auto train = ctx.manifest("compose", name + "." + comp + ".train.tsv");
            eval::check_disjoint(train, test);
            auto spec = ctx.cfg.experiment;
            spec.trash_class = label;
            spec.composition = composition;
            const auto model = eval::train_eval_classifier(train, spec);
            model.save(ctx.out / (name + "." + comp + ".eval.gam"));
            ctx.say(fmt::format("trained {} / {} classifier", name, comp));
        }
    }
}

void do_evaluate(const Ctx &ctx) {
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        const auto test = ctx.manifest("compose", name + ".test.tsv");
        eval::ComparisonTable table;
        table.trash_class = label;
        for (const auto composition : ctx.cfg.compositions) {
            const auto comp = std::string{ dataset::to_string(composition) };
            const auto model = eval::EvalModel::load(ctx.input("train-eval") / (name + "." + comp + ".eval.gam"));
            auto spec = ctx.cfg.experiment;
            spec.trash_class = label;
            spec.composition = composition;
            table.compositions.push_back(composition);
            table.specs.push_back(spec);
            table.reports.push_back(eval::evaluate(model, test));
        }
        write_json(ctx.out / (name + ".comparison.json"), table.to_json());
        write_text_atomic(ctx.out / (name + ".comparison.txt"), table.render());
        ctx.say("\n" + table.render());
    }
}

void do_report(const Ctx &ctx) {
    ReportInputs inputs;
    inputs.config = ctx.cfg;
    for (const auto label : ctx.cfg.trash_classes()) {
        const auto name = name_of(label);
        inputs.trash_classes.push_back(label);
        inputs.fid[label] = read_json(ctx.input("generate") / "fid.json").at(name);
        inputs.filter_stats[label] = read_json(ctx.input("train-filter") / (name + ".filter.json"));
        inputs.filter_counts[label] = read_json(ctx.input("filter") / (name + ".filter-summary.json"));
        inputs.comparisons[label] = read_json(ctx.input("evaluate") / (name + ".comparison.json"));
        inputs.comparison_text[label] = read_text(ctx.input("evaluate") / (name + ".comparison.txt"));
    }
    write_report_bundle(inputs, ctx.out);
}

}  // namespace

const std::vector<std::string> &step_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto &d : defs()) {
            out.push_back(d.name);
        }
        return out;
    }();
    return names;
}

namespace {

std::string id_for(const std::string &step, const std::string &config_hash) {
    const auto &d = def(step);
    std::string key = step + "\n" + config_hash;
    for (const auto &input : d.inputs) {
        key += "\n" + id_for(input, config_hash);
    }
    return sha256_hex(key).substr(0, 16);
}

}  // namespace

std::string artifact_id(const std::string &step, const PipelineConfig &config) { return id_for(step, config.hash()); }

StepResult run_step(const std::string &step, const PipelineConfig &config, const Logger &log) {
    const auto &d = def(step);
    config.validate();
    torch::set_num_threads(1);
    const auto hash = config.hash();
    const auto id = id_for(step, hash);

    Workspace ws{ config.workspace_dir };
    StepResult result{ step, { id }, false, ws.artifact_dir(id) };
    const bool recorded = ws.ledger().producer_of(id).has_value();
    if (recorded && ws.has_artifact(id)) {
        result.reused = true;
        return result;
    }

    Ctx ctx{ config, {}, {}, log };
    std::vector<std::string> input_ids;
    for (const auto &input : d.inputs) {
        const auto input_id = id_for(input, hash);
        if (!ws.ledger().producer_of(input_id) || !ws.has_artifact(input_id)) {
            throw MissingUpstream{ def(input).product, input };
        }
        ctx.in[input] = ws.artifact_dir(input_id);
        input_ids.push_back(input_id);
    }

    ws.save_config(hash, config.to_json());
    ctx.out = ws.begin_artifact(id);
    const auto started = std::chrono::steady_clock::now();
    try {
        if (step == "ingest") {
            do_ingest(ctx);
        } else if (step == "augment") {
            do_augment(ctx);
        } else if (step == "train-vae-1") {
            do_train_vae1(ctx);
        } else if (step == "train-vae-2") {
            do_train_vae2(ctx);
        } else if (step == "generate") {
            do_generate(ctx);
        } else if (step == "label-serve") {
            do_label_serve(ctx, ws, id);
        } else if (step == "train-filter") {
            do_train_filter(ctx);
        } else if (step == "filter") {
            do_filter(ctx);
        } else if (step == "compose") {
            do_compose(ctx);
        } else if (step == "train-eval") {
            do_train_eval(ctx);
        } else if (step == "evaluate") {
            do_evaluate(ctx);
        } else {
            do_report(ctx);
        }
        write_json(ctx.out / "artifact.json", { { "id", id }, { "step", step }, { "config_hash", hash }, { "seed", config.seed }, { "inputs", input_ids } });
    } catch (...) {
        fs::remove_all(ctx.out);
        throw;
    }
    ws.commit_artifact(ctx.out, id);
    if (!recorded) {
        ws.ledger().append({ step, input_ids, { id }, hash, utc_timestamp() });
    }
    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ctx.say(fmt::format("{} done in {:.1f}s -> {}", step, seconds, id));
    return result;
}

std::vector<StepResult> replay(const fs::path &workspace_dir, const Logger &log) {
    const RunLedger ledger{ workspace_dir / "ledger.jsonl" };
    if (ledger.entries().empty()) {
        throw InvalidArgument{ "nothing to replay: the ledger of " + workspace_dir.string() + " is empty" };
    }
    std::vector<StepResult> results;
    for (const auto &entry : ledger.entries()) {
        auto j = nlohmann::json::parse(read_text(workspace_dir / "configs" / (entry.config_hash + ".json")));
        auto config = PipelineConfig::from_json(j, "/");
        config.workspace_dir = workspace_dir;
        if (config.hash() != entry.config_hash) {
            throw Error{ "recorded config " + entry.config_hash + " no longer hashes to itself", "ledger_corrupt" };
        }
        results.push_back(run_step(entry.step, config, log));
    }
    return results;
}

}  // namespace genaug::pipeline
