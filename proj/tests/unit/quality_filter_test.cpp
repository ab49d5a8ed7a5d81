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

#include "genaug/error.hpp"
#include "genaug/quality_filter.hpp"
#include "genaug/synthetic.hpp"
#include "genaug/tensor_io.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>
#include <thread>

using namespace genaug;
using namespace genaug::quality;
using genaug::testing::TempDir;

namespace {

LabelRecord rec(std::string id, Verdict v, std::string who, std::int64_t at) { return { std::move(id), v, std::move(who), at }; }

Manifest brightness_set(const std::filesystem::path &dir, const bool bright, const int n, const std::uint64_t seed, const int size = 32) {
    Rng rng{ seed };
    std::vector<Image> images;
    for (int i = 0; i < n; ++i) {
        images.push_back(synthetic::brightness_image(size, bright, rng));
    }
    return genaug::testing::write_manifest(dir, bright ? "bright" : "dark", images, ClassLabel::bag, Provenance::generated);
}

FilterConfig quick_config() {
    FilterConfig c;
    c.base_width = 4;
    c.epochs = 3;
    c.batch_size = 16;
    c.seed = 5;
    return c;
}

// forces p(good) to a constant by zeroing the head weights
void set_constant_output(FilterModel &model, const float bias) {
    const torch::NoGradGuard no_grad;
    for (auto &item : model.network().named_parameters()) {
        if (item.key() == "head.weight") {
            item.value().zero_();
        } else if (item.key() == "head.bias") {
            item.value().fill_(bias);
        }
    }
}

}  // namespace

TEST_SUITE("quality_filter") {

TEST_CASE("verdict parsing") {
    CHECK(parse_verdict("good") == Verdict::good);
    CHECK(parse_verdict("bad") == Verdict::bad);
    CHECK_THROWS_AS((void)parse_verdict("meh"), InvalidArgument);
    CHECK_THROWS_AS((void)parse_verdict("Good"), InvalidArgument);
}

TEST_CASE("label record json round-trip") {
    const auto r = rec("img-1", Verdict::bad, "alice", 1234);
    CHECK(LabelRecord::from_json(r.to_json()) == r);
}

TEST_CASE("resolve_labels: latest per annotator, then majority, then newest") {
    std::vector<LabelRecord> records{
        rec("a", Verdict::good, "alice", 1),
        rec("a", Verdict::bad, "alice", 5),  // alice changes her mind
        rec("a", Verdict::bad, "bob", 2),
        rec("a", Verdict::good, "carol", 3),
        rec("b", Verdict::good, "alice", 1),
        rec("b", Verdict::bad, "bob", 7),  // tie, bob is newer
        rec("c", Verdict::good, "alice", 9),
        rec("c", Verdict::bad, "bob", 4),  // tie, alice is newer
    };
    const auto resolved = resolve_labels(records);
    CHECK(resolved.at("a") == Verdict::bad);
    CHECK(resolved.at("b") == Verdict::bad);
    CHECK(resolved.at("c") == Verdict::good);
    CHECK(resolved.size() == 3);
}

TEST_CASE("label store appends, reloads and ignores identical re-posts") {
    TempDir tmp;
    const auto path = tmp / "labels.jsonl";
    {
        LabelStore store{ path };
        CHECK(store.append(rec("x", Verdict::good, "alice", 1)) == LabelStore::AppendResult::recorded);
        CHECK(store.append(rec("x", Verdict::good, "alice", 2)) == LabelStore::AppendResult::duplicate);
        CHECK(store.append(rec("x", Verdict::good, "bob", 3)) == LabelStore::AppendResult::recorded);
        CHECK(store.append(rec("x", Verdict::bad, "alice", 4)) == LabelStore::AppendResult::recorded);
        CHECK(store.size() == 3);
    }
    LabelStore reloaded{ path };
    CHECK(reloaded.size() == 3);
    CHECK(reloaded.records()[2] == rec("x", Verdict::bad, "alice", 4));
    CHECK(reloaded.append(rec("x", Verdict::bad, "alice", 9)) == LabelStore::AppendResult::duplicate);
    // alice: bad, bob: good -> tie resolved by the newest (alice at 4)
    CHECK(reloaded.resolved().at("x") == Verdict::bad);
}

TEST_CASE("concurrent appends never tear lines") {
    TempDir tmp;
    const auto path = tmp / "labels.jsonl";
    LabelStore store{ path };
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&store, t] {
            for (int i = 0; i < 50; ++i) {
                (void)store.append(rec("img-" + std::to_string(t) + "-" + std::to_string(i), i % 2 == 0 ? Verdict::good : Verdict::bad, "w" + std::to_string(t), i));
            }
        });
    }
    for (auto &th : threads) {
        th.join();
    }
    CHECK(store.size() == 400);
    std::ifstream in{ path };
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        CHECK_NOTHROW((void)LabelRecord::from_json(nlohmann::json::parse(line)));
        ++lines;
    }
    CHECK(lines == 400);
}

TEST_CASE("filter config validation") {
    FilterConfig c;
    CHECK_NOTHROW(c.validate());
    c.threshold = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.threshold = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = FilterConfig{};
    c.architecture = "vgg";
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(FilterConfig::from_json(FilterConfig{}.to_json()).to_json() == FilterConfig{}.to_json());
    CHECK(FilterConfig{}.batch_size == 16);
    CHECK(FilterConfig{}.epochs == 50);
}

TEST_CASE("untrained model gives finite, deterministic probabilities") {
    const FilterModel model{ quick_config() };
    Rng rng{ 1 };
    const auto img = genaug::testing::noise_image(128, 128, rng);
    const double p = predict(model, img);
    CHECK(std::isfinite(p));
    CHECK((p >= 0.0 && p <= 1.0));
    CHECK(predict(model, img) == p);
    CHECK_THROWS_AS((void)predict(model, Image{ 64, 64 }), ShapeError);
    CHECK_THROWS_AS((void)model.predict_batch(torch::zeros({ 1, 3, 32, 32 })), ShapeError);
}

TEST_CASE("the ResNet-50 shaped option builds and predicts") {
    auto c = quick_config();
    c.architecture = "resnet50";
    c.base_width = 4;
    const FilterModel model{ c };
    const auto p = model.predict_batch(torch::rand({ 2, 3, 128, 128 }));
    CHECK(p.size(0) == 2);
    CHECK(torch::isfinite(p).all().item<bool>());
}

TEST_CASE("model save/load keeps predictions and stats") {
    TempDir tmp;
    const auto good = brightness_set(tmp / "g", true, 10, 1);
    const auto bad = brightness_set(tmp / "b", false, 10, 2);
    auto c = quick_config();
    c.epochs = 1;
    const auto model = train_filter(good, bad, c);
    model.save(tmp / "f.gam");
    const auto back = FilterModel::load(tmp / "f.gam");
    const auto x = load_tensor(good, 128);
    CHECK(torch::equal(model.predict_batch(x), back.predict_batch(x)));
    CHECK(back.training_stats().to_json() == model.training_stats().to_json());
    CHECK(back.config().to_json() == model.config().to_json());
}

TEST_CASE("train_filter errors and warnings") {
    TempDir tmp;
    const auto good = brightness_set(tmp / "g", true, 22, 1);
    const auto bad = brightness_set(tmp / "b", false, 2, 2);
    CHECK_THROWS_AS((void)train_filter(good, good.empty_like(), quick_config()), InvalidArgument);
    CHECK_THROWS_AS((void)train_filter(bad.empty_like(), bad, quick_config()), InvalidArgument);
    auto c = quick_config();
    c.epochs = 1;
    const auto model = train_filter(good, bad, c);
    REQUIRE(model.training_stats().warnings.size() == 1);
    CHECK(model.training_stats().warnings[0].find("imbalance") != std::string::npos);
}

TEST_CASE("separable bright/dark sets are learned") {
    TempDir tmp;
    const auto good = brightness_set(tmp / "g", true, 40, 1);
    const auto bad = brightness_set(tmp / "b", false, 40, 2);
    const auto model = train_filter(good, bad, quick_config());
    const auto &s = model.training_stats();
    CHECK(s.train_acc >= 0.95);
    CHECK(s.n_train + s.n_val + s.n_test == 80);
    CHECK(s.n_train == 56);
    Rng rng{ 77 };
    CHECK(predict(model, synthetic::brightness_image(128, true, rng)) > model.threshold());
    CHECK(predict(model, synthetic::brightness_image(128, false, rng)) < model.threshold());
}

TEST_CASE("contradictory labels leave accuracy near chance") {
    TempDir tmp;
    const auto same = brightness_set(tmp / "g", true, 30, 1);
    auto c = quick_config();
    c.epochs = 2;
    const auto model = train_filter(same, same, c);
    CHECK(std::abs(model.training_stats().train_acc - 0.5) <= 0.1);
}

TEST_CASE("filter_pool partitions exactly and agrees with predict") {
    TempDir tmp;
    Rng rng{ 3 };
    std::vector<Image> mixed;
    for (int i = 0; i < 24; ++i) {
        mixed.push_back(synthetic::brightness_image(32, i % 3 != 0, rng));
    }
    const auto pool = genaug::testing::write_manifest(tmp / "pool", "gen", mixed, ClassLabel::bag, Provenance::generated);
    const auto model = train_filter(brightness_set(tmp / "g", true, 30, 1), brightness_set(tmp / "b", false, 30, 2), quick_config());
    const auto out = filter_pool(model, pool);
    CHECK(out.accepted.size() + out.rejected.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto &e = pool[i];
        const double p = predict(model, resize_bilinear(pool.load(e), 128, 128));
        CHECK(p == out.scores[i]);
        CHECK(out.accepted.contains(e.image_id) == (p >= model.threshold()));
        CHECK(out.accepted.contains(e.image_id) != out.rejected.contains(e.image_id));
    }
    for (const auto &e : out.accepted.entries()) {
        CHECK(e.provenance == Provenance::generated);
    }

    std::size_t previous = pool.size() + 1;
    for (const double t : { 0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95, 0.999 }) {
        const auto n = filter_pool(model.with_threshold(t), pool).accepted.size();
        CHECK(n <= previous);
        previous = n;
    }
    CHECK_THROWS_AS((void)model.with_threshold(1.0), InvalidArgument);
    CHECK_THROWS_AS((void)filter_pool(model, pool.empty_like()), InvalidArgument);
}

TEST_CASE("a model that is certain accepts the whole pool") {
    TempDir tmp;
    Rng rng{ 4 };
    const auto pool = genaug::testing::write_manifest(tmp / "pool", "gen", { genaug::testing::noise_image(32, 32, rng), genaug::testing::noise_image(32, 32, rng) }, ClassLabel::bag, Provenance::generated);
    FilterModel model{ quick_config() };
    set_constant_output(model, 100.0F);
    const auto out = filter_pool(model, pool);
    CHECK(out.accepted.size() == 2);
    CHECK(out.scores[0] == 1.0);
}

}  // TEST_SUITE
