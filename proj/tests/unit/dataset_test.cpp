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
#include "genaug/manifest.hpp"
#include "genaug/rng.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

using namespace genaug;
using genaug::testing::TempDir;

namespace {

Manifest fake_manifest(const std::size_t n, const std::string &prefix, const ClassLabel label = ClassLabel::bag, const Provenance provenance = Provenance::real) {
    Manifest m{ "/tmp/none", 8, 8 };
    for (std::size_t i = 0; i < n; ++i) {
        m.add(ManifestEntry{ prefix + std::to_string(i), prefix + std::to_string(i) + ".png", label, provenance, Split::train, Transform::identity() });
    }
    return m;
}

std::vector<std::string> ids_of(const Manifest &m) {
    std::vector<std::string> out;
    for (const auto &e : m.entries()) {
        out.push_back(e.image_id);
    }
    return out;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("image values are clamped and validated") {
    Image img{ 2, 2 };
    img.set(0, 0, 0, 2.0F);
    img.set(0, 1, 1, -1.0F);
    CHECK(img.at(0, 0, 0) == 1.0F);
    CHECK(img.at(0, 1, 1) == 0.0F);
    CHECK_THROWS(Image{ 2, 2, std::vector<float>(12, 1.5F) });
    CHECK_THROWS(Image{ 2, 2, std::vector<float>(11, 0.5F) });
}

TEST_CASE("transforms match per-pixel oracles") {
    Rng rng{ 1 };
    const auto img = genaug::testing::noise_image(5, 5, rng);
    const int n = 5;
    const auto h = apply(Transform::hflip(), img);
    const auto v = apply(Transform::vflip(), img);
    const auto r = apply(Transform::rot90(), img);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            for (int c = 0; c < 3; ++c) {
                CHECK(h.at(y, x, c) == img.at(y, n - 1 - x, c));
                CHECK(v.at(y, x, c) == img.at(n - 1 - y, x, c));
                // counter-clockwise: the top-right corner moves to the top-left
                CHECK(r.at(y, x, c) == img.at(x, n - 1 - y, c));
            }
        }
    }
}

TEST_CASE("flips are involutions and four quarter turns are the identity") {
    Rng rng{ 2 };
    const auto img = genaug::testing::noise_image(6, 6, rng);
    CHECK(apply(Transform::hflip(), apply(Transform::hflip(), img)) == img);
    CHECK(apply(Transform::vflip(), apply(Transform::vflip(), img)) == img);
    auto turned = img;
    for (int i = 0; i < 4; ++i) {
        turned = apply(Transform::rot90(), turned);
    }
    CHECK(turned == img);
}

TEST_CASE("transform composition agrees with sequential application") {
    Rng rng{ 3 };
    const auto img = genaug::testing::noise_image(4, 4, rng);
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            const Transform ta{ a % 4, a >= 4 };
            const Transform tb{ b % 4, b >= 4 };
            CHECK(apply(ta * tb, img) == apply(ta, apply(tb, img)));
        }
    }
}

TEST_CASE("transform tags round-trip") {
    for (int k = 0; k < 8; ++k) {
        const Transform t{ k % 4, k >= 4 };
        CHECK(Transform::parse(t.tag()) == t);
    }
    CHECK_THROWS_AS((void)Transform::parse("skew"), InvalidArgument);
}

TEST_CASE("rotation of a non-square image is rejected") {
    CHECK_THROWS((void)apply(Transform::rot90(), Image{ 3, 4 }));
    CHECK_NOTHROW((void)apply(Transform::hflip(), Image{ 3, 4 }));
}

TEST_CASE("resize keeps constant images constant") {
    const auto img = genaug::testing::solid_image(10, 0.2F, 0.4F, 0.6F);
    const auto small = resize_bilinear(img, 4, 4);
    CHECK(small.height() == 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(small.at(y, x, 0) == doctest::Approx(0.2).epsilon(1e-5));
            CHECK(small.at(y, x, 1) == doctest::Approx(0.4).epsilon(1e-5));
            CHECK(small.at(y, x, 2) == doctest::Approx(0.6).epsilon(1e-5));
        }
    }
}

TEST_CASE("png encoding is lossless at 8 bits") {
    Rng rng{ 4 };
    const auto img = quantize8(genaug::testing::noise_image(7, 9, rng));
    const auto bytes = encode_png(img);
    CHECK(decode_image(bytes) == img);
}

TEST_CASE("ingest registers every decodable file and lists the rest") {
    TempDir tmp;
    const auto src = tmp / "src";
    std::filesystem::create_directories(src);
    Rng rng{ 5 };
    for (int i = 0; i < 3; ++i) {
        write_png(genaug::testing::noise_image(20, 16, rng), src / ("img" + std::to_string(i) + ".png"));
    }
    std::ofstream{ src / "broken.png" } << "not an image";

    const auto result = dataset::ingest(src, ClassLabel::bag, 8, 8, tmp / "out");
    REQUIRE(result.manifest.size() == 3);
    REQUIRE(result.skipped.size() == 1);
    CHECK(result.skipped[0].path.filename() == "broken.png");
    CHECK_FALSE(result.skipped[0].reason.empty());
    for (const auto &e : result.manifest.entries()) {
        CHECK(e.class_label == ClassLabel::bag);
        CHECK(e.provenance == Provenance::real);
        const auto img = result.manifest.load(e);
        CHECK(img.height() == 8);
        CHECK(img.width() == 8);
        for (const float v : img.values()) {
            CHECK((v >= 0.0F && v <= 1.0F));
        }
    }
    CHECK_NOTHROW(result.manifest.validate());
}

TEST_CASE("ingest of an empty directory is a no-images error") {
    TempDir tmp;
    std::filesystem::create_directories(tmp / "empty");
    try {
        (void)dataset::ingest(tmp / "empty", ClassLabel::fish, 8, 8, tmp / "out");
        FAIL("expected NoImagesError");
    } catch (const dataset::NoImagesError &e) {
        CHECK(e.kind() == "no_images");
    }
}

TEST_CASE("augment yields exactly four entries per input") {
    const auto m = fake_manifest(775, "bag-");
    const auto out = dataset::augment(m);
    CHECK(out.size() == 3100);
    CHECK(out.size() == 4 * m.size());
    std::set<std::string> suffixes;
    for (std::size_t i = 0; i < 4; ++i) {
        suffixes.insert(out[i].image_id.substr(out[i].image_id.find('+') + 1));
        CHECK(out[i].class_label == ClassLabel::bag);
        CHECK(out[i].provenance == Provenance::real);
    }
    CHECK(suffixes == std::set<std::string>{ "orig", "hflip", "vflip", "rot90" });
    const auto down = dataset::subsample(out, 3000, 11);
    CHECK(down.size() == 3000);

    CHECK(dataset::augment(fake_manifest(1, "x")).size() == 4);
    CHECK(dataset::augment(fake_manifest(283, "bottle-")).size() == 1132);
}

TEST_CASE("augmented entries load as the transformed pixels") {
    TempDir tmp;
    Rng rng{ 6 };
    const auto m = genaug::testing::write_manifest(tmp.path(), "p", { genaug::testing::noise_image(6, 6, rng) }, ClassLabel::fish);
    const auto out = dataset::augment(m);
    const auto original = m.load(0);
    CHECK(out.load(0) == original);
    CHECK(out.load(1) == apply(Transform::hflip(), original));
    CHECK(out.load(2) == apply(Transform::vflip(), original));
    CHECK(out.load(3) == apply(Transform::rot90(), original));
    // flipping the flipped member restores the original
    CHECK(apply(Transform::hflip(), out.load(1)) == original);
}

TEST_CASE("a fully symmetric image still gives four distinct ids") {
    TempDir tmp;
    const auto m = genaug::testing::write_manifest(tmp.path(), "s", { genaug::testing::solid_image(4, 0.5F, 0.5F, 0.5F) }, ClassLabel::bag);
    const auto out = dataset::augment(m);
    REQUIRE(out.size() == 4);
    const auto list = ids_of(out);
    const std::set<std::string> ids(list.begin(), list.end());
    CHECK(ids.size() == 4);
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(out.load(i) == out.load(0));
    }
}

TEST_CASE("augment rejects a non-square manifest and an empty one") {
    Manifest m{ "/tmp/none", 4, 6 };
    m.add(ManifestEntry{ "wide", "wide.png", ClassLabel::bag, Provenance::real, Split::train, {} });
    try {
        (void)dataset::augment(m);
        FAIL("expected ShapeError");
    } catch (const ShapeError &e) {
        CHECK(std::string{ e.what() }.find("wide") != std::string::npos);
    }
    CHECK_THROWS_AS((void)dataset::augment(Manifest{ "/tmp/none", 4, 4 }), InvalidArgument);
}

TEST_CASE("subsample is exact, without replacement and seeded") {
    const auto m = fake_manifest(4405, "fish-", ClassLabel::fish);
    const auto a = dataset::subsample(m, 3000, 42);
    const auto b = dataset::subsample(m, 3000, 42);
    CHECK(a.size() == 3000);
    CHECK(ids_of(a) == ids_of(b));
    const auto ids = ids_of(a);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 3000);
    CHECK(ids_of(dataset::subsample(m, 3000, 43)) != ids);

    const auto all = dataset::subsample(m, m.size(), 5);
    auto sorted_all = ids_of(all);
    auto sorted_m = ids_of(m);
    std::sort(sorted_all.begin(), sorted_all.end());
    std::sort(sorted_m.begin(), sorted_m.end());
    CHECK(sorted_all == sorted_m);
    CHECK(ids_of(all) != ids_of(m));

    CHECK_THROWS_AS((void)dataset::subsample(m, m.size() + 1, 0), dataset::InsufficientEntries);
}

TEST_CASE("subsample draws uniformly") {
    // each of 10 entries is picked with probability 3/10; 20000 draws
    const auto m = fake_manifest(10, "u");
    std::map<std::string, int> counts;
    const int trials = 20000;
    for (int s = 0; s < trials; ++s) {
        const auto picked = dataset::subsample(m, 3, static_cast<std::uint64_t>(s));
        for (const auto &e : picked.entries()) {
            ++counts[e.image_id];
        }
    }
    const double expected = trials * 0.3;
    const double sd = std::sqrt(trials * 0.3 * 0.7);
    for (const auto &[id, c] : counts) {
        CHECK(std::abs(c - expected) < 5.0 * sd);
    }
}

TEST_CASE("compose follows the ceiling/floor rule") {
    const auto real = fake_manifest(3000, "r");
    const auto gen = fake_manifest(5000, "g", ClassLabel::bag, Provenance::generated);
    const auto count = [](const Manifest &m, Provenance p) {
        return static_cast<std::size_t>(std::count_if(m.entries().begin(), m.entries().end(), [&](const ManifestEntry &e) { return e.provenance == p; }));
    };

    const auto mixed = dataset::compose(real, gen, dataset::Composition::mixed, 3000, 1);
    CHECK(count(mixed, Provenance::real) == 1500);
    CHECK(count(mixed, Provenance::generated) == 1500);

    const auto one = dataset::compose(real, gen, dataset::Composition::mixed, 1, 1);
    CHECK(count(one, Provenance::real) == 1);
    CHECK(count(one, Provenance::generated) == 0);

    const auto odd = dataset::compose(real, gen, dataset::Composition::mixed, 7, 3);
    CHECK(count(odd, Provenance::real) == 4);
    CHECK(count(odd, Provenance::generated) == 3);

    const auto generated = dataset::compose(real, gen, dataset::Composition::generated, 3000, 1);
    CHECK(count(generated, Provenance::generated) == 3000);
    CHECK(count(generated, Provenance::real) == 0);

    const auto only_real = dataset::compose(real, gen, dataset::Composition::real, 3000, 1);
    CHECK(count(only_real, Provenance::real) == 3000);

    CHECK(ids_of(dataset::compose(real, gen, dataset::Composition::mixed, 100, 9)) == ids_of(dataset::compose(real, gen, dataset::Composition::mixed, 100, 9)));
}

TEST_CASE("compose provenance counts differ by at most one") {
    const auto real = fake_manifest(60, "r");
    const auto gen = fake_manifest(60, "g", ClassLabel::bag, Provenance::generated);
    for (std::size_t total = 0; total <= 60; ++total) {
        const auto m = dataset::compose(real, gen, dataset::Composition::mixed, total, total);
        const auto n_real = static_cast<long>(std::count_if(m.entries().begin(), m.entries().end(), [](const ManifestEntry &e) { return e.provenance == Provenance::real; }));
        const auto n_gen = static_cast<long>(m.size()) - n_real;
        CHECK(m.size() == total);
        CHECK(std::abs(n_real - n_gen) <= 1);
    }
}

TEST_CASE("compose names the deficient side") {
    const auto real = fake_manifest(10, "r");
    const auto gen = fake_manifest(3, "g", ClassLabel::bag, Provenance::generated);
    try {
        (void)dataset::compose(real, gen, dataset::Composition::mixed, 10, 0);
        FAIL("expected InsufficientEntries");
    } catch (const dataset::InsufficientEntries &e) {
        CHECK(std::string{ e.what() }.find("generated") != std::string::npos);
    }
    try {
        (void)dataset::compose(real, gen, dataset::Composition::real, 11, 0);
        FAIL("expected InsufficientEntries");
    } catch (const dataset::InsufficientEntries &e) {
        CHECK(std::string{ e.what() }.find("real") != std::string::npos);
    }
}

TEST_CASE("holdout marks exactly n test entries") {
    const auto m = fake_manifest(50, "h");
    const auto held = dataset::assign_holdout(m, 12, 3);
    const auto n_test = std::count_if(held.entries().begin(), held.entries().end(), [](const ManifestEntry &e) { return e.split == Split::test; });
    CHECK(n_test == 12);
    CHECK(ids_of(held) == ids_of(m));
    CHECK_THROWS_AS((void)dataset::assign_holdout(m, 51, 0), dataset::InsufficientEntries);
}

TEST_CASE("manifest write/read round-trips entries in order") {
    TempDir tmp;
    Rng rng{ 7 };
    std::vector<Image> images;
    for (int i = 0; i < 5; ++i) {
        images.push_back(genaug::testing::noise_image(8, 8, rng));
    }
    auto m = dataset::augment(genaug::testing::write_manifest(tmp / "img", "rt", images, ClassLabel::background));
    m = dataset::assign_holdout(m, 4, 1);
    m.write(tmp / "sub" / "m.tsv");
    const auto back = Manifest::read(tmp / "sub" / "m.tsv");
    CHECK(back.root() == (tmp / "sub"));
    CHECK(back.rebased(m.root()) == m);
    CHECK((back.rebased(m.root()).entries() == m.entries()));
    CHECK(back.load(5) == m.load(5));
    CHECK_NOTHROW(back.validate());
}

TEST_CASE("manifest rejects duplicate ids and separator characters") {
    Manifest m{ "/tmp/none", 4, 4 };
    m.add(ManifestEntry{ "a", "a.png", ClassLabel::bag, Provenance::real, Split::train, {} });
    CHECK_THROWS_AS(m.add(ManifestEntry{ "a", "b.png", ClassLabel::bag, Provenance::real, Split::train, {} }), InvalidArgument);
    CHECK_THROWS_AS(m.add(ManifestEntry{ "t\tb", "b.png", ClassLabel::bag, Provenance::real, Split::train, {} }), InvalidArgument);
}

TEST_CASE("manifest validation catches undecodable paths") {
    TempDir tmp;
    Manifest m{ tmp.path(), 4, 4 };
    m.add(ManifestEntry{ "ghost", "ghost.png", ClassLabel::bag, Provenance::real, Split::train, {} });
    CHECK_THROWS((void)m.validate());
}

TEST_CASE("label enums parse their own names") {
    for (const auto c : { ClassLabel::bag, ClassLabel::bottle, ClassLabel::fish, ClassLabel::background }) {
        CHECK(parse_class_label(to_string(c)) == c);
    }
    CHECK(parse_provenance("generated") == Provenance::generated);
    CHECK(parse_split("val") == Split::val);
    CHECK_THROWS_AS((void)parse_class_label("whale"), InvalidArgument);
}

}  // TEST_SUITE
