// Copyright 2026 The QPMeL Authors
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
#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "qpmel/data.hpp"
#include "qpmel/errors.hpp"
#include "qpmel/random.hpp"

using namespace qpmel;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const std::filesystem::path kFixtures = QPMEL_FIXTURE_DIR;

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string be32(std::uint32_t v) {
    return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
            static_cast<char>(v)};
}

LabeledDataset parse_strings(const std::string &images, const std::string &labels) {
    std::istringstream i(images), l(labels);
    return parse_idx(i, l);
}

} // namespace

TEST_CASE("parse the single 2x2 image fixture", "[data][idx]") {
    const LabeledDataset ds = parse_idx(kFixtures / "one-2x2-images-idx3-ubyte",
                                        kFixtures / "one-2x2-labels-idx1-ubyte");
    REQUIRE(ds.size() == 1);
    REQUIRE(ds.feature_dim() == 4);
    CHECK(ds.features()(0, 0) == 0.0);
    CHECK(ds.features()(0, 1) == 1.0);
    CHECK(ds.features()(0, 2) == 128.0 / 255.0);
    CHECK(ds.features()(0, 3) == 64.0 / 255.0);
    CHECK(ds.labels() == std::vector<int>{7});
}

TEST_CASE("parse flattens images row-major", "[data][idx]") {
    const LabeledDataset ds = parse_idx(kFixtures / "three-4x4-images-idx3-ubyte",
                                        kFixtures / "three-4x4-labels-idx1-ubyte");
    REQUIRE(ds.size() == 3);
    REQUIRE(ds.feature_dim() == 16);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 16; ++j) {
            CHECK(ds.features()(i, j) == (16 * i + j) / 255.0);
        }
    }
    CHECK(ds.labels() == std::vector<int>{0, 1, 0});
    CHECK(ds.class_index().at(0) == std::vector<Eigen::Index>{0, 2});
    CHECK(ds.class_index().at(1) == std::vector<Eigen::Index>{1});
}

TEST_CASE("parse reports a wrong magic word", "[data][idx]") {
    const std::string images = read_file(kFixtures / "one-2x2-images-idx3-ubyte");
    const std::string labels = read_file(kFixtures / "one-2x2-labels-idx1-ubyte");
    CHECK_THROWS_AS(parse_strings(labels, labels), FormatError);
    CHECK_THROWS_WITH(parse_strings(labels, labels),
                      ContainsSubstring("expected 0x00000803") && ContainsSubstring("found 0x00000801"));
    CHECK_THROWS_WITH(parse_strings(images, images),
                      ContainsSubstring("expected 0x00000801") && ContainsSubstring("found 0x00000803"));
}

TEST_CASE("parse reports truncation", "[data][idx]") {
    const std::string images = read_file(kFixtures / "three-4x4-images-idx3-ubyte");
    const std::string labels = read_file(kFixtures / "three-4x4-labels-idx1-ubyte");
    CHECK_THROWS_AS(parse_strings(images.substr(0, images.size() - 1), labels), LengthError);
    CHECK_THROWS_AS(parse_strings(images.substr(0, 10), labels), LengthError);
    CHECK_THROWS_AS(parse_strings(images, labels.substr(0, labels.size() - 1)), LengthError);
    CHECK_THROWS_AS(parse_strings("", labels), LengthError);
}

TEST_CASE("parse reports count mismatches", "[data][idx]") {
    const std::string images = read_file(kFixtures / "three-4x4-images-idx3-ubyte");
    const std::string labels = be32(kIdxLabelsMagic) + be32(2) + std::string("\x00\x01", 2);
    CHECK_THROWS_AS(parse_strings(images, labels), ConsistencyError);
}

TEST_CASE("parse names a missing file", "[data][idx]") {
    CHECK_THROWS_WITH(parse_idx(kFixtures / "absent-images", kFixtures / "one-2x2-labels-idx1-ubyte"),
                      ContainsSubstring("absent-images"));
}

TEST_CASE("write and parse round-trip", "[data][idx]") {
    const LabeledDataset ds = parse_idx(kFixtures / "three-4x4-images-idx3-ubyte",
                                        kFixtures / "three-4x4-labels-idx1-ubyte");
    std::ostringstream images, labels;
    write_idx(ds, 4, 4, images, labels);
    CHECK(images.str() == read_file(kFixtures / "three-4x4-images-idx3-ubyte"));
    CHECK(labels.str() == read_file(kFixtures / "three-4x4-labels-idx1-ubyte"));
    CHECK(parse_strings(images.str(), labels.str()) == ds);
}

TEST_CASE("dataset construction checks row counts", "[data]") {
    CHECK_THROWS_AS(LabeledDataset(FeatureMatrix::Zero(3, 2), {0, 1}), ConsistencyError);
}

TEST_CASE("downsample examples", "[data][preprocess]") {
    const LabeledDataset ones(FeatureMatrix::Ones(1, 16), {0});
    const LabeledDataset d2 = downsample(ones, 2);
    REQUIRE(d2.feature_dim() == 4);
    CHECK(d2.features().isOnes(0.0));

    const LabeledDataset ds = parse_idx(kFixtures / "three-4x4-images-idx3-ubyte",
                                        kFixtures / "three-4x4-labels-idx1-ubyte");
    CHECK(downsample(ds, 1) == ds);

    // Block (0,0) of image 0 holds pixels 0, 1, 4, 5.
    const LabeledDataset blocks = downsample(ds, 2);
    CHECK_THAT(blocks.features()(0, 0), WithinAbs((0 + 1 + 4 + 5) / 4.0 / 255.0, 1e-15));
    CHECK_THAT(blocks.features()(0, 3), WithinAbs((10 + 11 + 14 + 15) / 4.0 / 255.0, 1e-15));

    CHECK(downsample(LabeledDataset(FeatureMatrix::Zero(2, 784), {0, 1}), 4).feature_dim() == 49);
    CHECK_THROWS_AS(downsample(LabeledDataset(FeatureMatrix::Zero(1, 12), {0}), 2), ArgumentError);
    CHECK_THROWS_AS(downsample(ds, 3), ArgumentError);
}

TEST_CASE("downsample preserves the mean pixel value", "[data][preprocess][property]") {
    Rng rng(91);
    FeatureMatrix f(20, 784);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        f(i) = static_cast<double>(rng.below(256)) / 255.0;
    }
    const LabeledDataset ds(f, std::vector<int>(20, 0));
    for (int k : {1, 2, 4, 7, 14, 28}) {
        const LabeledDataset d = downsample(ds, k);
        for (Eigen::Index i = 0; i < 20; ++i) {
            CHECK(std::abs(d.features().row(i).mean() - f.row(i).mean()) <= 1e-12);
        }
    }
}

TEST_CASE("standardize uses training statistics with an sd floor", "[data][preprocess]") {
    FeatureMatrix f(4, 3);
    f << 1, 5, 2,
         2, 5, 4,
         3, 5, 6,
         4, 5, 8;
    const LabeledDataset ds(f, {0, 0, 1, 1});
    const Preprocessed p = preprocess(ds, PreprocessMode::standardize());
    REQUIRE(p.stats.has_value());
    CHECK(p.stats->mean[0] == 2.5);
    CHECK(p.stats->sd[1] == kStandardizeSdFloor);
    CHECK(p.dataset.features().col(1).isZero(0.0));
    for (Eigen::Index j : {0, 2}) {
        const auto col = p.dataset.features().col(j);
        CHECK_THAT(col.mean(), WithinAbs(0.0, 1e-15));
        CHECK_THAT(col.squaredNorm() / 4.0, WithinAbs(1.0, 1e-12));
    }

    FeatureMatrix test(1, 3);
    test << 2.5, 7, 5;
    const LabeledDataset applied =
        apply_preprocess(LabeledDataset(test, {0}), PreprocessMode::standardize(), p.stats);
    CHECK(applied.features()(0, 0) == 0.0);
    CHECK(applied.features()(0, 1) == 2.0 / kStandardizeSdFloor);
    CHECK(applied.features()(0, 2) == 0.0);

    CHECK_FALSE(preprocess(ds, PreprocessMode::flatten()).stats.has_value());
    CHECK(preprocess(ds, PreprocessMode::flatten()).dataset == ds);
}

TEST_CASE("synthetic blobs examples", "[data][synthetic]") {
    const LabeledDataset a = synth_blobs(4, 8, 50, 6.0, 1.0, 17);
    const LabeledDataset b = synth_blobs(4, 8, 50, 6.0, 1.0, 17);
    CHECK(a == b);
    CHECK_FALSE(a == synth_blobs(4, 8, 50, 6.0, 1.0, 18));
    CHECK(a.size() == 200);
    CHECK(a.num_classes() == 4);

    const LabeledDataset exact = synth_blobs(3, 5, 10, 2.0, 0.0, 3);
    for (const auto &[c, rows] : exact.class_index()) {
        for (Eigen::Index r : rows) {
            CHECK(exact.features().row(r) == exact.features().row(rows.front()));
        }
    }

    CHECK_THROWS_AS(synth_blobs(4, 2, 2, -1.0, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(synth_blobs(0, 2, 2, 1.0, 1.0, 1), ConfigError);
}

TEST_CASE("blob means respect the separation", "[data][synthetic]") {
    // Class sample means over 4000 draws sit within ~0.05 of the true means.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabeledDataset ds = synth_blobs(5, 4, 4000, 3.0, 0.5, seed);
        std::vector<Eigen::RowVectorXd> means;
        for (const auto &[c, rows] : ds.class_index()) {
            Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(4);
            for (Eigen::Index r : rows) {
                m += ds.features().row(r);
            }
            means.push_back(m / static_cast<double>(rows.size()));
        }
        for (size_t i = 0; i < means.size(); ++i) {
            for (size_t j = i + 1; j < means.size(); ++j) {
                CHECK((means[i] - means[j]).norm() >= 1.5 - 0.05);
            }
        }
    }
}

TEST_CASE("nearest class mean separates the standard blob task", "[data][synthetic]") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabeledDataset ds = synth_blobs(4, 8, 200, 6.0, 1.0, seed);
        const auto [fit, held] = split_per_class(ds, 100);
        std::vector<Eigen::RowVectorXd> means;
        for (const auto &[c, rows] : fit.class_index()) {
            Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(8);
            for (Eigen::Index r : rows) {
                m += fit.features().row(r);
            }
            means.push_back(m / static_cast<double>(rows.size()));
        }
        int correct = 0;
        for (Eigen::Index i = 0; i < held.size(); ++i) {
            int best = 0;
            for (int c = 1; c < 4; ++c) {
                if ((held.features().row(i) - means[static_cast<size_t>(c)]).squaredNorm() <
                    (held.features().row(i) - means[static_cast<size_t>(best)]).squaredNorm()) {
                    best = c;
                }
            }
            correct += best == held.labels()[static_cast<size_t>(i)] ? 1 : 0;
        }
        CHECK(correct >= 0.99 * static_cast<double>(held.size()));
    }
}

TEST_CASE("filter_classes keeps and relabels in order", "[data][filter]") {
    const LabeledDataset ds = synth_blobs(10, 3, 4, 1.0, 1.0, 5);
    const std::vector<int> pair{5, 3};
    const LabeledDataset f = filter_classes(ds, pair);
    CHECK(f.size() == 8);
    CHECK(f.num_classes() == 2);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(f.features().row(i) == ds.features().row(12 + i));
        CHECK(f.labels()[static_cast<size_t>(i)] == 1);
        CHECK(f.features().row(4 + i) == ds.features().row(20 + i));
        CHECK(f.labels()[static_cast<size_t>(4 + i)] == 0);
    }

    std::vector<int> all(10);
    std::iota(all.begin(), all.end(), 0);
    CHECK(filter_classes(ds, all) == ds);

    const std::vector<int> missing{1, 11};
    CHECK_THROWS_AS(filter_classes(ds, missing), ArgumentError);
    CHECK(class_preset("mnist-35") == std::vector<int>{3, 5});
    CHECK(class_preset("mnist-01") == std::vector<int>{0, 1});
    CHECK(class_preset("mnist-012") == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(class_preset("mnist-99"), ArgumentError);
}

TEST_CASE("class index partitions the samples", "[data][property]") {
    const LabeledDataset ds = synth_blobs(7, 2, 9, 1.0, 1.0, 8);
    std::set<Eigen::Index> seen;
    size_t total = 0;
    for (const auto &[c, rows] : ds.class_index()) {
        for (Eigen::Index r : rows) {
            CHECK(ds.labels()[static_cast<size_t>(r)] == c);
            seen.insert(r);
        }
        total += rows.size();
    }
    CHECK(total == static_cast<size_t>(ds.size()));
    CHECK(seen.size() == total);
}

TEST_CASE("parse, preprocess and filter are deterministic", "[data][property]") {
    const std::filesystem::path dir = QPMEL_MNIST_DIR;
    auto pipeline = [&] {
        const LabeledDataset raw = parse_idx(dir / "test-images-idx3-ubyte", dir / "test-labels-idx1-ubyte");
        const LabeledDataset small = preprocess(raw, PreprocessMode::downsample(2)).dataset;
        const std::vector<int> keep{3, 5};
        return filter_classes(preprocess(small, PreprocessMode::standardize()).dataset, keep);
    };
    const LabeledDataset a = pipeline();
    const LabeledDataset b = pipeline();
    CHECK(a == b);
    CHECK(a.feature_dim() == 196);
    CHECK(a.num_classes() == 2);
}

TEST_CASE("bundled MNIST subset has the expected shape", "[data][mnist]") {
    const std::filesystem::path dir = QPMEL_MNIST_DIR;
    const LabeledDataset train = parse_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    const LabeledDataset test = parse_idx(dir / "test-images-idx3-ubyte", dir / "test-labels-idx1-ubyte");
    CHECK(train.size() == 4000);
    CHECK(test.size() == 1000);
    CHECK(train.feature_dim() == 784);
    CHECK(train.num_classes() == 10);
    for (const auto &[c, rows] : test.class_index()) {
        CHECK(rows.size() == 100);
    }
    CHECK(train.features().minCoeff() >= 0.0);
    CHECK(train.features().maxCoeff() == 1.0);
}

TEST_CASE("official MNIST test files parse to 10000 samples", "[data][mnist]") {
    const char *dir = std::getenv("QPMEL_MNIST_OFFICIAL_DIR");
    if (dir == nullptr) {
        SKIP("set QPMEL_MNIST_OFFICIAL_DIR to the directory holding t10k-*-ubyte");
    }
    const std::filesystem::path d = dir;
    const LabeledDataset ds = parse_idx(d / "t10k-images-idx3-ubyte", d / "t10k-labels-idx1-ubyte");
    CHECK(ds.size() == 10000);
    CHECK(ds.feature_dim() == 784);
    CHECK(ds.num_classes() == 10);
}
