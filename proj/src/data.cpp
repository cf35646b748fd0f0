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
#include "qpmel/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "qpmel/errors.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

LabeledDataset::LabeledDataset(FeatureMatrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
    detail::require<ConsistencyError>(
        features_.rows() == static_cast<Eigen::Index>(labels_.size()),
        "dataset: " + std::to_string(features_.rows()) + " feature rows vs " +
            std::to_string(labels_.size()) + " labels");
    for (size_t i = 0; i < labels_.size(); ++i) {
        class_index_[labels_[i]].push_back(static_cast<Eigen::Index>(i));
    }
}

std::vector<int> LabeledDataset::classes() const {
    std::vector<int> out;
    out.reserve(class_index_.size());
    for (const auto &[c, _] : class_index_) {
        out.push_back(c);
    }
    return out;
}

Eigen::MatrixXd LabeledDataset::gather_columns(std::span<const Eigen::Index> rows) const {
    Eigen::MatrixXd out(features_.cols(), static_cast<Eigen::Index>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = features_.row(rows[j]).transpose();
    }
    return out;
}

LabeledDataset LabeledDataset::select(std::span<const Eigen::Index> rows) const {
    FeatureMatrix f(static_cast<Eigen::Index>(rows.size()), features_.cols());
    std::vector<int> l;
    l.reserve(rows.size());
    for (size_t j = 0; j < rows.size(); ++j) {
        f.row(static_cast<Eigen::Index>(j)) = features_.row(rows[j]);
        l.push_back(labels_[static_cast<size_t>(rows[j])]);
    }
    return {std::move(f), std::move(l)};
}

// IDX

namespace {

std::uint32_t read_be32(std::istream &in, const char *what) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char *>(b.data()), 4);
    if (in.gcount() != 4) {
        throw LengthError(std::string("idx: truncated header in ") + what);
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_be32(std::ostream &out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::string hex32(std::uint32_t v) {
    std::ostringstream s;
    s << "0x" << std::hex;
    s.width(8);
    s.fill('0');
    s << v;
    return s.str();
}

void expect_magic(std::uint32_t found, std::uint32_t expected, const char *what) {
    if (found != expected) {
        throw FormatError(std::string("idx: bad magic in ") + what + ": expected " +
                          hex32(expected) + ", found " + hex32(found));
    }
}

std::vector<unsigned char> read_payload(std::istream &in, size_t n, const char *what) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
        throw LengthError(std::string("idx: truncated ") + what + ": expected " +
                          std::to_string(n) + " bytes, got " +
                          std::to_string(in.gcount()));
    }
    return buf;
}

} // namespace

LabeledDataset parse_idx(std::istream &images, std::istream &labels) {
    expect_magic(read_be32(images, "images"), kIdxImagesMagic, "images");
    const std::uint32_t n_images = read_be32(images, "images");
    const std::uint32_t rows = read_be32(images, "images");
    const std::uint32_t cols = read_be32(images, "images");

    expect_magic(read_be32(labels, "labels"), kIdxLabelsMagic, "labels");
    const std::uint32_t n_labels = read_be32(labels, "labels");
    if (n_images != n_labels) {
        throw ConsistencyError("idx: " + std::to_string(n_images) + " images vs " +
                               std::to_string(n_labels) + " labels");
    }

    const size_t dim = size_t{rows} * cols;
    const auto pixels = read_payload(images, size_t{n_images} * dim, "image data");
    const auto label_bytes = read_payload(labels, n_labels, "label data");

    FeatureMatrix features(n_images, static_cast<Eigen::Index>(dim));
    for (size_t i = 0; i < n_images; ++i) {
        for (size_t j = 0; j < dim; ++j) {
            features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pixels[i * dim + j] / 255.0;
        }
    }
    std::vector<int> l(label_bytes.begin(), label_bytes.end());
    return {std::move(features), std::move(l)};
}

LabeledDataset parse_idx(const std::filesystem::path &images,
                         const std::filesystem::path &labels) {
    std::ifstream fi(images, std::ios::binary);
    if (!fi) {
        throw ArgumentError("cannot open IDX images file: " + images.string());
    }
    std::ifstream fl(labels, std::ios::binary);
    if (!fl) {
        throw ArgumentError("cannot open IDX labels file: " + labels.string());
    }
    return parse_idx(fi, fl);
}

void write_idx(const LabeledDataset &ds, int rows, int cols, std::ostream &images,
               std::ostream &labels) {
    detail::require<DimensionError>(ds.feature_dim() == Eigen::Index{rows} * cols,
                                    "write_idx: feature_dim != rows * cols");
    write_be32(images, kIdxImagesMagic);
    write_be32(images, static_cast<std::uint32_t>(ds.size()));
    write_be32(images, static_cast<std::uint32_t>(rows));
    write_be32(images, static_cast<std::uint32_t>(cols));
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index j = 0; j < ds.feature_dim(); ++j) {
            const double v = std::clamp(std::round(ds.features()(i, j) * 255.0), 0.0, 255.0);
            images.put(static_cast<char>(static_cast<unsigned char>(v)));
        }
    }
    write_be32(labels, kIdxLabelsMagic);
    write_be32(labels, static_cast<std::uint32_t>(ds.size()));
    for (int l : ds.labels()) {
        labels.put(static_cast<char>(static_cast<unsigned char>(l)));
    }
}

// Preprocessing

LabeledDataset downsample(const LabeledDataset &ds, int k) {
    detail::require<ArgumentError>(k >= 1, "downsample: factor must be >= 1");
    const auto dim = ds.feature_dim();
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(double(dim))));
    detail::require<ArgumentError>(side * side == dim,
                                   "downsample: feature_dim " + std::to_string(dim) +
                                       " is not a square image");
    detail::require<ArgumentError>(side % k == 0,
                                   "downsample: factor " + std::to_string(k) +
                                       " does not divide image side " +
                                       std::to_string(side));
    if (k == 1) {
        return ds;
    }
    const Eigen::Index out_side = side / k;
    const double inv = 1.0 / (double(k) * k);
    FeatureMatrix out(ds.size(), out_side * out_side);
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index br = 0; br < out_side; ++br) {
            for (Eigen::Index bc = 0; bc < out_side; ++bc) {
                double sum = 0.0;
                for (Eigen::Index r = 0; r < k; ++r) {
                    for (Eigen::Index c = 0; c < k; ++c) {
                        sum += ds.features()(i, (br * k + r) * side + bc * k + c);
                    }
                }
                out(i, br * out_side + bc) = sum * inv;
            }
        }
    }
    return {std::move(out), ds.labels()};
}

FeatureStats fit_standardizer(const LabeledDataset &ds) {
    detail::require<ArgumentError>(ds.size() >= 1, "standardize: empty dataset");
    const Eigen::VectorXd mean = ds.features().colwise().mean().transpose();
    const Eigen::MatrixXd centered = ds.features().rowwise() - mean.transpose();
    Eigen::VectorXd sd =
        (centered.array().square().colwise().sum() / double(ds.size())).sqrt().transpose();
    sd = sd.cwiseMax(kStandardizeSdFloor);
    return {mean, sd};
}

LabeledDataset standardize(const LabeledDataset &ds, const FeatureStats &stats) {
    detail::require<DimensionError>(stats.mean.size() == ds.feature_dim() &&
                                        stats.sd.size() == ds.feature_dim(),
                                    "standardize: statistics dimension mismatch");
    FeatureMatrix out = ds.features();
    out.rowwise() -= stats.mean.transpose();
    out.array().rowwise() /= stats.sd.transpose().array();
    return {std::move(out), ds.labels()};
}

Preprocessed preprocess(const LabeledDataset &ds, const PreprocessMode &mode) {
    switch (mode.kind) {
    case PreprocessMode::Kind::Flatten:
        return {ds, std::nullopt};
    case PreprocessMode::Kind::Downsample:
        return {downsample(ds, mode.factor), std::nullopt};
    case PreprocessMode::Kind::Standardize: {
        FeatureStats stats = fit_standardizer(ds);
        LabeledDataset out = standardize(ds, stats);
        return {std::move(out), std::move(stats)};
    }
    }
    throw ArgumentError("preprocess: unknown mode");
}

LabeledDataset apply_preprocess(const LabeledDataset &ds, const PreprocessMode &mode,
                                const std::optional<FeatureStats> &stats) {
    if (mode.kind == PreprocessMode::Kind::Standardize) {
        detail::require<ArgumentError>(stats.has_value(),
                                       "apply_preprocess: standardize needs statistics");
        return standardize(ds, *stats);
    }
    return preprocess(ds, mode).dataset;
}

// Synthetic data

LabeledDataset synth_blobs(const BlobSpec &params) {
    detail::require<ConfigError>(params.n_classes >= 1 && params.dim >= 1 && params.per_class >= 1,
                                 "synth_blobs: n_classes, dim and per_class must be positive");
    detail::require<ConfigError>(params.separation >= 0.0 && params.noise_sd >= 0.0,
                                 "synth_blobs: separation and noise_sd must be >= 0");
    const double min_dist = params.separation * params.noise_sd;
    const double scale = min_dist > 0.0 ? min_dist : 1.0;
    const double side =
        2.0 * scale * std::ceil(std::pow(double(params.n_classes), 1.0 / params.dim));

    Rng mean_rng(derive_seed(params.seed, "blob-means"));
    std::vector<Eigen::VectorXd> means;
    constexpr int kMaxAttempts = 10000;
    for (int c = 0; c < params.n_classes; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            Eigen::VectorXd m(params.dim);
            for (int d = 0; d < params.dim; ++d) {
                m[d] = mean_rng.uniform(-side / 2, side / 2);
            }
            placed = std::all_of(means.begin(), means.end(), [&](const Eigen::VectorXd &o) {
                return (o - m).norm() >= min_dist;
            });
            if (placed) {
                means.push_back(std::move(m));
            }
        }
        if (!placed) {
            throw ConfigError("synth_blobs: cannot place " + std::to_string(params.n_classes) +
                              " means " + std::to_string(min_dist) + " apart in dim " +
                              std::to_string(params.dim));
        }
    }

    Rng sample_rng(derive_seed(params.seed, "blob-samples"));
    const Eigen::Index n = Eigen::Index{params.n_classes} * params.per_class;
    FeatureMatrix features(n, params.dim);
    std::vector<int> labels;
    labels.reserve(static_cast<size_t>(n));
    Eigen::Index row = 0;
    for (int c = 0; c < params.n_classes; ++c) {
        for (int i = 0; i < params.per_class; ++i, ++row) {
            for (int d = 0; d < params.dim; ++d) {
                features(row, d) = means[c][d] + params.noise_sd * sample_rng.normal();
            }
            labels.push_back(c);
        }
    }
    return {std::move(features), std::move(labels)};
}

LabeledDataset synth_blobs(int n_classes, int dim, int per_class, double separation,
                           double noise_sd, std::uint64_t seed) {
    return synth_blobs(BlobSpec{n_classes, dim, per_class, separation, noise_sd, seed});
}

LabeledDataset filter_classes(const LabeledDataset &ds, std::span<const int> classes) {
    detail::require<ArgumentError>(!classes.empty(), "filter_classes: empty class list");
    std::set<int> seen;
    std::vector<Eigen::Index> rows;
    std::map<int, int> relabel;
    for (size_t i = 0; i < classes.size(); ++i) {
        const int c = classes[i];
        detail::require<ArgumentError>(seen.insert(c).second,
                                       "filter_classes: duplicate class " + std::to_string(c));
        detail::require<ArgumentError>(ds.class_index().count(c) == 1,
                                       "filter_classes: class " + std::to_string(c) +
                                           " not present");
        relabel[c] = static_cast<int>(i);
    }
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        if (relabel.count(ds.labels()[static_cast<size_t>(i)]) != 0) {
            rows.push_back(i);
        }
    }
    LabeledDataset subset = ds.select(rows);
    std::vector<int> labels = subset.labels();
    for (int &l : labels) {
        l = relabel.at(l);
    }
    return {subset.features(), std::move(labels)};
}

std::vector<int> class_preset(const std::string &name) {
    static const std::map<std::string, std::vector<int>> presets = {
        {"mnist-01", {0, 1}},     {"mnist-35", {3, 5}},       {"mnist-36", {3, 6}},
        {"mnist-012", {0, 1, 2}}, {"mnist-356", {3, 5, 6}},
    };
    const auto it = presets.find(name);
    if (it == presets.end()) {
        throw ArgumentError("unknown class preset '" + name + "'");
    }
    return it->second;
}

std::pair<LabeledDataset, LabeledDataset> split_per_class(const LabeledDataset &ds,
                                                          size_t train_per_class) {
    std::vector<Eigen::Index> first;
    std::vector<Eigen::Index> second;
    std::map<int, size_t> taken;
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        size_t &t = taken[ds.labels()[static_cast<size_t>(i)]];
        (t < train_per_class ? first : second).push_back(i);
        ++t;
    }
    return {ds.select(first), ds.select(second)};
}

} // namespace qpmel
