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
/**
 * @file
 * Labelled datasets: IDX parsing, preprocessing, synthetic blobs and
 * class filtering.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qpmel {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One sample per row. The class index is rebuilt from the labels on
/// construction and partitions the sample indices.
class LabeledDataset {
  public:
    LabeledDataset(FeatureMatrix features, std::vector<int> labels);

    [[nodiscard]] Eigen::Index size() const { return features_.rows(); }
    [[nodiscard]] Eigen::Index feature_dim() const { return features_.cols(); }
    [[nodiscard]] const FeatureMatrix &features() const { return features_; }
    [[nodiscard]] const std::vector<int> &labels() const { return labels_; }
    [[nodiscard]] const std::map<int, std::vector<Eigen::Index>> &class_index() const {
        return class_index_;
    }
    [[nodiscard]] std::vector<int> classes() const;
    [[nodiscard]] size_t num_classes() const { return class_index_.size(); }

    /// Features of the given samples as columns (feature_dim x n).
    [[nodiscard]] Eigen::MatrixXd gather_columns(std::span<const Eigen::Index> rows) const;

    /// Subset in the given row order.
    [[nodiscard]] LabeledDataset select(std::span<const Eigen::Index> rows) const;

    bool operator==(const LabeledDataset &other) const {
        return features_ == other.features_ && labels_ == other.labels_;
    }

  private:
    FeatureMatrix features_;
    std::vector<int> labels_;
    std::map<int, std::vector<Eigen::Index>> class_index_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads an IDX image file (ubyte, 3 dimensions) and its label file
/// (ubyte, 1 dimension). Pixels are scaled by 1/255 and flattened row-major.
LabeledDataset parse_idx(std::istream &images, std::istream &labels);
LabeledDataset parse_idx(const std::filesystem::path &images,
                         const std::filesystem::path &labels);

/// Writes the IDX pair for a dataset whose features are k/255 pixel values.
void write_idx(const LabeledDataset &ds, int rows, int cols, std::ostream &images,
               std::ostream &labels);

struct PreprocessMode {
    enum class Kind { Flatten, Downsample, Standardize };
    Kind kind = Kind::Flatten;
    int factor = 1; ///< block size for Downsample

    static PreprocessMode flatten() { return {Kind::Flatten, 1}; }
    static PreprocessMode downsample(int k) { return {Kind::Downsample, k}; }
    static PreprocessMode standardize() { return {Kind::Standardize, 1}; }
};

/// Per-feature standardisation statistics. sd is floored at 1e-8.
struct FeatureStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
};

inline constexpr double kStandardizeSdFloor = 1e-8;

struct Preprocessed {
    LabeledDataset dataset;
    std::optional<FeatureStats> stats; ///< set for Standardize
};

/// Averages k x k pixel blocks of square images (784 -> 49 at k = 4).
LabeledDataset downsample(const LabeledDataset &ds, int k);
FeatureStats fit_standardizer(const LabeledDataset &ds);
LabeledDataset standardize(const LabeledDataset &ds, const FeatureStats &stats);

/// Fits any statistics on `ds` and returns them for reuse via apply_preprocess.
Preprocessed preprocess(const LabeledDataset &ds, const PreprocessMode &mode);
LabeledDataset apply_preprocess(const LabeledDataset &ds, const PreprocessMode &mode,
                                const std::optional<FeatureStats> &stats);

struct BlobSpec {
    int n_classes = 4;
    int dim = 8;
    int per_class = 100;
    double separation = 6.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs. Class means are drawn from the seed inside a
/// cube and rejected until every pair is at least separation * noise_sd apart.
LabeledDataset synth_blobs(const BlobSpec &params);
LabeledDataset synth_blobs(int n_classes, int dim, int per_class, double separation,
                           double noise_sd, std::uint64_t seed);

/// Keeps the listed classes and relabels them 0..n-1 in the listed order.
LabeledDataset filter_classes(const LabeledDataset &ds, std::span<const int> classes);

/// Named class subsets ("mnist-01", "mnist-35", "mnist-36", "mnist-012", "mnist-356").
std::vector<int> class_preset(const std::string &name);

/// First `train_per_class` samples of each class go to the first result,
/// the rest to the second.
std::pair<LabeledDataset, LabeledDataset> split_per_class(const LabeledDataset &ds,
                                                          size_t train_per_class);

} // namespace qpmel
