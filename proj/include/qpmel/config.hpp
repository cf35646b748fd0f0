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
 * Run configuration (JSON). See README.md for the key schema.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpmel/data.hpp"
#include "qpmel/encoder.hpp"
#include "qpmel/trainer.hpp"

namespace qpmel {

struct DatasetConfig {
    enum class Source { Synthetic, Idx };
    Source source = Source::Synthetic;
    BlobSpec blobs;                        ///< seed is derived from the master seed
    size_t train_per_class = 0;            ///< synthetic split; 0 = half of per_class
    std::filesystem::path train_images, train_labels, test_images, test_labels;
    std::vector<int> classes;              ///< empty = keep all
};

struct EncoderConfig {
    std::vector<int> layer_dims;
    int qubits = 4;
    Activation activation = Activation::ReLU;
};

struct OutputConfig {
    std::optional<std::filesystem::path> checkpoint;
    std::optional<std::filesystem::path> metrics;
    std::optional<std::filesystem::path> qasm;
};

struct RunConfig {
    std::uint64_t seed = 0;
    DatasetConfig dataset;
    PreprocessMode preprocess;
    EncoderConfig encoder;
    TrainConfig train;  ///< seed and metrics_path filled from seed/output
    EvalConfig eval;    ///< seeds filled from seed
    OutputConfig output;
};

/// A "section.key=value" override applied on top of the file. The value is
/// parsed as JSON when possible and taken as a string otherwise.
struct ConfigOverride {
    std::string key;
    std::string value;
};

ConfigOverride parse_override(const std::string &text);

/// Relative paths are resolved against `base_dir`. Throws ConfigError with a
/// line/column (syntax) or a field path (schema) in the message.
RunConfig parse_config(const std::string &text, const std::filesystem::path &base_dir,
                       const std::vector<ConfigOverride> &overrides = {});
RunConfig load_config(const std::filesystem::path &path,
                      const std::vector<ConfigOverride> &overrides = {});

struct LoadedData {
    LabeledDataset train;
    LabeledDataset eval;
};

/// Loads (or synthesises), preprocesses and class-filters the datasets.
/// Preprocessing statistics are fitted on the training split.
LoadedData load_datasets(const RunConfig &config);

/// Named consumers of the master seed.
namespace seeds {
inline constexpr const char *kEncoderInit = "encoder-init";
inline constexpr const char *kTrain = "train";
inline constexpr const char *kEval = "eval";
inline constexpr const char *kShots = "shots";
inline constexpr const char *kSynthetic = "synthetic-data";
} // namespace seeds

} // namespace qpmel
