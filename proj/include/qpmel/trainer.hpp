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
 * Episodic prototypical training over fidelity similarities.
 *
 * Each class prototype is the per-qubit spherical mean of its supports'
 * Cartesian points (Euclidean mean, renormalised). A query's logit for class
 * c is similarity(query, prototype_c) / temperature, where the similarity is
 * the sum of per-qubit fidelities (Additive, the default) or their product
 * (Multiplicative). The loss is softmax cross-entropy averaged over queries.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpmel/data.hpp"
#include "qpmel/encoder.hpp"
#include "qpmel/geometry.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

enum class SimilarityKind { Additive, Multiplicative };

SimilarityKind similarity_from_string(const std::string &name);

/// N-way K-shot task as sample indices into a dataset. Classes are local
/// indices 0..n_way-1; `classes` maps them back to dataset labels.
struct Episode {
    int n_way = 0;
    int k_shot = 0;
    int q_queries = 0;
    std::vector<int> classes;
    std::vector<Eigen::Index> support;
    std::vector<int> support_class;
    std::vector<Eigen::Index> query;
    std::vector<int> query_class;

    /// Throws ArgumentError when the N-way K-shot invariants do not hold.
    void validate() const;
};

/// Draws episodes: n_way distinct classes, then k_shot + q_queries distinct
/// samples per class (without replacement within an episode).
class EpisodeSampler {
  public:
    EpisodeSampler(const LabeledDataset &dataset, int n_way, int k_shot, int q_queries);
    [[nodiscard]] Episode sample(Rng &rng) const;

  private:
    const LabeledDataset *dataset_;
    int n_way_;
    int k_shot_;
    int q_queries_;
    std::vector<int> eligible_;
};

/// Degenerate threshold for the Euclidean mean of support points.
inline constexpr double kPrototypeDegenerateNorm = 1e-9;

struct Prototype {
    int class_index = 0;
    CartesianEncodingd cartesian;
    /// Qubits whose mean fell below kPrototypeDegenerateNorm and were
    /// replaced by the first support's point.
    std::vector<int> degenerate_qubits;
};

Prototype make_prototype(std::span<const AngularEncodingd> supports, int class_index = 0);

/// Similarity of a query against a prototype's points.
double prototype_similarity(const CartesianEncodingd &query, const CartesianEncodingd &proto,
                            SimilarityKind kind);

Eigen::VectorXd similarity_logits(const AngularEncodingd &query,
                                  std::span<const Prototype> prototypes, double temperature,
                                  SimilarityKind kind = SimilarityKind::Additive);

/// Encoded supports and queries of one episode.
struct EpisodeEncodings {
    int n_way = 0;
    std::vector<AngularEncodingd> support;
    std::vector<int> support_class;
    std::vector<AngularEncodingd> query;
    std::vector<int> query_class;
};

struct AngularGradient {
    Eigen::VectorXd d_theta;
    Eigen::VectorXd d_gamma;
};

struct ProtoLossResult {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<Prototype> prototypes;
    std::vector<AngularGradient> d_support;
    std::vector<AngularGradient> d_query;
    int degenerate_qubits = 0;
};

/// Loss and its exact gradient w.r.t. every support and query angle,
/// including the path through the prototype renormalisation.
ProtoLossResult proto_loss(const EpisodeEncodings &episode, double temperature,
                           SimilarityKind kind = SimilarityKind::Additive);

struct OptimizerState {
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    std::int64_t step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected adaptive-moment update, applied element-wise in index order.
void adam_step(OptimizerState &state, Eigen::VectorXd &params, const Eigen::VectorXd &grad);

struct TrainConfig {
    int n_way = 4;
    int k_shot = 5;
    int q_queries = 5;
    int episodes = 500;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double temperature = 1.0;
    SimilarityKind similarity = SimilarityKind::Additive;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> metrics_path;
};

struct EpisodeMetrics {
    int episode = 0;
    double loss = 0.0;
    double accuracy = 0.0;
    double grad_norm = 0.0;
    int degenerate_qubits = 0;
};

struct TrainResult {
    EncoderModel model;
    std::vector<EpisodeMetrics> metrics;
};

TrainResult train(EncoderModel model, const LabeledDataset &dataset, const TrainConfig &config);

/// One JSON object per line: episode, loss, accuracy, grad_norm.
void write_metrics_log(std::ostream &out, std::span<const EpisodeMetrics> metrics);
void write_metrics_log(const std::filesystem::path &path, std::span<const EpisodeMetrics> metrics);

struct EvalConfig {
    int n_way = 4;
    int k_shot = 5;
    int q_queries = 5;
    int episodes = 150;
    std::uint64_t seed = 0;
    bool quantum = false;
    std::uint64_t shots = 100000;
    std::uint64_t shot_seed = 0;
};

struct EvalResult {
    double mean = 0.0;
    double interval = 0.0; ///< 1.96 * sample sd / sqrt(episodes)
    std::vector<double> episode_accuracy;
};

/// Classical mode classifies by argmax of the additive similarity; quantum
/// mode replaces each query/prototype similarity by the sum of per-qubit
/// inversion-test estimates. Episodes depend only on `seed`, so both modes
/// see the same tasks.
EvalResult evaluate(const EncoderModel &model, const LabeledDataset &dataset,
                    const EvalConfig &config);

/// mean and 1.96 * sd / sqrt(n) of a sample (sd with n - 1 denominator).
std::pair<double, double> mean_confidence_interval(std::span<const double> values);

} // namespace qpmel
