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
#include "qpmel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "qpmel/errors.hpp"
#include "qpmel/kernel.hpp"
#include "qpmel/oracle.hpp"

namespace qpmel {

SimilarityKind similarity_from_string(const std::string &name) {
    if (name == "additive" || name == "sum") {
        return SimilarityKind::Additive;
    }
    if (name == "multiplicative" || name == "product") {
        return SimilarityKind::Multiplicative;
    }
    throw ArgumentError("unknown similarity '" + name + "'");
}

// Episodes

void Episode::validate() const {
    detail::require<ArgumentError>(n_way >= 2 && k_shot >= 1 && q_queries >= 1,
                                   "episode: need n_way >= 2, k_shot >= 1, q_queries >= 1");
    detail::require<ArgumentError>(
        support.size() == support_class.size() && query.size() == query_class.size(),
        "episode: index/class length mismatch");
    std::vector<int> per_class(static_cast<size_t>(n_way), 0);
    for (int c : support_class) {
        detail::require<ArgumentError>(c >= 0 && c < n_way, "episode: support class out of range");
        ++per_class[static_cast<size_t>(c)];
    }
    for (int count : per_class) {
        detail::require<ArgumentError>(count == k_shot,
                                       "episode: every class needs exactly k_shot supports");
    }
    for (int c : query_class) {
        detail::require<ArgumentError>(c >= 0 && c < n_way, "episode: query class not in support");
    }
}

EpisodeSampler::EpisodeSampler(const LabeledDataset &dataset, int n_way, int k_shot,
                               int q_queries)
    : dataset_(&dataset), n_way_(n_way), k_shot_(k_shot), q_queries_(q_queries) {
    detail::require<ConfigError>(n_way >= 2 && k_shot >= 1 && q_queries >= 1,
                                 "episode sampler: need n_way >= 2, k_shot >= 1, q_queries >= 1");
    const size_t needed = static_cast<size_t>(k_shot) + static_cast<size_t>(q_queries);
    for (const auto &[c, rows] : dataset.class_index()) {
        if (rows.size() >= needed) {
            eligible_.push_back(c);
        }
    }
    detail::require<ConfigError>(
        eligible_.size() >= static_cast<size_t>(n_way),
        "episode sampler: " + std::to_string(eligible_.size()) + " classes have at least " +
            std::to_string(needed) + " samples, need " + std::to_string(n_way));
}

Episode EpisodeSampler::sample(Rng &rng) const {
    Episode ep;
    ep.n_way = n_way_;
    ep.k_shot = k_shot_;
    ep.q_queries = q_queries_;
    std::vector<int> classes = eligible_;
    // partial Fisher-Yates: the first n_way entries are a uniform draw
    for (int i = 0; i < n_way_; ++i) {
        const auto j = static_cast<size_t>(i) +
                       rng.below(static_cast<std::uint64_t>(classes.size() - static_cast<size_t>(i)));
        std::swap(classes[static_cast<size_t>(i)], classes[j]);
    }
    classes.resize(static_cast<size_t>(n_way_));
    ep.classes = classes;
    const size_t take = static_cast<size_t>(k_shot_ + q_queries_);
    for (int local = 0; local < n_way_; ++local) {
        std::vector<Eigen::Index> rows = dataset_->class_index().at(classes[static_cast<size_t>(local)]);
        for (size_t i = 0; i < take; ++i) {
            const size_t j = i + rng.below(rows.size() - i);
            std::swap(rows[i], rows[j]);
        }
        for (size_t i = 0; i < take; ++i) {
            if (i < static_cast<size_t>(k_shot_)) {
                ep.support.push_back(rows[i]);
                ep.support_class.push_back(local);
            } else {
                ep.query.push_back(rows[i]);
                ep.query_class.push_back(local);
            }
        }
    }
    return ep;
}

// Prototypes

namespace {

struct MeanResult {
    Triple<double> point;
    Triple<double> sum;
    bool degenerate;
};

MeanResult spherical_mean(const std::vector<Triple<double>> &points) {
    if (points.size() == 1) {
        // Already on the sphere; renormalising would only perturb the last bit.
        return {points.front(), points.front(), false};
    }
    Triple<double> sum = Triple<double>::Zero();
    for (const auto &p : points) {
        sum += p;
    }
    const double mean_norm = sum.norm() / static_cast<double>(points.size());
    if (mean_norm < kPrototypeDegenerateNorm) {
        return {points.front(), sum, true};
    }
    return {sum / sum.norm(), sum, false};
}

} // namespace

Prototype make_prototype(std::span<const AngularEncodingd> supports, int class_index) {
    detail::require<ArgumentError>(!supports.empty(), "make_prototype: no supports");
    const Eigen::Index qubits = supports.front().qubits();
    for (const auto &s : supports) {
        detail::require<DimensionError>(s.qubits() == qubits, "make_prototype: Q mismatch");
    }
    Points<double> points(3, qubits);
    std::vector<int> degenerate;
    for (Eigen::Index q = 0; q < qubits; ++q) {
        std::vector<Triple<double>> pts;
        pts.reserve(supports.size());
        for (const auto &s : supports) {
            pts.push_back(to_cartesian(s.theta(q), s.gamma(q)));
        }
        const MeanResult m = spherical_mean(pts);
        points.col(q) = m.point;
        if (m.degenerate) {
            degenerate.push_back(static_cast<int>(q));
        }
    }
    return {class_index, CartesianEncodingd(std::move(points)), std::move(degenerate)};
}

double prototype_similarity(const CartesianEncodingd &query, const CartesianEncodingd &proto,
                            SimilarityKind kind) {
    return kind == SimilarityKind::Additive ? pmef_train(query, proto) : pmef(query, proto);
}

Eigen::VectorXd similarity_logits(const AngularEncodingd &query,
                                  std::span<const Prototype> prototypes, double temperature,
                                  SimilarityKind kind) {
    detail::require<ArgumentError>(!prototypes.empty(), "similarity_logits: no prototypes");
    detail::require<ArgumentError>(temperature > 0.0 && std::isfinite(temperature),
                                   "similarity_logits: temperature must be > 0");
    const CartesianEncodingd cq = to_cartesian(query);
    Eigen::VectorXd logits(static_cast<Eigen::Index>(prototypes.size()));
    for (size_t c = 0; c < prototypes.size(); ++c) {
        logits[static_cast<Eigen::Index>(c)] =
            prototype_similarity(cq, prototypes[c].cartesian, kind) / temperature;
    }
    return logits;
}

// Loss

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd &logits) {
    const double mx = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

double log_sum_exp(const Eigen::VectorXd &logits) {
    const double mx = logits.maxCoeff();
    return mx + std::log((logits.array() - mx).exp().sum());
}

Eigen::Index argmax(const Eigen::VectorXd &v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

AngularGradient angular_from_points(const AngularEncodingd &a, const Points<double> &g) {
    AngularGradient out{Eigen::VectorXd(a.qubits()), Eigen::VectorXd(a.qubits())};
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        out.d_theta[q] = d_point_d_theta(a.theta(q), a.gamma(q)).dot(g.col(q));
        out.d_gamma[q] = d_point_d_gamma(a.theta(q), a.gamma(q)).dot(g.col(q));
    }
    return out;
}

} // namespace

ProtoLossResult proto_loss(const EpisodeEncodings &episode, double temperature,
                           SimilarityKind kind) {
    detail::require<ArgumentError>(temperature > 0.0, "proto_loss: temperature must be > 0");
    detail::require<ArgumentError>(episode.n_way >= 1 && !episode.query.empty(),
                                   "proto_loss: need classes and queries");
    detail::require<DimensionError>(episode.support.size() == episode.support_class.size() &&
                                        episode.query.size() == episode.query_class.size(),
                                    "proto_loss: encoding/class length mismatch");
    const Eigen::Index qubits = episode.query.front().qubits();
    const auto n_way = static_cast<size_t>(episode.n_way);

    std::vector<std::vector<size_t>> members(n_way);
    for (size_t i = 0; i < episode.support.size(); ++i) {
        const int c = episode.support_class[i];
        detail::require<ArgumentError>(c >= 0 && static_cast<size_t>(c) < n_way,
                                       "proto_loss: support class out of range");
        detail::require<DimensionError>(episode.support[i].qubits() == qubits,
                                        "proto_loss: Q mismatch");
        members[static_cast<size_t>(c)].push_back(i);
    }

    ProtoLossResult result;
    // Per class and qubit: the unnormalised sum and whether it degenerated.
    std::vector<Points<double>> sums(n_way, Points<double>(3, qubits));
    for (size_t c = 0; c < n_way; ++c) {
        detail::require<ArgumentError>(!members[c].empty(),
                                       "proto_loss: class " + std::to_string(c) + " has no supports");
        std::vector<AngularEncodingd> sup;
        for (size_t i : members[c]) {
            sup.push_back(episode.support[i]);
        }
        Prototype p = make_prototype(sup, static_cast<int>(c));
        result.degenerate_qubits += static_cast<int>(p.degenerate_qubits.size());
        for (Eigen::Index q = 0; q < qubits; ++q) {
            Triple<double> s = Triple<double>::Zero();
            for (size_t i : members[c]) {
                s += to_cartesian(episode.support[i].theta(q), episode.support[i].gamma(q));
            }
            sums[c].col(q) = s;
        }
        result.prototypes.push_back(std::move(p));
    }

    // dL/d(prototype point), accumulated over queries in ascending order.
    std::vector<Points<double>> d_proto(n_way, Points<double>::Zero(3, qubits));
    const double n_queries = static_cast<double>(episode.query.size());
    size_t correct = 0;
    for (size_t j = 0; j < episode.query.size(); ++j) {
        const AngularEncodingd &qa = episode.query[j];
        detail::require<DimensionError>(qa.qubits() == qubits, "proto_loss: Q mismatch");
        const int label = episode.query_class[j];
        detail::require<ArgumentError>(label >= 0 && static_cast<size_t>(label) < n_way,
                                       "proto_loss: query class out of range");
        const CartesianEncodingd cq = to_cartesian(qa);

        Eigen::VectorXd logits(static_cast<Eigen::Index>(n_way));
        std::vector<Eigen::VectorXd> fids(n_way);
        for (size_t c = 0; c < n_way; ++c) {
            fids[c] = qubit_fidelities(cq, result.prototypes[c].cartesian);
            logits[static_cast<Eigen::Index>(c)] =
                (kind == SimilarityKind::Additive ? fids[c].sum() : fids[c].prod()) / temperature;
        }
        result.loss += (log_sum_exp(logits) - logits[label]) / n_queries;
        if (argmax(logits) == label) {
            ++correct;
        }

        const Eigen::VectorXd p = softmax(logits);
        Points<double> d_query = Points<double>::Zero(3, qubits);
        for (size_t c = 0; c < n_way; ++c) {
            const double d_sim = (p[static_cast<Eigen::Index>(c)] -
                                  (static_cast<int>(c) == label ? 1.0 : 0.0)) /
                                 (temperature * n_queries);
            for (Eigen::Index q = 0; q < qubits; ++q) {
                double weight = d_sim;
                if (kind == SimilarityKind::Multiplicative) {
                    for (Eigen::Index r = 0; r < qubits; ++r) {
                        if (r != q) {
                            weight *= fids[c][r];
                        }
                    }
                }
                const auto [dq, dm] = ckf_point_gradient<double>(
                    cq.point(q), result.prototypes[c].cartesian.point(q));
                d_query.col(q) += weight * dq;
                d_proto[c].col(q) += weight * dm;
            }
        }
        result.d_query.push_back(angular_from_points(qa, d_query));
    }
    result.accuracy = static_cast<double>(correct) / n_queries;

    // Back through m = s / |s| (or the first support when degenerate).
    std::vector<Points<double>> d_support_points(episode.support.size(),
                                                 Points<double>::Zero(3, qubits));
    for (size_t c = 0; c < n_way; ++c) {
        const auto &degenerate = result.prototypes[c].degenerate_qubits;
        for (Eigen::Index q = 0; q < qubits; ++q) {
            const Triple<double> g = d_proto[c].col(q);
            if (std::find(degenerate.begin(), degenerate.end(), static_cast<int>(q)) !=
                degenerate.end()) {
                d_support_points[members[c].front()].col(q) += g;
                continue;
            }
            const Triple<double> s = sums[c].col(q);
            const double norm = s.norm();
            const Triple<double> m = s / norm;
            const Triple<double> d_sum = (g - m * m.dot(g)) / norm;
            for (size_t i : members[c]) {
                d_support_points[i].col(q) += d_sum;
            }
        }
    }
    for (size_t i = 0; i < episode.support.size(); ++i) {
        result.d_support.push_back(angular_from_points(episode.support[i], d_support_points[i]));
    }
    return result;
}

void adam_step(OptimizerState &state, Eigen::VectorXd &params, const Eigen::VectorXd &grad) {
    detail::require<DimensionError>(params.size() == grad.size(),
                                    "adam: parameter/gradient size mismatch");
    if (state.first_moment.size() != params.size()) {
        detail::require<DimensionError>(state.step == 0 && state.first_moment.size() == 0,
                                        "adam: state shaped for a different model");
        state.first_moment = Eigen::VectorXd::Zero(params.size());
        state.second_moment = Eigen::VectorXd::Zero(params.size());
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        double &m = state.first_moment[i];
        double &v = state.second_moment[i];
        m = state.beta1 * m + (1.0 - state.beta1) * grad[i];
        v = state.beta2 * v + (1.0 - state.beta2) * grad[i] * grad[i];
        params[i] -= state.learning_rate * (m / c1) / (std::sqrt(v / c2) + state.epsilon);
    }
}

// Training

namespace {

struct EncodedEpisode {
    EpisodeEncodings encodings;
    ForwardTrace trace;
};

EncodedEpisode encode_episode(const EncoderModel &model, const LabeledDataset &ds,
                              const Episode &ep) {
    std::vector<Eigen::Index> rows = ep.support;
    rows.insert(rows.end(), ep.query.begin(), ep.query.end());
    auto [batch, trace] = forward(model, ds.gather_columns(rows));
    EncodedEpisode out;
    out.encodings.n_way = ep.n_way;
    out.encodings.support_class = ep.support_class;
    out.encodings.query_class = ep.query_class;
    const auto n_support = static_cast<Eigen::Index>(ep.support.size());
    for (Eigen::Index j = 0; j < batch.batch(); ++j) {
        (j < n_support ? out.encodings.support : out.encodings.query).push_back(batch.encoding(j));
    }
    out.trace = std::move(trace);
    return out;
}

} // namespace

TrainResult train(EncoderModel model, const LabeledDataset &dataset, const TrainConfig &config) {
    detail::require<ConfigError>(config.episodes >= 0, "train: episodes must be >= 0");
    detail::require<ConfigError>(config.temperature > 0.0, "train: temperature must be > 0");
    detail::require<ConfigError>(config.learning_rate > 0.0, "train: learning rate must be > 0");
    detail::require<ConfigError>(dataset.feature_dim() == model.input_dim(),
                                 "train: dataset has " + std::to_string(dataset.feature_dim()) +
                                     " features, encoder expects " +
                                     std::to_string(model.input_dim()));
    detail::require<ConfigError>(dataset.num_classes() >= static_cast<size_t>(config.n_way),
                                 "train: dataset has " + std::to_string(dataset.num_classes()) +
                                     " classes, n_way is " + std::to_string(config.n_way));
    const EpisodeSampler sampler(dataset, config.n_way, config.k_shot, config.q_queries);
    Rng rng(derive_seed(config.seed, "train-episodes"));

    OptimizerState opt;
    opt.learning_rate = config.learning_rate;
    opt.beta1 = config.beta1;
    opt.beta2 = config.beta2;
    opt.epsilon = config.epsilon;

    TrainResult result{std::move(model), {}};
    EncoderModel &m = result.model;
    const Eigen::Index qubits = m.qubits();
    for (int e = 0; e < config.episodes; ++e) {
        const Episode ep = sampler.sample(rng);
        const EncodedEpisode enc = encode_episode(m, dataset, ep);
        const ProtoLossResult loss = proto_loss(enc.encodings, config.temperature, config.similarity);

        const auto n_support = ep.support.size();
        const auto batch = static_cast<Eigen::Index>(n_support + ep.query.size());
        Eigen::MatrixXd d_theta(qubits, batch);
        Eigen::MatrixXd d_gamma(qubits, batch);
        for (Eigen::Index j = 0; j < batch; ++j) {
            const auto ju = static_cast<size_t>(j);
            const AngularGradient &g =
                ju < n_support ? loss.d_support[ju] : loss.d_query[ju - n_support];
            d_theta.col(j) = g.d_theta;
            d_gamma.col(j) = g.d_gamma;
        }
        const Eigen::VectorXd grad = backward(m, enc.trace, d_theta, d_gamma).flatten();
        Eigen::VectorXd params = m.parameters();
        adam_step(opt, params, grad);
        m.set_parameters(params);

        result.metrics.push_back({e + 1, loss.loss, loss.accuracy, grad.norm(),
                                  loss.degenerate_qubits});
    }
    if (config.metrics_path) {
        write_metrics_log(*config.metrics_path, result.metrics);
    }
    return result;
}

void write_metrics_log(std::ostream &out, std::span<const EpisodeMetrics> metrics) {
    for (const auto &m : metrics) {
        nlohmann::ordered_json j;
        j["episode"] = m.episode;
        j["loss"] = m.loss;
        j["accuracy"] = m.accuracy;
        j["grad_norm"] = m.grad_norm;
        if (m.degenerate_qubits != 0) {
            j["degenerate_qubits"] = m.degenerate_qubits;
        }
        out << j.dump() << '\n';
    }
}

void write_metrics_log(const std::filesystem::path &path,
                       std::span<const EpisodeMetrics> metrics) {
    std::ofstream out(path);
    if (!out) {
        throw ArgumentError("cannot write metrics log: " + path.string());
    }
    write_metrics_log(out, metrics);
}

// Evaluation

std::pair<double, double> mean_confidence_interval(std::span<const double> values) {
    detail::require<ArgumentError>(values.size() >= 2, "confidence interval: need >= 2 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n)};
}

EvalResult evaluate(const EncoderModel &model, const LabeledDataset &dataset,
                    const EvalConfig &config) {
    detail::require<ConfigError>(config.episodes >= 2, "evaluate: need at least 2 episodes");
    detail::require<ConfigError>(dataset.feature_dim() == model.input_dim(),
                                 "evaluate: dataset/encoder input dimension mismatch");
    detail::require<ConfigError>(dataset.num_classes() >= static_cast<size_t>(config.n_way),
                                 "evaluate: dataset has fewer classes than n_way");
    detail::require<ConfigError>(!config.quantum || config.shots >= 1,
                                 "evaluate: shots must be >= 1");
    const EpisodeSampler sampler(dataset, config.n_way, config.k_shot, config.q_queries);
    Rng rng(derive_seed(config.seed, "eval-episodes"));

    EvalResult result;
    for (int e = 0; e < config.episodes; ++e) {
        const Episode ep = sampler.sample(rng);
        const EncodedEpisode enc = encode_episode(model, dataset, ep);
        std::vector<Prototype> protos;
        for (int c = 0; c < ep.n_way; ++c) {
            std::vector<AngularEncodingd> sup;
            for (size_t i = 0; i < enc.encodings.support.size(); ++i) {
                if (enc.encodings.support_class[i] == c) {
                    sup.push_back(enc.encodings.support[i]);
                }
            }
            protos.push_back(make_prototype(sup, c));
        }
        std::vector<AngularEncodingd> proto_angles;
        if (config.quantum) {
            for (const auto &p : protos) {
                proto_angles.push_back(to_angular(p.cartesian));
            }
        }
        const std::uint64_t episode_seed = derive_seed(config.shot_seed, static_cast<std::uint64_t>(e));
        size_t correct = 0;
        for (size_t j = 0; j < enc.encodings.query.size(); ++j) {
            const AngularEncodingd &query = enc.encodings.query[j];
            Eigen::VectorXd scores;
            if (!config.quantum) {
                scores = similarity_logits(query, protos, 1.0);
            } else {
                scores.resize(ep.n_way);
                for (int c = 0; c < ep.n_way; ++c) {
                    const std::uint64_t pair_seed =
                        derive_seed(episode_seed, j * static_cast<size_t>(ep.n_way) + static_cast<size_t>(c));
                    double s = 0.0;
                    for (Eigen::Index q = 0; q < query.qubits(); ++q) {
                        s += inversion_test(query.qubit(q), proto_angles[static_cast<size_t>(c)].qubit(q),
                                            config.shots,
                                            derive_seed(pair_seed, static_cast<std::uint64_t>(q)))
                                 .estimate;
                    }
                    scores[c] = s;
                }
            }
            if (argmax(scores) == enc.encodings.query_class[j]) {
                ++correct;
            }
        }
        result.episode_accuracy.push_back(static_cast<double>(correct) /
                                          static_cast<double>(enc.encodings.query.size()));
    }
    std::tie(result.mean, result.interval) = mean_confidence_interval(result.episode_accuracy);
    return result;
}

} // namespace qpmel
