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
#include "qpmel/encoder.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "qpmel/errors.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

Activation activation_from_string(const std::string &name) {
    if (name == "relu") {
        return Activation::ReLU;
    }
    if (name == "tanh") {
        return Activation::Tanh;
    }
    if (name == "identity" || name == "linear") {
        return Activation::Identity;
    }
    throw ArgumentError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::ReLU:
        return "relu";
    case Activation::Tanh:
        return "tanh";
    case Activation::Identity:
        return "identity";
    }
    return "unknown";
}

namespace {

DenseLayer zero_layer(int in, int out, Activation act) {
    return {Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out), act};
}

Eigen::MatrixXd activate(const Eigen::MatrixXd &z, Activation a) {
    switch (a) {
    case Activation::ReLU:
        return z.cwiseMax(0.0);
    case Activation::Tanh:
        return z.array().tanh().matrix();
    case Activation::Identity:
        break;
    }
    return z;
}

/// dL/dz given dL/da, the pre-activation z and activation a.
Eigen::MatrixXd activation_backward(const Eigen::MatrixXd &grad, const Eigen::MatrixXd &z,
                                    const Eigen::MatrixXd &a, Activation act) {
    switch (act) {
    case Activation::ReLU:
        return (z.array() > 0.0).select(grad, 0.0);
    case Activation::Tanh:
        return (grad.array() * (1.0 - a.array().square())).matrix();
    case Activation::Identity:
        break;
    }
    return grad;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Eigen::MatrixXd affine(const DenseLayer &layer, const Eigen::MatrixXd &x) {
    Eigen::MatrixXd z = layer.weight * x;
    z.colwise() += layer.bias;
    return z;
}

template <class Fn> void for_each_layer(const EncoderModel &m, Fn &&fn) {
    for (const auto &l : m.trunk()) {
        fn(l);
    }
    fn(m.theta_head());
    fn(m.gamma_head());
}

template <class Fn> void for_each_layer(EncoderModel &m, Fn &&fn) {
    for (auto &l : m.trunk()) {
        fn(l);
    }
    fn(m.theta_head());
    fn(m.gamma_head());
}

void append_layer(const DenseLayer &l, Eigen::VectorXd &out, Eigen::Index &pos) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
            out[pos++] = l.weight(r, c);
        }
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
        out[pos++] = l.bias[r];
    }
}

} // namespace

EncoderModel::EncoderModel(std::vector<int> layer_dims, int qubits,
                           Activation trunk_activation)
    : layer_dims_(std::move(layer_dims)), qubits_(qubits) {
    detail::require<ArgumentError>(!layer_dims_.empty(), "encoder: layer_dims is empty");
    detail::require<ArgumentError>(qubits_ >= 1, "encoder: Q must be >= 1");
    for (int d : layer_dims_) {
        detail::require<ArgumentError>(d >= 1, "encoder: zero layer dimension");
    }
    for (size_t i = 0; i + 1 < layer_dims_.size(); ++i) {
        trunk_.push_back(zero_layer(layer_dims_[i], layer_dims_[i + 1], trunk_activation));
    }
    theta_head_ = zero_layer(layer_dims_.back(), qubits_, Activation::Identity);
    gamma_head_ = zero_layer(layer_dims_.back(), qubits_, Activation::Identity);
}

Eigen::Index EncoderModel::parameter_count() const {
    Eigen::Index n = 0;
    for_each_layer(*this, [&](const DenseLayer &l) { n += l.weight.size() + l.bias.size(); });
    return n;
}

Eigen::VectorXd EncoderModel::parameters() const {
    Eigen::VectorXd out(parameter_count());
    Eigen::Index pos = 0;
    for_each_layer(*this, [&](const DenseLayer &l) { append_layer(l, out, pos); });
    return out;
}

void EncoderModel::set_parameters(const Eigen::VectorXd &flat) {
    detail::require<DimensionError>(flat.size() == parameter_count(),
                                    "encoder: parameter vector has " +
                                        std::to_string(flat.size()) + " entries, expected " +
                                        std::to_string(parameter_count()));
    Eigen::Index pos = 0;
    for_each_layer(*this, [&](DenseLayer &l) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
                l.weight(r, c) = flat[pos++];
            }
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
            l.bias[r] = flat[pos++];
        }
    });
}

EncoderModel init_encoder(const std::vector<int> &layer_dims, int qubits, std::uint64_t seed,
                          Activation trunk_activation) {
    EncoderModel model(layer_dims, qubits, trunk_activation);
    Rng rng(seed);
    for_each_layer(model, [&](DenseLayer &l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l.in_dim()));
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
                l.weight(r, c) = rng.uniform(-limit, limit);
            }
        }
    });
    return model;
}

AngularEncodingd BatchEncoding::encoding(Eigen::Index column) const {
    return {thetas.col(column), gammas.col(column)};
}

std::vector<AngularEncodingd> BatchEncoding::encodings() const {
    std::vector<AngularEncodingd> out;
    out.reserve(static_cast<size_t>(batch()));
    for (Eigen::Index j = 0; j < batch(); ++j) {
        out.push_back(encoding(j));
    }
    return out;
}

std::pair<BatchEncoding, ForwardTrace> forward(const EncoderModel &model,
                                               const Eigen::MatrixXd &batch) {
    detail::require<DimensionError>(batch.rows() == model.input_dim(),
                                    "encoder forward: input has " +
                                        std::to_string(batch.rows()) + " features, expected " +
                                        std::to_string(model.input_dim()));
    ForwardTrace trace;
    trace.input = batch;
    const Eigen::MatrixXd *x = &trace.input;
    for (const DenseLayer &layer : model.trunk()) {
        trace.pre_activations.push_back(affine(layer, *x));
        trace.activations.push_back(activate(trace.pre_activations.back(), layer.activation));
        x = &trace.activations.back();
    }
    trace.theta_logits = affine(model.theta_head(), *x);
    trace.gamma_logits = affine(model.gamma_head(), *x);

    constexpr double pi = std::numbers::pi;
    BatchEncoding out;
    out.thetas = trace.theta_logits.unaryExpr([](double u) { return pi * sigmoid(u); });
    out.gammas =
        trace.gamma_logits.unaryExpr([](double v) { return pi * (2.0 * sigmoid(v) - 1.0); });
    return {std::move(out), std::move(trace)};
}

std::pair<AngularEncodingd, ForwardTrace> forward(const EncoderModel &model,
                                                  const Eigen::VectorXd &x) {
    auto [batch, trace] = forward(model, Eigen::MatrixXd(x));
    return {batch.encoding(0), std::move(trace)};
}

Eigen::VectorXd EncoderGradients::flatten() const {
    Eigen::Index n = 0;
    auto count = [&](const DenseLayer &l) { n += l.weight.size() + l.bias.size(); };
    for (const auto &l : trunk) {
        count(l);
    }
    count(theta_head);
    count(gamma_head);
    Eigen::VectorXd out(n);
    Eigen::Index pos = 0;
    for (const auto &l : trunk) {
        append_layer(l, out, pos);
    }
    append_layer(theta_head, out, pos);
    append_layer(gamma_head, out, pos);
    return out;
}

EncoderGradients backward(const EncoderModel &model, const ForwardTrace &trace,
                          const Eigen::MatrixXd &d_theta, const Eigen::MatrixXd &d_gamma) {
    const Eigen::Index batch = trace.input.cols();
    detail::require<DimensionError>(
        d_theta.rows() == model.qubits() && d_gamma.rows() == model.qubits() &&
            d_theta.cols() == batch && d_gamma.cols() == batch,
        "encoder backward: upstream gradients must be Q x batch");
    detail::require<DimensionError>(
        trace.activations.size() == model.trunk().size() &&
            trace.theta_logits.rows() == model.qubits() && trace.theta_logits.cols() == batch,
        "encoder backward: trace does not match model");

    constexpr double pi = std::numbers::pi;
    // d theta / du = pi s (1 - s);  d gamma / dv = 2 pi s (1 - s)
    const Eigen::MatrixXd d_u = trace.theta_logits.binaryExpr(d_theta, [](double u, double g) {
        const double s = sigmoid(u);
        return g * pi * s * (1.0 - s);
    });
    const Eigen::MatrixXd d_v = trace.gamma_logits.binaryExpr(d_gamma, [](double v, double g) {
        const double s = sigmoid(v);
        return g * 2.0 * pi * s * (1.0 - s);
    });

    const Eigen::MatrixXd &trunk_out =
        model.trunk().empty() ? trace.input : trace.activations.back();

    EncoderGradients grads;
    grads.theta_head = {d_u * trunk_out.transpose(), d_u.rowwise().sum(), Activation::Identity};
    grads.gamma_head = {d_v * trunk_out.transpose(), d_v.rowwise().sum(), Activation::Identity};

    Eigen::MatrixXd upstream = model.theta_head().weight.transpose() * d_u +
                               model.gamma_head().weight.transpose() * d_v;
    grads.trunk.resize(model.trunk().size());
    for (size_t li = model.trunk().size(); li-- > 0;) {
        const DenseLayer &layer = model.trunk()[li];
        const Eigen::MatrixXd d_z = activation_backward(upstream, trace.pre_activations[li],
                                                        trace.activations[li], layer.activation);
        const Eigen::MatrixXd &x = li == 0 ? trace.input : trace.activations[li - 1];
        grads.trunk[li] = {d_z * x.transpose(), d_z.rowwise().sum(), layer.activation};
        if (li > 0) {
            upstream = layer.weight.transpose() * d_z;
        }
    }
    return grads;
}

// Checkpoints

namespace {

constexpr std::array<char, 6> kMagic = {'Q', 'P', 'M', 'E', 'L', '1'};

template <class T> void put_le(std::ostream &out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const U bits = std::bit_cast<U>(value);
    for (size_t i = 0; i < sizeof(T); ++i) {
        out.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
}

template <class T> T get_le(std::istream &in, const char *what) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    std::array<unsigned char, sizeof(T)> b{};
    in.read(reinterpret_cast<char *>(b.data()), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
        throw LengthError(std::string("checkpoint: truncated while reading ") + what);
    }
    U bits = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        bits |= static_cast<U>(U{b[i]} << (8 * i));
    }
    return std::bit_cast<T>(bits);
}

} // namespace

void save_checkpoint(const EncoderModel &model, std::ostream &out) {
    out.write(kMagic.data(), kMagic.size());
    put_le(out, kCheckpointVersion);
    put_le(out, static_cast<std::uint32_t>(model.qubits()));
    put_le(out, static_cast<std::uint32_t>(model.layer_dims().size()));
    for (int d : model.layer_dims()) {
        put_le(out, static_cast<std::uint32_t>(d));
    }
    for (const auto &layer : model.trunk()) {
        put_le(out, static_cast<std::uint8_t>(layer.activation));
    }
    const Eigen::VectorXd params = model.parameters();
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        put_le(out, params[i]);
    }
}

EncoderModel load_checkpoint(std::istream &in) {
    std::array<char, 6> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kMagic) {
        throw FormatError("checkpoint: missing QPMEL1 magic");
    }
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto qubits = get_le<std::uint32_t>(in, "Q");
    const auto n_dims = get_le<std::uint32_t>(in, "layer count");
    if (n_dims == 0 || n_dims > 1024) {
        throw FormatError("checkpoint: implausible layer count " + std::to_string(n_dims));
    }
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < n_dims; ++i) {
        dims.push_back(static_cast<int>(get_le<std::uint32_t>(in, "layer dims")));
    }
    std::vector<Activation> acts;
    for (std::uint32_t i = 0; i + 1 < n_dims; ++i) {
        const auto tag = get_le<std::uint8_t>(in, "activation tags");
        if (tag > static_cast<std::uint8_t>(Activation::Tanh)) {
            throw FormatError("checkpoint: unknown activation tag " + std::to_string(tag));
        }
        acts.push_back(static_cast<Activation>(tag));
    }
    EncoderModel model(dims, static_cast<int>(qubits),
                       acts.empty() ? Activation::ReLU : acts.front());
    for (size_t i = 0; i < acts.size(); ++i) {
        model.trunk()[i].activation = acts[i];
    }
    Eigen::VectorXd params(model.parameter_count());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        params[i] = get_le<double>(in, "parameters");
    }
    model.set_parameters(params);
    return model;
}

void save_checkpoint(const EncoderModel &model, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ArgumentError("cannot write checkpoint: " + path.string());
    }
    save_checkpoint(model, out);
}

EncoderModel load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError("cannot open checkpoint: " + path.string());
    }
    return load_checkpoint(in);
}

} // namespace qpmel
