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
 * Dense encoder with two angle-projection heads.
 *
 * The trunk is a stack of affine layers with an activation (ReLU by default)
 * over layer_dims = (input, hidden..., trunk_out). Two independent affine
 * heads map the trunk output to Q logits each, which are range-scaled:
 *
 *     theta = pi * sigmoid(u)            in [0, pi]
 *     gamma = pi * (2 sigmoid(v) - 1)    in [-pi, pi]
 *
 * Samples are processed in batches stored as matrix columns.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qpmel/geometry.hpp"

namespace qpmel {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1, Tanh = 2 };

Activation activation_from_string(const std::string &name);
std::string to_string(Activation a);

struct DenseLayer {
    Eigen::MatrixXd weight; ///< out x in
    Eigen::VectorXd bias;   ///< out
    Activation activation = Activation::Identity;

    [[nodiscard]] Eigen::Index in_dim() const { return weight.cols(); }
    [[nodiscard]] Eigen::Index out_dim() const { return weight.rows(); }
    bool operator==(const DenseLayer &) const = default;
};

class EncoderModel {
  public:
    /// Zero-initialised model; see init_encoder for random weights.
    EncoderModel(std::vector<int> layer_dims, int qubits,
                 Activation trunk_activation = Activation::ReLU);

    [[nodiscard]] const std::vector<int> &layer_dims() const { return layer_dims_; }
    [[nodiscard]] int qubits() const { return qubits_; }
    [[nodiscard]] int input_dim() const { return layer_dims_.front(); }

    [[nodiscard]] std::vector<DenseLayer> &trunk() { return trunk_; }
    [[nodiscard]] const std::vector<DenseLayer> &trunk() const { return trunk_; }
    [[nodiscard]] DenseLayer &theta_head() { return theta_head_; }
    [[nodiscard]] const DenseLayer &theta_head() const { return theta_head_; }
    [[nodiscard]] DenseLayer &gamma_head() { return gamma_head_; }
    [[nodiscard]] const DenseLayer &gamma_head() const { return gamma_head_; }

    /// Parameters in checkpoint order: trunk layers ascending, then the theta
    /// head, then the gamma head; each layer's weight row-major, then bias.
    [[nodiscard]] Eigen::Index parameter_count() const;
    [[nodiscard]] Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd &flat);

    bool operator==(const EncoderModel &) const = default;

  private:
    std::vector<int> layer_dims_;
    int qubits_;
    std::vector<DenseLayer> trunk_;
    DenseLayer theta_head_;
    DenseLayer gamma_head_;
};

/// Random model: every weight ~ U(-sqrt(6 / fan_in), sqrt(6 / fan_in)), so
/// Var = 2 / fan_in; biases are zero.
EncoderModel init_encoder(const std::vector<int> &layer_dims, int qubits, std::uint64_t seed,
                          Activation trunk_activation = Activation::ReLU);

/// Values retained by forward() for backward().
struct ForwardTrace {
    Eigen::MatrixXd input;                    ///< in x B
    std::vector<Eigen::MatrixXd> activations; ///< post-activation per trunk layer
    std::vector<Eigen::MatrixXd> pre_activations;
    Eigen::MatrixXd theta_logits; ///< Q x B
    Eigen::MatrixXd gamma_logits; ///< Q x B
};

struct BatchEncoding {
    Eigen::MatrixXd thetas; ///< Q x B
    Eigen::MatrixXd gammas; ///< Q x B

    [[nodiscard]] Eigen::Index batch() const { return thetas.cols(); }
    [[nodiscard]] AngularEncodingd encoding(Eigen::Index column) const;
    [[nodiscard]] std::vector<AngularEncodingd> encodings() const;
};

std::pair<BatchEncoding, ForwardTrace> forward(const EncoderModel &model,
                                               const Eigen::MatrixXd &batch);
std::pair<AngularEncodingd, ForwardTrace> forward(const EncoderModel &model,
                                                  const Eigen::VectorXd &x);

/// Parameter gradients, shaped like the model.
struct EncoderGradients {
    std::vector<DenseLayer> trunk;
    DenseLayer theta_head;
    DenseLayer gamma_head;

    /// Same order as EncoderModel::parameters().
    [[nodiscard]] Eigen::VectorXd flatten() const;
};

/// Reverse-mode pass. d_theta and d_gamma are Q x B upstream gradients of a
/// scalar loss w.r.t. the forward outputs; the result sums over the batch.
EncoderGradients backward(const EncoderModel &model, const ForwardTrace &trace,
                          const Eigen::MatrixXd &d_theta, const Eigen::MatrixXd &d_gamma);

// Checkpoint format "QPMEL1" (all integers and floats little-endian):
//   6 bytes  "QPMEL1"
//   u32      format version (1)
//   u32      Q
//   u32      number of layer dims L, then L x u32 layer dims
//   u8       trunk activation tag per trunk layer (L - 1 bytes)
//   f64      parameters in EncoderModel::parameters() order
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const EncoderModel &model, std::ostream &out);
EncoderModel load_checkpoint(std::istream &in);
void save_checkpoint(const EncoderModel &model, const std::filesystem::path &path);
EncoderModel load_checkpoint(const std::filesystem::path &path);

} // namespace qpmel
