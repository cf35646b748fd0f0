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
 * Depth-2 encoding circuits and their OpenQASM 2.0 form.
 *
 * Qubit q is prepared by RY(2 theta_q) followed by RZ(gamma_q), which gives
 * e^{-i gamma_q / 2} (cos theta_q |0> + e^{i gamma_q} sin theta_q |1>), i.e.
 * the oracle state up to a global phase. q[0] is the most significant bit,
 * matching build_state.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qpmel/geometry.hpp"
#include "qpmel/oracle.hpp"

namespace qpmel {

enum class GateKind { RY, RZ };

struct Gate {
    GateKind kind;
    int qubit;
    double angle;

    bool operator==(const Gate &) const = default;
};

/// Exactly two gates per qubit, RY then RZ, qubits in ascending order.
class EncodingCircuit {
  public:
    EncodingCircuit(int qubits, std::vector<Gate> gates);

    [[nodiscard]] int qubits() const { return qubits_; }
    [[nodiscard]] const std::vector<Gate> &gates() const { return gates_; }

    bool operator==(const EncodingCircuit &) const = default;

  private:
    int qubits_;
    std::vector<Gate> gates_;
};

EncodingCircuit to_circuit(const AngularEncodingd &a);

/// OpenQASM 2.0 text; angles printed with 17 significant digits.
std::string emit_qasm(const EncodingCircuit &circuit);

/// Reads text produced by emit_qasm. Throws FormatError on anything else.
EncodingCircuit parse_qasm(std::string_view text);

/// Applies the circuit's gates to |0...0> with the standard RY/RZ matrices.
Statevectord simulate(const EncodingCircuit &circuit);

} // namespace qpmel
