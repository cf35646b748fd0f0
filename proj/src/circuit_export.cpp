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
#include "qpmel/circuit_export.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace qpmel {

EncodingCircuit::EncodingCircuit(int qubits, std::vector<Gate> gates)
    : qubits_(qubits), gates_(std::move(gates)) {
    detail::require<DimensionError>(qubits_ >= 1, "circuit: Q must be >= 1");
    detail::require<DimensionError>(gates_.size() == 2 * static_cast<size_t>(qubits_),
                                    "circuit: expected exactly 2 gates per qubit");
    constexpr double pi = std::numbers::pi;
    for (int q = 0; q < qubits_; ++q) {
        const Gate &ry = gates_[2 * q];
        const Gate &rz = gates_[2 * q + 1];
        detail::require<FormatError>(ry.kind == GateKind::RY && rz.kind == GateKind::RZ,
                                     "circuit: each qubit needs RY then RZ");
        detail::require<FormatError>(ry.qubit == q && rz.qubit == q,
                                     "circuit: gates out of qubit order");
        detail::require<InvalidEncodingError>(ry.angle >= 0.0 && ry.angle <= 2.0 * pi,
                                              "circuit: RY angle outside [0, 2pi]");
        detail::require<InvalidEncodingError>(rz.angle >= -pi && rz.angle <= pi,
                                              "circuit: RZ angle outside [-pi, pi]");
    }
}

EncodingCircuit to_circuit(const AngularEncodingd &a) {
    std::vector<Gate> gates;
    gates.reserve(2 * a.qubits());
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        const int qi = static_cast<int>(q);
        gates.push_back({GateKind::RY, qi, 2.0 * a.theta(q)});
        gates.push_back({GateKind::RZ, qi, a.gamma(q)});
    }
    return EncodingCircuit(static_cast<int>(a.qubits()), std::move(gates));
}

namespace {

std::string format_angle(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void bad_line(size_t line_no, std::string_view line, const char *why) {
    throw FormatError("qasm line " + std::to_string(line_no) + ": " + why + ": '" +
                      std::string(line) + "'");
}

int parse_int(std::string_view s, size_t line_no, std::string_view line) {
    if (s.empty()) {
        bad_line(line_no, line, "missing integer");
    }
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            bad_line(line_no, line, "bad integer");
        }
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace

std::string emit_qasm(const EncodingCircuit &circuit) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.qubits() << "];\n";
    for (const Gate &g : circuit.gates()) {
        out << (g.kind == GateKind::RY ? "ry(" : "rz(") << format_angle(g.angle) << ") q["
            << g.qubit << "];\n";
    }
    return out.str();
}

EncodingCircuit parse_qasm(std::string_view text) {
    int qubits = -1;
    bool saw_header = false;
    bool saw_include = false;
    std::vector<Gate> gates;
    size_t line_no = 0;
    while (!text.empty()) {
        const size_t nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.starts_with("//")) {
            continue;
        }
        if (!saw_header) {
            if (line != "OPENQASM 2.0;") {
                bad_line(line_no, line, "expected OPENQASM 2.0 header");
            }
            saw_header = true;
            continue;
        }
        if (line == "include \"qelib1.inc\";") {
            saw_include = true;
            continue;
        }
        if (line.starts_with("qreg q[")) {
            if (qubits >= 0 || !line.ends_with("];")) {
                bad_line(line_no, line, "bad register declaration");
            }
            qubits = parse_int(line.substr(7, line.size() - 9), line_no, line);
            continue;
        }
        GateKind kind;
        if (line.starts_with("ry(")) {
            kind = GateKind::RY;
        } else if (line.starts_with("rz(")) {
            kind = GateKind::RZ;
        } else {
            bad_line(line_no, line, "unsupported statement");
        }
        if (qubits < 0) {
            bad_line(line_no, line, "gate before register declaration");
        }
        const size_t close = line.find(") q[");
        if (close == std::string_view::npos || !line.ends_with("];")) {
            bad_line(line_no, line, "malformed gate");
        }
        const std::string angle_text(line.substr(3, close - 3));
        char *end = nullptr;
        errno = 0;
        const double angle = std::strtod(angle_text.c_str(), &end);
        if (errno != 0 || end != angle_text.c_str() + angle_text.size() ||
            angle_text.empty()) {
            bad_line(line_no, line, "bad angle literal");
        }
        const size_t qstart = close + 4;
        const int qubit = parse_int(line.substr(qstart, line.size() - 2 - qstart), line_no, line);
        if (qubit >= qubits) {
            bad_line(line_no, line, "qubit index out of range");
        }
        gates.push_back({kind, qubit, angle});
    }
    if (!saw_header || !saw_include || qubits < 0) {
        throw FormatError("qasm: missing header, include or register declaration");
    }
    return EncodingCircuit(qubits, std::move(gates));
}

Statevectord simulate(const EncodingCircuit &circuit) {
    using Complex = std::complex<double>;
    const int n = circuit.qubits();
    detail::require<CapacityError>(n <= kMaxOracleQubits, "simulate: more than 20 qubits");
    Statevectord::Amplitudes state = Statevectord::Amplitudes::Zero(Eigen::Index{1} << n);
    state[0] = 1.0;
    for (const Gate &g : circuit.gates()) {
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - g.qubit);
        Eigen::Matrix2cd u;
        if (g.kind == GateKind::RY) {
            const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            u << c, -s, s, c;
        } else {
            u << std::polar(1.0, -g.angle / 2), Complex(0), Complex(0),
                std::polar(1.0, g.angle / 2);
        }
        for (Eigen::Index i = 0; i < state.size(); ++i) {
            if ((i & bit) != 0) {
                continue;
            }
            const Complex a0 = state[i];
            const Complex a1 = state[i | bit];
            state[i] = u(0, 0) * a0 + u(0, 1) * a1;
            state[i | bit] = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
    return Statevectord(std::move(state));
}

} // namespace qpmel
