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

#include "qpmel/circuit_export.hpp"
#include "qpmel/oracle.hpp"
#include "test_support.hpp"

using namespace qpmel;
using qpmel::testing::kPi;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("to_circuit doubles theta and copies gamma", "[circuit]") {
    const EncodingCircuit c = to_circuit(AngularEncodingd(kPi / 4, kPi / 2));
    REQUIRE(c.qubits() == 1);
    REQUIRE(c.gates().size() == 2);
    CHECK(c.gates()[0] == Gate{GateKind::RY, 0, kPi / 2});
    CHECK(c.gates()[1] == Gate{GateKind::RZ, 0, kPi / 2});
}

TEST_CASE("to_circuit keeps zero-angle gates", "[circuit]") {
    const EncodingCircuit c = to_circuit(AngularEncodingd(0.0, 0.0));
    REQUIRE(c.gates().size() == 2);
    CHECK(c.gates()[0] == Gate{GateKind::RY, 0, 0.0});
    CHECK(c.gates()[1] == Gate{GateKind::RZ, 0, 0.0});
}

TEST_CASE("to_circuit emits two gates per qubit in order", "[circuit]") {
    Rng rng(51);
    const EncodingCircuit c = to_circuit(testing::random_angles(rng, 3));
    REQUIRE(c.gates().size() == 6);
    for (int q = 0; q < 3; ++q) {
        CHECK(c.gates()[2 * q].kind == GateKind::RY);
        CHECK(c.gates()[2 * q + 1].kind == GateKind::RZ);
        CHECK(c.gates()[2 * q].qubit == q);
        CHECK(c.gates()[2 * q + 1].qubit == q);
    }
}

TEST_CASE("circuit constructor enforces the gate layout", "[circuit]") {
    CHECK_THROWS_AS(EncodingCircuit(1, {{GateKind::RY, 0, 0.1}}), DimensionError);
    CHECK_THROWS_AS(EncodingCircuit(1, {{GateKind::RZ, 0, 0.1}, {GateKind::RY, 0, 0.1}}),
                    FormatError);
    CHECK_THROWS_AS(EncodingCircuit(1, {{GateKind::RY, 0, 7.0}, {GateKind::RZ, 0, 0.1}}),
                    InvalidEncodingError);
    CHECK_THROWS_AS(EncodingCircuit(1, {{GateKind::RY, 0, 1.0}, {GateKind::RZ, 0, 3.5}}),
                    InvalidEncodingError);
}

TEST_CASE("emit_qasm text layout", "[circuit]") {
    const std::string text = emit_qasm(to_circuit(AngularEncodingd(kPi / 4, 0.0)));
    CHECK(text ==
          "OPENQASM 2.0;\n"
          "include \"qelib1.inc\";\n"
          "qreg q[1];\n"
          "ry(1.5707963267948966) q[0];\n"
          "rz(0) q[0];\n");
    CHECK(parse_qasm(text).gates()[0].angle == kPi / 2);
}

TEST_CASE("emit and parse round-trip exactly", "[circuit][property]") {
    Rng rng(52);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Index qubits = 1 + static_cast<Eigen::Index>(rng.below(8));
        const EncodingCircuit c = to_circuit(testing::random_angles(rng, qubits));
        CHECK(parse_qasm(emit_qasm(c)) == c);
    }
    const EncodingCircuit edge = to_circuit(AngularEncodingd(kPi, -kPi));
    CHECK(parse_qasm(emit_qasm(edge)) == edge);
}

TEST_CASE("parse_qasm rejects foreign input", "[circuit]") {
    CHECK_THROWS_AS(parse_qasm("OPENQASM 3.0;\n"), FormatError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n"
                               "cx q[0],q[1];\n"),
                    FormatError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n"
                               "ry(abc) q[0];\nrz(0) q[0];\n"),
                    FormatError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n"
                               "ry(0.5) q[3];\nrz(0) q[0];\n"),
                    FormatError);
    CHECK_THROWS_WITH(parse_qasm("OPENQASM 2.0;\nqreg q[1];\n"), ContainsSubstring("include"));
}

TEST_CASE("simulated circuit equals the oracle state up to global phase", "[circuit][property]") {
    Rng rng(53);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index qubits = 1 + static_cast<Eigen::Index>(rng.below(8));
        const auto a = testing::random_angles(rng, qubits);
        const Statevectord circuit_state = simulate(parse_qasm(emit_qasm(to_circuit(a))));
        const Statevectord oracle_state = build_state(a);
        CHECK_THAT(std::norm(circuit_state.inner(oracle_state)), WithinAbs(1.0, 1e-10));

        // The phase is exp(-i sum(gamma)/2), the RZ normalisation.
        const std::complex<double> phase = std::polar(1.0, -a.gammas().sum() / 2);
        CHECK((circuit_state.amplitudes() - phase * oracle_state.amplitudes()).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}
