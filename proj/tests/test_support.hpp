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
#pragma once

#include <complex>
#include <numbers>

#include "qpmel/geometry.hpp"
#include "qpmel/random.hpp"

namespace qpmel::testing {

inline constexpr double kPi = std::numbers::pi;

inline AngularEncodingd random_angles(Rng &rng, Eigen::Index qubits, double margin = 0.0) {
    Eigen::VectorXd t(qubits), g(qubits);
    for (Eigen::Index q = 0; q < qubits; ++q) {
        t[q] = rng.uniform(margin, kPi - margin);
        g[q] = rng.uniform(-kPi + margin, kPi - margin);
    }
    return {t, g};
}

/// Single-qubit overlap <a|b> written out from the amplitudes
/// cos(t)|0> + e^{ig} sin(t)|1>, independent of the library's kernel code.
inline std::complex<double> qubit_overlap(double ta, double ga, double tb, double gb) {
    const std::complex<double> a0(std::cos(ta)), a1 = std::polar(std::sin(ta), ga);
    const std::complex<double> b0(std::cos(tb)), b1 = std::polar(std::sin(tb), gb);
    return std::conj(a0) * b0 + std::conj(a1) * b1;
}

/// Product of per-qubit fidelities from qubit_overlap.
inline double reference_fidelity(const AngularEncodingd &a, const AngularEncodingd &b) {
    double f = 1.0;
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        f *= std::norm(qubit_overlap(a.theta(q), a.gamma(q), b.theta(q), b.gamma(q)));
    }
    return f;
}

/// Central difference of a scalar function of one coordinate.
template <class Fn> double central_difference(Fn &&f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

/// |analytic - fd| <= rel * |fd| or <= floor.
inline bool gradient_close(double analytic, double fd, double rel, double floor) {
    return std::abs(analytic - fd) <= std::max(rel * std::abs(fd), floor);
}

} // namespace qpmel::testing
