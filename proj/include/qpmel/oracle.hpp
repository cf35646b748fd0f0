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
 * Brute-force statevector reference for product-state encodings.
 *
 * Qubit q contributes the vector [cos(theta_q), e^{i gamma_q} sin(theta_q)].
 * The full state is their Kronecker product taken in ascending qubit order,
 * so qubit 0 owns the most significant bit of the amplitude index.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "qpmel/geometry.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

/// Largest register the oracle will materialise (2^20 amplitudes).
inline constexpr Eigen::Index kMaxOracleQubits = 20;

template <typename Scalar> class Statevector {
  public:
    using Complex = std::complex<Scalar>;
    using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    explicit Statevector(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {
        const Eigen::Index n = amplitudes_.size();
        detail::require<DimensionError>(n >= 2 && (n & (n - 1)) == 0,
                                        "statevector: length must be 2^Q, Q >= 1");
        qubits_ = 0;
        while ((Eigen::Index{1} << qubits_) < n) {
            ++qubits_;
        }
        detail::require<CapacityError>(qubits_ <= kMaxOracleQubits,
                                       "statevector: more than 20 qubits");
    }

    [[nodiscard]] Eigen::Index qubits() const { return qubits_; }
    [[nodiscard]] const Amplitudes &amplitudes() const { return amplitudes_; }
    [[nodiscard]] Scalar norm() const { return amplitudes_.norm(); }

    /// <this|other>
    [[nodiscard]] Complex inner(const Statevector &other) const {
        detail::require<DimensionError>(qubits_ == other.qubits_,
                                        "statevector: Q mismatch");
        return amplitudes_.dot(other.amplitudes_);
    }

  private:
    Amplitudes amplitudes_;
    Eigen::Index qubits_ = 0;
};

using Statevectord = Statevector<double>;

/// Fraction of all-zeros outcomes over `shots` simulated inversion tests.
struct ShotEstimate {
    double estimate = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::uint64_t successes = 0;
};

template <typename Scalar>
typename Statevector<Scalar>::Amplitudes qubit_amplitudes(Scalar theta, Scalar gamma) {
    using Complex = std::complex<Scalar>;
    typename Statevector<Scalar>::Amplitudes v(2);
    v[0] = Complex(std::cos(theta), Scalar(0));
    v[1] = std::polar(std::sin(theta), gamma);
    return v;
}

template <typename Scalar>
Statevector<Scalar> build_state(const AngularEncoding<Scalar> &a) {
    detail::require<CapacityError>(
        a.qubits() <= kMaxOracleQubits,
        "build_state: Q = " + std::to_string(a.qubits()) + " exceeds the 20-qubit cap");
    using Amplitudes = typename Statevector<Scalar>::Amplitudes;
    Amplitudes state = Amplitudes::Ones(1);
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        const Amplitudes v = qubit_amplitudes(a.theta(q), a.gamma(q));
        Amplitudes next(state.size() * 2);
        for (Eigen::Index i = 0; i < state.size(); ++i) {
            next[2 * i] = state[i] * v[0];
            next[2 * i + 1] = state[i] * v[1];
        }
        state = std::move(next);
    }
    return Statevector<Scalar>(std::move(state));
}

/// |<psi|phi>|^2 over the full 2^Q-amplitude states.
template <typename Scalar>
Scalar fidelity(const AngularEncoding<Scalar> &a, const AngularEncoding<Scalar> &b) {
    detail::require<DimensionError>(a.qubits() == b.qubits(), "fidelity: Q mismatch");
    return std::norm(build_state(a).inner(build_state(b)));
}

/// Simulated inversion test: prepare a, undo the preparation of b, measure.
/// For product states the all-zeros probability equals fidelity(a, b), so
/// each shot is one Bernoulli(fidelity) draw from Rng(seed): a shot succeeds
/// when the raw 64-bit output is below fidelity * 2^64.
template <typename Scalar>
ShotEstimate inversion_test(const AngularEncoding<Scalar> &a,
                            const AngularEncoding<Scalar> &b, std::uint64_t shots,
                            std::uint64_t seed) {
    detail::require<ArgumentError>(shots >= 1, "inversion_test: shots must be >= 1");
    const double p = static_cast<double>(fidelity(a, b));
    std::uint64_t successes = 0;
    if (p >= 1.0) {
        successes = shots;
    } else if (p > 0.0) {
        const auto threshold = static_cast<std::uint64_t>(std::ldexp(p, 64));
        Rng rng(seed);
        for (std::uint64_t s = 0; s < shots; ++s) {
            successes += rng() < threshold ? 1U : 0U;
        }
    }
    return {static_cast<double>(successes) / static_cast<double>(shots), shots, seed,
            successes};
}

} // namespace qpmel
