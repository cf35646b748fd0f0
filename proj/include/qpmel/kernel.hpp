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
 * Fidelity kernels over real Cartesian coordinates.
 *
 * A qubit with point (x, y, z) is the state z|0> + (x + iy)|1>, so the
 * overlap of two such states is
 *
 *     <psi|phi> = (x x' + y y' + z z') + i (x y' - y x') = lambda_r + i lambda_c
 *
 * and the single-qubit fidelity (complex kernel function, CKF) is
 * lambda_r^2 + lambda_c^2. The multi-qubit fidelity of product states is the
 * product of CKF values over qubits (pmef); training uses their sum
 * (pmef_train), whose gradient does not shrink geometrically with Q.
 *
 * All reductions run over ascending qubit index so results are bitwise
 * reproducible and symmetric in their arguments.
 */
#pragma once

#include <utility>

#include "qpmel/geometry.hpp"

namespace qpmel {

template <typename Scalar> struct LambdaPair {
    Scalar lambda_r;
    Scalar lambda_c;
};

/// Partial derivatives of a similarity w.r.t. every angle of both inputs.
template <typename Scalar> struct SimilarityGradient {
    Vector<Scalar> d_theta_a;
    Vector<Scalar> d_gamma_a;
    Vector<Scalar> d_theta_b;
    Vector<Scalar> d_gamma_b;

    explicit SimilarityGradient(Eigen::Index q = 0)
        : d_theta_a(Vector<Scalar>::Zero(q)), d_gamma_a(Vector<Scalar>::Zero(q)),
          d_theta_b(Vector<Scalar>::Zero(q)), d_gamma_b(Vector<Scalar>::Zero(q)) {}
};

using SimilarityGradientd = SimilarityGradient<double>;

template <typename Scalar>
LambdaPair<Scalar> lambdas(const Triple<Scalar> &p, const Triple<Scalar> &pp) {
    return {p.x() * pp.x() + p.y() * pp.y() + p.z() * pp.z(),
            p.x() * pp.y() - p.y() * pp.x()};
}

/// Single-qubit fidelity from two unit triples.
template <typename Scalar>
Scalar ckf(const Triple<Scalar> &p, const Triple<Scalar> &pp) {
    const auto l = lambdas(p, pp);
    return l.lambda_r * l.lambda_r + l.lambda_c * l.lambda_c;
}

/// Gradient of ckf(p, pp) w.r.t. p (first) and pp (second), treating the
/// triples as unconstrained vectors.
template <typename Scalar>
std::pair<Triple<Scalar>, Triple<Scalar>> ckf_point_gradient(const Triple<Scalar> &p,
                                                             const Triple<Scalar> &pp) {
    const auto l = lambdas(p, pp);
    const Scalar r2 = Scalar(2) * l.lambda_r;
    const Scalar c2 = Scalar(2) * l.lambda_c;
    Triple<Scalar> dp = r2 * pp + c2 * Triple<Scalar>(pp.y(), -pp.x(), Scalar(0));
    Triple<Scalar> dpp = r2 * p + c2 * Triple<Scalar>(-p.y(), p.x(), Scalar(0));
    return {std::move(dp), std::move(dpp)};
}

/// d(point)/d(theta) of the polar-to-Cartesian map.
template <typename Scalar> Triple<Scalar> d_point_d_theta(Scalar theta, Scalar gamma) {
    using std::cos;
    using std::sin;
    const Scalar c = cos(theta);
    return Triple<Scalar>(c * cos(gamma), c * sin(gamma), -sin(theta));
}

/// d(point)/d(gamma) of the polar-to-Cartesian map.
template <typename Scalar> Triple<Scalar> d_point_d_gamma(Scalar theta, Scalar gamma) {
    using std::cos;
    using std::sin;
    const Scalar s = sin(theta);
    return Triple<Scalar>(-s * sin(gamma), s * cos(gamma), Scalar(0));
}

namespace detail {

template <typename Scalar>
void require_same_qubits(Eigen::Index qa, Eigen::Index qb, const char *what) {
    require<DimensionError>(qa == qb, std::string(what) + ": Q mismatch (" +
                                          std::to_string(qa) + " vs " +
                                          std::to_string(qb) + ")");
}

template <typename Scalar>
Vector<Scalar> per_qubit_ckf(const CartesianEncoding<Scalar> &a,
                             const CartesianEncoding<Scalar> &b) {
    Vector<Scalar> f(a.qubits());
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        f[q] = ckf<Scalar>(a.points().col(q), b.points().col(q));
    }
    return f;
}

} // namespace detail

/// Per-qubit fidelities, one CKF value per qubit.
template <typename Scalar>
Vector<Scalar> qubit_fidelities(const CartesianEncoding<Scalar> &a,
                                const CartesianEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "qubit_fidelities");
    return detail::per_qubit_ckf(a, b);
}

template <typename Scalar>
Scalar pmef(const CartesianEncoding<Scalar> &a, const CartesianEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef");
    Scalar product(1);
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        product *= ckf<Scalar>(a.points().col(q), b.points().col(q));
    }
    return product;
}

template <typename Scalar>
Scalar pmef_train(const CartesianEncoding<Scalar> &a, const CartesianEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef_train");
    Scalar sum(0);
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        sum += ckf<Scalar>(a.points().col(q), b.points().col(q));
    }
    return sum;
}

/// Multi-qubit fidelity of the product states encoded by a and b.
template <typename Scalar>
Scalar pmef(const AngularEncoding<Scalar> &a, const AngularEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef");
    return pmef(to_cartesian(a), to_cartesian(b));
}

/// Sum of single-qubit fidelities; the training surrogate of pmef.
template <typename Scalar>
Scalar pmef_train(const AngularEncoding<Scalar> &a, const AngularEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef_train");
    return pmef_train(to_cartesian(a), to_cartesian(b));
}

namespace detail {

/// Chains per-qubit weights w_q * d(ckf_q) through the angle parameterisation.
template <typename Scalar>
SimilarityGradient<Scalar> weighted_ckf_gradient(const AngularEncoding<Scalar> &a,
                                                 const AngularEncoding<Scalar> &b,
                                                 const Vector<Scalar> &weights) {
    const Eigen::Index n = a.qubits();
    SimilarityGradient<Scalar> g(n);
    for (Eigen::Index q = 0; q < n; ++q) {
        const Scalar ta = a.theta(q), ga = a.gamma(q);
        const Scalar tb = b.theta(q), gb = b.gamma(q);
        const auto [dpa, dpb] = ckf_point_gradient<Scalar>(to_cartesian(ta, ga),
                                                           to_cartesian(tb, gb));
        g.d_theta_a[q] = weights[q] * d_point_d_theta(ta, ga).dot(dpa);
        g.d_gamma_a[q] = weights[q] * d_point_d_gamma(ta, ga).dot(dpa);
        g.d_theta_b[q] = weights[q] * d_point_d_theta(tb, gb).dot(dpb);
        g.d_gamma_b[q] = weights[q] * d_point_d_gamma(tb, gb).dot(dpb);
    }
    return g;
}

} // namespace detail

/// Exact gradient of pmef_train w.r.t. all angles of both encodings.
template <typename Scalar>
SimilarityGradient<Scalar> pmef_train_gradient(const AngularEncoding<Scalar> &a,
                                               const AngularEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef_train_gradient");
    return detail::weighted_ckf_gradient(a, b, Vector<Scalar>(Vector<Scalar>::Ones(a.qubits())));
}

/// Exact gradient of the multiplicative pmef. Each qubit's term is scaled by
/// the product of the other qubits' fidelities (prefix/suffix products, no
/// division), which is what makes it vanish as Q grows.
template <typename Scalar>
SimilarityGradient<Scalar> pmef_gradient(const AngularEncoding<Scalar> &a,
                                         const AngularEncoding<Scalar> &b) {
    detail::require_same_qubits<Scalar>(a.qubits(), b.qubits(), "pmef_gradient");
    const Eigen::Index n = a.qubits();
    const Vector<Scalar> f = detail::per_qubit_ckf(to_cartesian(a), to_cartesian(b));
    Vector<Scalar> others(n);
    Scalar prefix(1);
    for (Eigen::Index q = 0; q < n; ++q) {
        others[q] = prefix;
        prefix *= f[q];
    }
    Scalar suffix(1);
    for (Eigen::Index q = n - 1; q >= 0; --q) {
        others[q] *= suffix;
        suffix *= f[q];
    }
    return detail::weighted_ckf_gradient(a, b, others);
}

} // namespace qpmel
