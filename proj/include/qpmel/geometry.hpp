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
 * Angular and Cartesian coordinates of product-state encodings.
 *
 * Qubit q is described by a polar angle theta in [0, pi] and an azimuth
 * gamma in [-pi, pi]. Its Cartesian point on the unit sphere is
 * (sin(theta) cos(gamma), sin(theta) sin(gamma), cos(theta)).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "qpmel/errors.hpp"

namespace qpmel {

template <typename Scalar> using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using Triple = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Points = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

template <typename Scalar> constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

/// Absolute tolerance on |p| == 1 for points held by CartesianEncoding.
template <typename Scalar> constexpr Scalar unit_tolerance() {
    if constexpr (sizeof(Scalar) >= sizeof(double)) {
        return Scalar(1e-12);
    } else {
        return Scalar(1e-5);
    }
}

/// Per-qubit (theta, gamma) pairs. Construction enforces Q >= 1, finite
/// values, theta in [0, pi] and gamma in [-pi, pi].
template <typename Scalar> class AngularEncoding {
  public:
    using VectorType = Vector<Scalar>;

    AngularEncoding(VectorType thetas, VectorType gammas)
        : thetas_(std::move(thetas)), gammas_(std::move(gammas)) {
        detail::require<DimensionError>(
            thetas_.size() == gammas_.size(),
            "angular encoding: " + std::to_string(thetas_.size()) +
                " thetas vs " + std::to_string(gammas_.size()) + " gammas");
        detail::require<DimensionError>(thetas_.size() >= 1,
                                        "angular encoding: Q must be >= 1");
        detail::require<InvalidEncodingError>(
            thetas_.allFinite() && gammas_.allFinite(),
            "angular encoding: non-finite angle");
        const Scalar pi = pi_v<Scalar>;
        detail::require<InvalidEncodingError>(
            (thetas_.array() >= Scalar(0)).all() && (thetas_.array() <= pi).all(),
            "angular encoding: theta outside [0, pi]");
        detail::require<InvalidEncodingError>(
            (gammas_.array() >= -pi).all() && (gammas_.array() <= pi).all(),
            "angular encoding: gamma outside [-pi, pi]");
    }

    /// Single-qubit convenience constructor.
    AngularEncoding(Scalar theta, Scalar gamma)
        : AngularEncoding(VectorType::Constant(1, theta),
                          VectorType::Constant(1, gamma)) {}

    [[nodiscard]] Eigen::Index qubits() const { return thetas_.size(); }
    [[nodiscard]] const VectorType &thetas() const { return thetas_; }
    [[nodiscard]] const VectorType &gammas() const { return gammas_; }
    [[nodiscard]] Scalar theta(Eigen::Index q) const { return thetas_[q]; }
    [[nodiscard]] Scalar gamma(Eigen::Index q) const { return gammas_[q]; }

    /// Encoding of qubit q alone.
    [[nodiscard]] AngularEncoding qubit(Eigen::Index q) const {
        return AngularEncoding(thetas_[q], gammas_[q]);
    }

    bool operator==(const AngularEncoding &other) const {
        return thetas_ == other.thetas_ && gammas_ == other.gammas_;
    }

  private:
    VectorType thetas_;
    VectorType gammas_;
};

/// Per-qubit unit-sphere points stored as the columns of a 3 x Q matrix.
template <typename Scalar> class CartesianEncoding {
  public:
    using PointsType = Points<Scalar>;

    explicit CartesianEncoding(PointsType points) : points_(std::move(points)) {
        detail::require<DimensionError>(points_.cols() >= 1,
                                        "cartesian encoding: Q must be >= 1");
        detail::require<InvalidEncodingError>(points_.allFinite(),
                                              "cartesian encoding: non-finite");
        const Scalar worst =
            (points_.colwise().squaredNorm().array() - Scalar(1)).abs().maxCoeff();
        detail::require<InvalidEncodingError>(
            worst <= unit_tolerance<Scalar>(),
            "cartesian encoding: point off the unit sphere");
    }

    [[nodiscard]] Eigen::Index qubits() const { return points_.cols(); }
    [[nodiscard]] const PointsType &points() const { return points_; }
    [[nodiscard]] Triple<Scalar> point(Eigen::Index q) const { return points_.col(q); }

    bool operator==(const CartesianEncoding &other) const {
        return points_ == other.points_;
    }

  private:
    PointsType points_;
};

using AngularEncodingd = AngularEncoding<double>;
using CartesianEncodingd = CartesianEncoding<double>;

template <typename Scalar>
Triple<Scalar> to_cartesian(Scalar theta, Scalar gamma) {
    using std::cos;
    using std::sin;
    const Scalar s = sin(theta);
    return Triple<Scalar>(s * cos(gamma), s * sin(gamma), cos(theta));
}

template <typename Scalar>
CartesianEncoding<Scalar> to_cartesian(const AngularEncoding<Scalar> &a) {
    Points<Scalar> points(3, a.qubits());
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        points.col(q) = to_cartesian(a.theta(q), a.gamma(q));
    }
    return CartesianEncoding<Scalar>(std::move(points));
}

/// Inverse of to_cartesian: theta = acos(z), gamma = atan2(y, x).
/// The poles map to gamma = 0.
template <typename Scalar>
AngularEncoding<Scalar> to_angular(const CartesianEncoding<Scalar> &c) {
    using std::acos;
    using std::atan2;
    Vector<Scalar> thetas(c.qubits());
    Vector<Scalar> gammas(c.qubits());
    for (Eigen::Index q = 0; q < c.qubits(); ++q) {
        const Triple<Scalar> p = c.point(q);
        thetas[q] = acos(std::clamp(p.z(), Scalar(-1), Scalar(1)));
        gammas[q] = atan2(p.y(), p.x());
    }
    return AngularEncoding<Scalar>(std::move(thetas), std::move(gammas));
}

/// Wraps gamma into [-pi, pi]. Values already inside the closed interval,
/// including both endpoints, are returned unchanged.
template <typename Scalar> Scalar wrap_azimuth(Scalar gamma) {
    const Scalar pi = pi_v<Scalar>;
    if (gamma >= -pi && gamma <= pi) {
        return gamma;
    }
    using std::fmod;
    Scalar r = fmod(gamma + pi, Scalar(2) * pi);
    if (r < Scalar(0)) {
        r += Scalar(2) * pi;
    }
    return std::clamp(r - pi, -pi, pi);
}

/// Clamps raw thetas into [0, pi] and wraps raw gammas into [-pi, pi].
template <typename Scalar>
AngularEncoding<Scalar> clamp_to_ranges(const Vector<Scalar> &thetas_raw,
                                        const Vector<Scalar> &gammas_raw) {
    detail::require<DimensionError>(
        thetas_raw.size() == gammas_raw.size(),
        "clamp_to_ranges: length mismatch (" + std::to_string(thetas_raw.size()) +
            " vs " + std::to_string(gammas_raw.size()) + ")");
    detail::require<InvalidEncodingError>(
        thetas_raw.allFinite() && gammas_raw.allFinite(),
        "clamp_to_ranges: non-finite angle");
    const Scalar pi = pi_v<Scalar>;
    Vector<Scalar> thetas = thetas_raw.cwiseMax(Scalar(0)).cwiseMin(pi);
    Vector<Scalar> gammas = gammas_raw.unaryExpr([](Scalar g) { return wrap_azimuth(g); });
    return AngularEncoding<Scalar>(std::move(thetas), std::move(gammas));
}

/// Cosine similarity of the flattened (theta_1..theta_Q, gamma_1..gamma_Q)
/// vectors. Only meaningful as a baseline: it ignores periodicity.
template <typename Scalar>
Scalar classical_cosine_similarity(const AngularEncoding<Scalar> &a,
                                   const AngularEncoding<Scalar> &b) {
    detail::require<DimensionError>(a.qubits() == b.qubits(),
                                    "classical_cosine_similarity: Q mismatch");
    const Scalar dot = a.thetas().dot(b.thetas()) + a.gammas().dot(b.gammas());
    const Scalar na = a.thetas().squaredNorm() + a.gammas().squaredNorm();
    const Scalar nb = b.thetas().squaredNorm() + b.gammas().squaredNorm();
    detail::require<UndefinedSimilarityError>(
        na > Scalar(0) && nb > Scalar(0),
        "classical_cosine_similarity: zero-norm encoding");
    using std::sqrt;
    return std::clamp(dot / (sqrt(na) * sqrt(nb)), Scalar(-1), Scalar(1));
}

} // namespace qpmel
