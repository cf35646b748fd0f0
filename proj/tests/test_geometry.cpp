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

#include <limits>

#include "qpmel/geometry.hpp"
#include "test_support.hpp"

using namespace qpmel;
using qpmel::testing::kPi;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

void check_point(const Triple<double> &p, double x, double y, double z, double tol = 1e-12) {
    CHECK_THAT(p.x(), WithinAbs(x, tol));
    CHECK_THAT(p.y(), WithinAbs(y, tol));
    CHECK_THAT(p.z(), WithinAbs(z, tol));
}

} // namespace

TEST_CASE("angular encoding validates shape and ranges", "[geometry]") {
    CHECK_NOTHROW(AngularEncodingd(vec({0.0, kPi}), vec({-kPi, kPi})));
    CHECK_THROWS_AS(AngularEncodingd(vec({0.1, 0.2}), vec({0.0})), DimensionError);
    CHECK_THROWS_AS(AngularEncodingd(Eigen::VectorXd(0), Eigen::VectorXd(0)), DimensionError);
    CHECK_THROWS_AS(AngularEncodingd(vec({-1e-3}), vec({0.0})), InvalidEncodingError);
    CHECK_THROWS_AS(AngularEncodingd(vec({0.5}), vec({3.2})), InvalidEncodingError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(AngularEncodingd(vec({nan}), vec({0.0})), InvalidEncodingError);
    CHECK_THROWS_AS(AngularEncodingd(vec({0.2}), vec({std::numeric_limits<double>::infinity()})),
                    InvalidEncodingError);
}

TEST_CASE("cartesian encoding rejects points off the sphere", "[geometry]") {
    Points<double> p(3, 1);
    p << 1.0, 0.0, 0.0;
    CHECK_NOTHROW(CartesianEncodingd(p));
    p << 1.0, 1e-5, 0.0;
    CHECK_THROWS_AS(CartesianEncodingd(p), InvalidEncodingError);
}

TEST_CASE("to_cartesian examples", "[geometry]") {
    check_point(to_cartesian(0.0, 0.7), 0, 0, 1);
    check_point(to_cartesian(kPi / 2, 0.0), 1, 0, 0);
    check_point(to_cartesian(kPi / 2, kPi), -1, 0, 0);
    check_point(to_cartesian(kPi / 2, -kPi), -1, 0, 0);

    const CartesianEncodingd c = to_cartesian(AngularEncodingd(vec({0.0, kPi / 2}), vec({0.7, 0.0})));
    REQUIRE(c.qubits() == 2);
    check_point(c.point(0), 0, 0, 1);
    check_point(c.point(1), 1, 0, 0);
}

TEST_CASE("periodic azimuths collapse to one point", "[geometry]") {
    for (int i = 0; i <= 100; ++i) {
        const double theta = kPi * i / 100.0;
        const Triple<double> a = to_cartesian(theta, kPi);
        const Triple<double> b = to_cartesian(theta, -kPi);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("to_cartesian outputs unit vectors", "[geometry][property]") {
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto a = testing::random_angles(rng, 3);
        const CartesianEncodingd c = to_cartesian(a);
        for (Eigen::Index q = 0; q < 3; ++q) {
            worst = std::max(worst, std::abs(c.point(q).norm() - 1.0));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("to_angular inverts to_cartesian away from the poles", "[geometry]") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const auto a = testing::random_angles(rng, 2, 1e-3);
        const auto back = to_angular(to_cartesian(a));
        CHECK((back.thetas() - a.thetas()).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((back.gammas() - a.gammas()).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("clamp_to_ranges examples", "[geometry]") {
    const auto a = clamp_to_ranges<double>(vec({kPi + 1e-15}), vec({0.0}));
    CHECK(a.theta(0) == kPi);
    CHECK(a.gamma(0) == 0.0);

    const auto b = clamp_to_ranges<double>(vec({kPi / 2}), vec({3 * kPi / 2}));
    CHECK_THAT(b.gamma(0), WithinAbs(-kPi / 2, 1e-12));

    const auto c = clamp_to_ranges<double>(vec({0.3}), vec({-kPi}));
    CHECK(c.theta(0) == 0.3);
    CHECK(c.gamma(0) == -kPi);

    const auto d = clamp_to_ranges<double>(vec({-0.2}), vec({kPi}));
    CHECK(d.theta(0) == 0.0);
    CHECK(d.gamma(0) == kPi);

    CHECK_THROWS_AS(clamp_to_ranges<double>(vec({0.1, 0.2}), vec({0.0})), DimensionError);
}

TEST_CASE("clamp_to_ranges is idempotent", "[geometry][property]") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        Eigen::VectorXd t(4), g(4);
        for (Eigen::Index q = 0; q < 4; ++q) {
            t[q] = rng.uniform(-1.0, kPi + 1.0);
            g[q] = rng.uniform(-20.0, 20.0);
        }
        const auto once = clamp_to_ranges<double>(t, g);
        const auto twice = clamp_to_ranges<double>(once.thetas(), once.gammas());
        CHECK(once == twice);
    }
}

TEST_CASE("wrapping preserves the point on the sphere", "[geometry][property]") {
    Rng rng(14);
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform(0.0, kPi);
        const double gamma = rng.uniform(-30.0, 30.0);
        const Triple<double> raw(std::sin(theta) * std::cos(gamma),
                                 std::sin(theta) * std::sin(gamma), std::cos(theta));
        const double wrapped = wrap_azimuth(gamma);
        CHECK(wrapped >= -kPi);
        CHECK(wrapped <= kPi);
        CHECK((to_cartesian(theta, wrapped) - raw).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("classical cosine similarity examples", "[geometry]") {
    const AngularEncodingd a(kPi / 2, kPi);
    const AngularEncodingd b(kPi / 2, -kPi);
    CHECK_THAT(classical_cosine_similarity(a, b), WithinAbs(-0.6, 1e-12));
    CHECK_THAT(classical_cosine_similarity(a, a), WithinAbs(1.0, 1e-12));
    CHECK_THAT(classical_cosine_similarity(AngularEncodingd(kPi / 2, 0.0), AngularEncodingd(0.0, kPi / 2)),
               WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(classical_cosine_similarity(AngularEncodingd(0.0, 0.0), a),
                    UndefinedSimilarityError);
    CHECK_THROWS_AS(classical_cosine_similarity(a, AngularEncodingd(vec({0.1, 0.2}), vec({0.0, 0.0}))),
                    DimensionError);
}

TEST_CASE("classical cosine similarity stays in [-1, 1]", "[geometry][property]") {
    Rng rng(15);
    for (int i = 0; i < 5000; ++i) {
        const auto a = testing::random_angles(rng, 3, 1e-6);
        const auto b = testing::random_angles(rng, 3, 1e-6);
        const double s = classical_cosine_similarity(a, b);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
    }
}
