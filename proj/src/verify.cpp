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
#include "qpmel/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qpmel/kernel.hpp"
#include "qpmel/oracle.hpp"

namespace qpmel {

AngularEncodingd random_encoding(Rng &rng, Eigen::Index qubits, double margin) {
    constexpr double pi = std::numbers::pi;
    Eigen::VectorXd t(qubits), g(qubits);
    for (Eigen::Index q = 0; q < qubits; ++q) {
        t[q] = rng.uniform(margin, pi - margin);
        g[q] = rng.uniform(-pi + margin, pi - margin);
    }
    return {std::move(t), std::move(g)};
}

namespace {

using Similarity = std::function<double(const AngularEncodingd &, const AngularEncodingd &)>;

double product_kernel(const AngularEncodingd &a, const AngularEncodingd &b) { return pmef(a, b); }
double sum_kernel(const AngularEncodingd &a, const AngularEncodingd &b) { return pmef_train(a, b); }

double mutant_pmef(const AngularEncodingd &a, const AngularEncodingd &b) {
    const auto ca = to_cartesian(a);
    const auto cb = to_cartesian(b);
    double product = 1.0;
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        const Triple<double> p = ca.point(q), pp = cb.point(q);
        const double r = p.dot(pp);
        const double c = p.x() * pp.y() + p.y() * pp.x();
        product *= r * r + c * c;
    }
    return product;
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

SuiteResult kernel_vs_oracle(Rng &rng, const Similarity &kernel) {
    double worst = 0.0;
    for (Eigen::Index qubits : {1, 2, 4, 8, 12}) {
        for (int i = 0; i < 1000; ++i) {
            const auto a = random_encoding(rng, qubits);
            const auto b = random_encoding(rng, qubits);
            worst = std::max(worst, std::abs(kernel(a, b) - fidelity(a, b)));
        }
    }
    return {"kernel-vs-oracle", worst <= 1e-10,
            "max |pmef - fidelity| = " + sci(worst) + " over 5000 pairs, Q in {1,2,4,8,12}"};
}

SuiteResult factorization(Rng &rng) {
    double worst = 0.0;
    for (Eigen::Index qubits = 1; qubits <= 10; ++qubits) {
        for (int i = 0; i < 100; ++i) {
            const auto a = random_encoding(rng, qubits);
            const auto b = random_encoding(rng, qubits);
            double product = 1.0;
            for (Eigen::Index q = 0; q < qubits; ++q) {
                product *= fidelity(a.qubit(q), b.qubit(q));
            }
            worst = std::max(worst, std::abs(fidelity(a, b) - product));
        }
    }
    return {"factorized-fidelity", worst <= 1e-10,
            "max |full - per-qubit product| = " + sci(worst) + " over 1000 pairs, Q <= 10"};
}

/// Worst violation ratio |analytic - fd| / max(1e-5 |fd|, 1e-8); <= 1 passes.
double gradient_violation(const AngularEncodingd &a, const AngularEncodingd &b,
                          const Similarity &f,
                          const std::function<SimilarityGradientd(const AngularEncodingd &,
                                                                  const AngularEncodingd &)> &grad) {
    constexpr double h = 1e-6;
    const SimilarityGradientd g = grad(a, b);
    double worst = 0.0;
    auto check = [&](double analytic, double fd) {
        worst = std::max(worst, std::abs(analytic - fd) / std::max(1e-5 * std::abs(fd), 1e-8));
    };
    for (Eigen::Index q = 0; q < a.qubits(); ++q) {
        for (int which = 0; which < 4; ++which) {
            Eigen::VectorXd ta = a.thetas(), ga = a.gammas(), tb = b.thetas(), gb = b.gammas();
            Eigen::VectorXd &v = which == 0 ? ta : which == 1 ? ga : which == 2 ? tb : gb;
            const double x0 = v[q];
            v[q] = x0 + h;
            const double up = f({ta, ga}, {tb, gb});
            v[q] = x0 - h;
            const double down = f({ta, ga}, {tb, gb});
            const double fd = (up - down) / (2 * h);
            const Eigen::VectorXd &an = which == 0   ? g.d_theta_a
                                        : which == 1 ? g.d_gamma_a
                                        : which == 2 ? g.d_theta_b
                                                     : g.d_gamma_b;
            check(an[q], fd);
        }
    }
    return worst;
}

SuiteResult gradients(Rng &rng) {
    double worst = 0.0;
    for (Eigen::Index qubits : {1, 3, 8}) {
        for (int i = 0; i < 100; ++i) {
            const auto a = random_encoding(rng, qubits, 1e-3);
            const auto b = random_encoding(rng, qubits, 1e-3);
            worst = std::max(worst, gradient_violation(a, b, product_kernel, pmef_gradient<double>));
            worst = std::max(worst, gradient_violation(a, b, sum_kernel, pmef_train_gradient<double>));
        }
    }
    return {"gradient-check", worst <= 1.0,
            "worst |analytic - fd| / max(1e-5 |fd|, 1e-8) = " + sci(worst) +
                " over 600 instances"};
}

SuiteResult periodicity(Rng &rng, const Similarity &kernel) {
    constexpr double pi = std::numbers::pi;
    const AngularEncodingd a(pi / 2, pi);
    const AngularEncodingd b(pi / 2, -pi);
    const double cosine = classical_cosine_similarity(a, b);
    const double fid = kernel(a, b);
    bool ok = std::abs(cosine + 0.6) <= 1e-12 && std::abs(fid - 1.0) <= 1e-12;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_encoding(rng, 4);
        const auto y = random_encoding(rng, 4);
        Eigen::VectorXd shifted = y.gammas();
        const Eigen::Index q = static_cast<Eigen::Index>(rng.below(4));
        shifted[q] += (rng.below(2) == 0 ? 2.0 : -2.0) * pi;
        const auto y2 = clamp_to_ranges<double>(y.thetas(), shifted);
        worst = std::max(worst, std::abs(kernel(x, y) - kernel(x, y2)));
    }
    ok = ok && worst <= 1e-10;
    return {"periodicity", ok,
            "cosine = " + std::to_string(cosine) + ", pmef = " + std::to_string(fid) +
                ", max shift change = " + sci(worst)};
}

} // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions &options) {
    const Similarity kernel = options.fault == InjectedFault::LambdaCSign
                                  ? Similarity(mutant_pmef)
                                  : Similarity(product_kernel);
    std::vector<SuiteResult> out;
    auto timed = [&](auto &&suite) {
        const auto start = std::chrono::steady_clock::now();
        SuiteResult r = suite();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(r));
    };
    Rng rng(derive_seed(options.seed, "verify"));
    timed([&] { return kernel_vs_oracle(rng, kernel); });
    timed([&] { return factorization(rng); });
    timed([&] { return gradients(rng); });
    timed([&] { return periodicity(rng, kernel); });
    return out;
}

} // namespace qpmel
