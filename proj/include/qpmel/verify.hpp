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
 * Self-checks run by `qpmel verify`: kernel against the statevector oracle,
 * fidelity factorisation, analytic gradients against finite differences,
 * and periodicity handling.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpmel/geometry.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

/// Deliberate kernel faults used to show the suites can fail.
enum class InjectedFault {
    None,
    /// Computes the imaginary overlap term as x y' + y x'.
    LambdaCSign,
};

struct VerifyOptions {
    std::uint64_t seed = 20240917;
    InjectedFault fault = InjectedFault::None;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<SuiteResult> run_verification(const VerifyOptions &options = {});

/// Uniform angles with theta in [margin, pi - margin] and gamma in
/// [-pi + margin, pi - margin].
AngularEncodingd random_encoding(Rng &rng, Eigen::Index qubits, double margin = 0.0);

} // namespace qpmel
