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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qpmel/config.hpp"
#include "qpmel/verify.hpp"

namespace qpmel {

// Subcommand bodies of the `qpmel` tool. Each returns the process exit
// status and reports errors on `err` instead of throwing.

int cmd_train(const std::filesystem::path &config_path,
              const std::vector<ConfigOverride> &overrides, std::ostream &out, std::ostream &err);

/// `checkpoint` defaults to output.checkpoint from the config.
int cmd_eval(const std::filesystem::path &config_path,
             const std::optional<std::filesystem::path> &checkpoint,
             const std::vector<ConfigOverride> &overrides, std::ostream &out, std::ostream &err);

int cmd_verify(const VerifyOptions &options, std::ostream &out, std::ostream &err);

/// Input sample for export: explicit features, or a row of the config's
/// evaluation split.
struct SampleSpec {
    std::optional<std::vector<double>> features;
    std::optional<std::filesystem::path> config_path;
    std::vector<ConfigOverride> overrides;
    Eigen::Index index = 0;
};

/// An empty `output` falls back to output.qasm of the sample's config.
int cmd_export(const std::filesystem::path &checkpoint, const SampleSpec &sample,
               const std::filesystem::path &output, std::ostream &out, std::ostream &err);

} // namespace qpmel
