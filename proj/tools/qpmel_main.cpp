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
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "qpmel/commands.hpp"
#include "qpmel/errors.hpp"

int main(int argc, char **argv) {
    CLI::App app{"qpmel: quantum projective metric learning"};
    app.require_subcommand(1);

    std::vector<std::string> set_args;
    auto overrides = [&]() {
        std::vector<qpmel::ConfigOverride> out;
        for (const auto &s : set_args) {
            out.push_back(qpmel::parse_override(s));
        }
        return out;
    };

    std::string config;
    auto *train = app.add_subcommand("train", "train an encoder from a config file");
    train->add_option("config", config, "run config (JSON)")->required();
    train->add_option("--set", set_args, "override a config key, e.g. train.episodes=100");

    std::string checkpoint;
    auto *eval = app.add_subcommand("eval", "few-shot evaluation of a checkpoint");
    eval->add_option("config", config, "run config (JSON)")->required();
    eval->add_option("--checkpoint", checkpoint, "checkpoint (default: output.checkpoint)");
    eval->add_option("--set", set_args, "override a config key");

    std::uint64_t verify_seed = qpmel::VerifyOptions{}.seed;
    std::string fault = "none";
    auto *verify = app.add_subcommand("verify", "run the oracle and gradient self-checks");
    verify->add_option("--seed", verify_seed, "seed for the random instances");
    verify->add_option("--inject-fault", fault, "test hook: none | lambda-c-sign")
        ->check(CLI::IsMember({"none", "lambda-c-sign"}));

    std::string output;
    std::string features;
    std::string sample_config;
    long sample_index = 0;
    auto *exp = app.add_subcommand("export", "write the OpenQASM encoding circuit of one sample");
    exp->add_option("checkpoint", checkpoint, "encoder checkpoint")->required();
    exp->add_option("-o,--output", output, "output .qasm path (default: output.qasm of --config)");
    auto *feat_opt = exp->add_option("--features", features, "comma-separated input features");
    auto *cfg_opt = exp->add_option("--config", sample_config, "config whose eval split holds the sample");
    exp->add_option("--sample", sample_index, "row of the eval split (with --config)");
    exp->add_option("--set", set_args, "override a config key (with --config)");
    feat_opt->excludes(cfg_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            return qpmel::cmd_train(config, overrides(), std::cout, std::cerr);
        }
        if (eval->parsed()) {
            std::optional<std::filesystem::path> ckpt;
            if (!checkpoint.empty()) {
                ckpt = checkpoint;
            }
            return qpmel::cmd_eval(config, ckpt, overrides(), std::cout, std::cerr);
        }
        if (verify->parsed()) {
            qpmel::VerifyOptions opts;
            opts.seed = verify_seed;
            opts.fault = fault == "lambda-c-sign" ? qpmel::InjectedFault::LambdaCSign
                                                  : qpmel::InjectedFault::None;
            return qpmel::cmd_verify(opts, std::cout, std::cerr);
        }
        qpmel::SampleSpec sample;
        if (!features.empty()) {
            std::vector<double> values;
            std::stringstream ss(features);
            std::string item;
            while (std::getline(ss, item, ',')) {
                values.push_back(std::stod(item));
            }
            sample.features = std::move(values);
        } else if (!sample_config.empty()) {
            sample.config_path = sample_config;
            sample.index = sample_index;
            sample.overrides = overrides();
        }
        return qpmel::cmd_export(checkpoint, sample, output, std::cout, std::cerr);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
