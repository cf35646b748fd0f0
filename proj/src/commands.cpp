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
#include "qpmel/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "qpmel/circuit_export.hpp"
#include "qpmel/errors.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

namespace {

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

template <class Fn> int guarded(std::ostream &err, Fn &&fn) {
    try {
        return fn();
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

void ensure_parent(const std::filesystem::path &file) {
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
}

} // namespace

int cmd_train(const std::filesystem::path &config_path,
              const std::vector<ConfigOverride> &overrides, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config_path, overrides);
        const LoadedData data = load_datasets(cfg);
        for (const auto &path : {cfg.output.checkpoint, cfg.output.metrics}) {
            if (path) {
                ensure_parent(*path);
            }
        }
        EncoderModel model = init_encoder(cfg.encoder.layer_dims, cfg.encoder.qubits,
                                          derive_seed(cfg.seed, seeds::kEncoderInit),
                                          cfg.encoder.activation);
        const TrainResult result = train(std::move(model), data.train, cfg.train);
        if (cfg.output.checkpoint) {
            save_checkpoint(result.model, *cfg.output.checkpoint);
            out << "checkpoint: " << cfg.output.checkpoint->string() << '\n';
        }
        if (cfg.output.metrics) {
            out << "metrics: " << cfg.output.metrics->string() << '\n';
        }
        out << "episodes: " << result.metrics.size() << '\n';
        if (result.metrics.empty()) {
            out << "final training accuracy: n/a (no episodes)\n";
            return 0;
        }
        const size_t window = std::min<size_t>(50, result.metrics.size());
        double acc = 0.0, loss = 0.0;
        for (size_t i = result.metrics.size() - window; i < result.metrics.size(); ++i) {
            acc += result.metrics[i].accuracy;
            loss += result.metrics[i].loss;
        }
        out << "final training accuracy (last " << window << " episodes): "
            << fixed(acc / double(window)) << '\n';
        out << "final training loss (last " << window << " episodes): "
            << fixed(loss / double(window)) << '\n';
        return 0;
    });
}

int cmd_eval(const std::filesystem::path &config_path,
             const std::optional<std::filesystem::path> &checkpoint,
             const std::vector<ConfigOverride> &overrides, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config_path, overrides);
        const auto ckpt = checkpoint ? checkpoint : cfg.output.checkpoint;
        if (!ckpt) {
            throw ConfigError("no checkpoint given and output.checkpoint is not set");
        }
        const EncoderModel model = load_checkpoint(*ckpt);
        if (model.qubits() != cfg.encoder.qubits) {
            throw ConfigError("checkpoint has Q = " + std::to_string(model.qubits()) +
                              " but config encoder.qubits = " +
                              std::to_string(cfg.encoder.qubits));
        }
        if (model.layer_dims() != cfg.encoder.layer_dims) {
            throw ConfigError("checkpoint layer_dims differ from config encoder.layer_dims");
        }
        const LoadedData data = load_datasets(cfg);
        EvalConfig ec = cfg.eval;
        ec.quantum = false;
        const EvalResult classical = evaluate(model, data.eval, ec);
        out << "classical accuracy: " << fixed(classical.mean) << " ± "
            << fixed(classical.interval) << " (" << ec.episodes << " episodes, " << ec.n_way
            << "-way " << ec.k_shot << "-shot)\n";
        if (cfg.eval.quantum) {
            ec.quantum = true;
            const EvalResult quantum = evaluate(model, data.eval, ec);
            out << "quantum accuracy (" << ec.shots << " shots): " << fixed(quantum.mean)
                << " ± " << fixed(quantum.interval) << '\n';
        }
        return 0;
    });
}

int cmd_verify(const VerifyOptions &options, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        bool all = true;
        for (const SuiteResult &r : run_verification(options)) {
            out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << fixed(r.seconds, 2)
                << " s): " << r.detail << '\n';
            all = all && r.passed;
        }
        out << (all ? "all suites passed" : "verification FAILED") << '\n';
        return all ? 0 : 1;
    });
}

int cmd_export(const std::filesystem::path &checkpoint, const SampleSpec &sample,
               const std::filesystem::path &output, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const EncoderModel model = load_checkpoint(checkpoint);
        Eigen::VectorXd x;
        std::filesystem::path target = output;
        if (sample.features) {
            x = Eigen::Map<const Eigen::VectorXd>(sample.features->data(),
                                                  static_cast<Eigen::Index>(sample.features->size()));
        } else if (sample.config_path) {
            const RunConfig cfg = load_config(*sample.config_path, sample.overrides);
            const LoadedData data = load_datasets(cfg);
            if (sample.index < 0 || sample.index >= data.eval.size()) {
                throw ArgumentError("sample index " + std::to_string(sample.index) +
                                    " outside the evaluation split (size " +
                                    std::to_string(data.eval.size()) + ")");
            }
            x = data.eval.features().row(sample.index).transpose();
            if (target.empty() && cfg.output.qasm) {
                target = *cfg.output.qasm;
            }
        } else {
            throw ArgumentError("export needs --features or --config with --sample");
        }
        if (target.empty()) {
            throw ArgumentError("export needs -o or a config with output.qasm");
        }
        const auto [encoding, trace] = forward(model, x);
        const std::string qasm = emit_qasm(to_circuit(encoding));
        ensure_parent(target);
        std::ofstream file(target);
        if (!file) {
            throw ArgumentError("cannot write " + target.string());
        }
        file << qasm;
        out << "wrote " << 2 * model.qubits() << " gates on " << model.qubits() << " qubits to "
            << target.string() << '\n';
        return 0;
    });
}

} // namespace qpmel
