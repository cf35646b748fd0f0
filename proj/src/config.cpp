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
#include "qpmel/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qpmel/errors.hpp"
#include "qpmel/random.hpp"

namespace qpmel {

using nlohmann::json;

namespace {

/// Typed access into a JSON object that reports the offending field path.
class Section {
  public:
    Section(const json &node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            fail(path_, "expected an object");
        }
    }

    [[noreturn]] static void fail(const std::string &field, const std::string &why) {
        throw ConfigError("config field '" + field + "': " + why);
    }

    [[nodiscard]] std::string field(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[nodiscard]] bool has(const std::string &key) const { return node_.contains(key); }

    void allow_only(const std::set<std::string> &known) const {
        for (const auto &[key, _] : node_.items()) {
            if (known.count(key) == 0) {
                fail(field(key), "unknown key");
            }
        }
    }

    [[nodiscard]] Section section(const std::string &key) const {
        static const json empty = json::object();
        return {has(key) ? node_.at(key) : empty, field(key)};
    }

    template <class T> T get(const std::string &key, T fallback) const {
        return has(key) ? as<T>(key) : fallback;
    }

    template <class T> T require(const std::string &key) const {
        if (!has(key)) {
            fail(field(key), "missing");
        }
        return as<T>(key);
    }

    std::optional<std::filesystem::path> path(const std::string &key,
                                              const std::filesystem::path &base) const {
        if (!has(key) || node_.at(key).is_null()) {
            return std::nullopt;
        }
        std::filesystem::path p = as<std::string>(key);
        return p.is_absolute() ? p : base / p;
    }

  private:
    template <class T> T as(const std::string &key) const {
        const json &v = node_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                fail(field(key), "expected a boolean");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                fail(field(key), "expected an integer");
            }
            if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() &&
                v.get<std::int64_t>() < 0) {
                fail(field(key), "expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                fail(field(key), "expected a number");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                fail(field(key), "expected a string");
            }
        } else {
            if (!v.is_array()) {
                fail(field(key), "expected an array");
            }
            for (const auto &e : v) {
                if (!e.is_number_integer()) {
                    fail(field(key), "expected an array of integers");
                }
            }
        }
        return v.get<T>();
    }

    const json &node_;
    std::string path_;
};

// `byte` is the 1-based offset of the last character the parser read.
std::string line_column(const std::string &text, size_t byte) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void apply_override(json &root, const ConfigOverride &o) {
    json *node = &root;
    std::stringstream ss(o.key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    if (parts.empty()) {
        throw ConfigError("override has an empty key");
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        json &next = (*node)[parts[i]];
        if (next.is_null()) {
            next = json::object();
        }
        if (!next.is_object()) {
            throw ConfigError("override '" + o.key + "': '" + parts[i] + "' is not a section");
        }
        node = &next;
    }
    json value = json::parse(o.value, nullptr, false);
    (*node)[parts.back()] = value.is_discarded() ? json(o.value) : value;
}

} // namespace

ConfigOverride parse_override(const std::string &text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + text + "' is not of the form key=value");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

RunConfig parse_config(const std::string &text, const std::filesystem::path &base_dir,
                       const std::vector<ConfigOverride> &overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError("config syntax error at " + line_column(text, e.byte) + ": " +
                          e.what());
    }
    for (const auto &o : overrides) {
        apply_override(root, o);
    }
    const Section top(root, "");
    top.allow_only({"seed", "dataset", "preprocess", "encoder", "train", "eval", "output"});

    RunConfig cfg;
    cfg.seed = top.get<std::uint64_t>("seed", 0);

    const Section ds = top.section("dataset");
    ds.allow_only({"source", "synthetic", "train_per_class", "train_images", "train_labels",
                   "test_images", "test_labels", "preset", "classes"});
    const std::string source = ds.get<std::string>("source", "synthetic");
    if (source == "synthetic") {
        cfg.dataset.source = DatasetConfig::Source::Synthetic;
        const Section s = ds.section("synthetic");
        s.allow_only({"n_classes", "dim", "per_class", "separation", "noise_sd"});
        cfg.dataset.blobs.n_classes = s.get<int>("n_classes", 4);
        cfg.dataset.blobs.dim = s.get<int>("dim", 8);
        cfg.dataset.blobs.per_class = s.get<int>("per_class", 200);
        cfg.dataset.blobs.separation = s.get<double>("separation", 6.0);
        cfg.dataset.blobs.noise_sd = s.get<double>("noise_sd", 1.0);
        cfg.dataset.blobs.seed = derive_seed(cfg.seed, seeds::kSynthetic);
        cfg.dataset.train_per_class = ds.get<size_t>("train_per_class", 0);
    } else if (source == "idx") {
        cfg.dataset.source = DatasetConfig::Source::Idx;
        cfg.dataset.train_images = ds.require<std::string>("train_images");
        cfg.dataset.train_labels = ds.require<std::string>("train_labels");
        cfg.dataset.test_images = ds.require<std::string>("test_images");
        cfg.dataset.test_labels = ds.require<std::string>("test_labels");
        for (auto *p : {&cfg.dataset.train_images, &cfg.dataset.train_labels, &cfg.dataset.test_images,
                        &cfg.dataset.test_labels}) {
            if (p->is_relative()) {
                *p = base_dir / *p;
            }
        }
    } else {
        Section::fail(ds.field("source"), "expected \"synthetic\" or \"idx\"");
    }
    if (ds.has("preset") && ds.has("classes")) {
        Section::fail(ds.field("preset"), "give either preset or classes, not both");
    }
    if (ds.has("preset")) {
        try {
            cfg.dataset.classes = class_preset(ds.get<std::string>("preset", ""));
        } catch (const ArgumentError &e) {
            Section::fail(ds.field("preset"), e.what());
        }
    } else {
        cfg.dataset.classes = ds.get<std::vector<int>>("classes", {});
    }

    const Section pre = top.section("preprocess");
    pre.allow_only({"mode", "factor"});
    const std::string mode = pre.get<std::string>("mode", "flatten");
    if (mode == "flatten") {
        cfg.preprocess = PreprocessMode::flatten();
    } else if (mode == "downsample") {
        cfg.preprocess = PreprocessMode::downsample(pre.get<int>("factor", 2));
    } else if (mode == "standardize") {
        cfg.preprocess = PreprocessMode::standardize();
    } else {
        Section::fail(pre.field("mode"), "expected flatten, downsample or standardize");
    }

    const Section enc = top.section("encoder");
    enc.allow_only({"layer_dims", "qubits", "activation"});
    cfg.encoder.layer_dims = enc.require<std::vector<int>>("layer_dims");
    cfg.encoder.qubits = enc.require<int>("qubits");
    if (cfg.encoder.layer_dims.empty()) {
        Section::fail(enc.field("layer_dims"), "must not be empty");
    }
    for (int d : cfg.encoder.layer_dims) {
        if (d < 1) {
            Section::fail(enc.field("layer_dims"), "dimensions must be positive");
        }
    }
    if (cfg.encoder.qubits < 1) {
        Section::fail(enc.field("qubits"), "must be >= 1");
    }
    try {
        cfg.encoder.activation = activation_from_string(enc.get<std::string>("activation", "relu"));
    } catch (const ArgumentError &e) {
        Section::fail(enc.field("activation"), e.what());
    }

    const Section tr = top.section("train");
    tr.allow_only({"n_way", "k_shot", "q_queries", "episodes", "learning_rate", "beta1", "beta2",
                   "epsilon", "temperature", "similarity"});
    TrainConfig &t = cfg.train;
    t.n_way = tr.get<int>("n_way", t.n_way);
    t.k_shot = tr.get<int>("k_shot", t.k_shot);
    t.q_queries = tr.get<int>("q_queries", t.q_queries);
    t.episodes = tr.get<int>("episodes", t.episodes);
    t.learning_rate = tr.get<double>("learning_rate", t.learning_rate);
    t.beta1 = tr.get<double>("beta1", t.beta1);
    t.beta2 = tr.get<double>("beta2", t.beta2);
    t.epsilon = tr.get<double>("epsilon", t.epsilon);
    t.temperature = tr.get<double>("temperature", t.temperature);
    try {
        t.similarity = similarity_from_string(tr.get<std::string>("similarity", "additive"));
    } catch (const ArgumentError &e) {
        Section::fail(tr.field("similarity"), e.what());
    }
    t.seed = derive_seed(cfg.seed, seeds::kTrain);
    if (t.n_way < 2) {
        Section::fail(tr.field("n_way"), "must be >= 2");
    }
    if (t.k_shot < 1 || t.q_queries < 1) {
        Section::fail(tr.field("k_shot"), "k_shot and q_queries must be >= 1");
    }
    if (t.episodes < 0) {
        Section::fail(tr.field("episodes"), "must be >= 0");
    }
    if (!(t.temperature > 0.0)) {
        Section::fail(tr.field("temperature"), "must be > 0");
    }
    if (!(t.learning_rate > 0.0)) {
        Section::fail(tr.field("learning_rate"), "must be > 0");
    }

    const Section ev = top.section("eval");
    ev.allow_only({"n_way", "k_shot", "q_queries", "episodes", "quantum", "shots"});
    EvalConfig &e = cfg.eval;
    e.n_way = ev.get<int>("n_way", t.n_way);
    e.k_shot = ev.get<int>("k_shot", t.k_shot);
    e.q_queries = ev.get<int>("q_queries", t.q_queries);
    e.episodes = ev.get<int>("episodes", 150);
    e.quantum = ev.get<bool>("quantum", false);
    e.shots = ev.get<std::uint64_t>("shots", 100000);
    e.seed = derive_seed(cfg.seed, seeds::kEval);
    e.shot_seed = derive_seed(cfg.seed, seeds::kShots);
    if (e.episodes < 2) {
        Section::fail(ev.field("episodes"), "must be >= 2");
    }
    if (e.n_way < 2) {
        Section::fail(ev.field("n_way"), "must be >= 2");
    }
    if (e.quantum && e.shots < 1) {
        Section::fail(ev.field("shots"), "must be >= 1");
    }

    const Section out = top.section("output");
    out.allow_only({"checkpoint", "metrics", "qasm"});
    cfg.output.checkpoint = out.path("checkpoint", base_dir);
    cfg.output.metrics = out.path("metrics", base_dir);
    cfg.output.qasm = out.path("qasm", base_dir);
    t.metrics_path = cfg.output.metrics;
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path,
                      const std::vector<ConfigOverride> &overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path(), overrides);
}

LoadedData load_datasets(const RunConfig &config) {
    const DatasetConfig &d = config.dataset;
    auto filtered = [&](const LabeledDataset &ds) {
        return d.classes.empty() ? ds : filter_classes(ds, d.classes);
    };
    LabeledDataset raw_train({}, {});
    LabeledDataset raw_eval({}, {});
    if (d.source == DatasetConfig::Source::Synthetic) {
        const LabeledDataset all = synth_blobs(d.blobs);
        const size_t split = d.train_per_class > 0
                                 ? d.train_per_class
                                 : static_cast<size_t>(d.blobs.per_class) / 2;
        auto [tr, ev] = split_per_class(all, split);
        raw_train = filtered(tr);
        raw_eval = filtered(ev);
    } else {
        raw_train = filtered(parse_idx(d.train_images, d.train_labels));
        raw_eval = filtered(parse_idx(d.test_images, d.test_labels));
    }
    Preprocessed pre = preprocess(raw_train, config.preprocess);
    LabeledDataset eval = apply_preprocess(raw_eval, config.preprocess, pre.stats);
    return {std::move(pre.dataset), std::move(eval)};
}

} // namespace qpmel
