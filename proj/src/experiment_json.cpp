// Copyright 2026 The qkml developers
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

#include <cmath>
#include <set>

#include <json.hpp>

#include "qkml/errors.hpp"
#include "qkml/experiment.hpp"

namespace qkml {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json &object, const std::set<std::string> &allowed, const char *where) {
    for (const auto &item : object.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

json parse(const std::string &text, const char *where) {
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded() || !value.is_object()) {
        throw FormatError(std::string(where) + ": input is not a JSON object");
    }
    return value;
}

ReducerConfig reducer_from_json(const json &value) {
    if (!value.is_object()) {
        throw ConfigError("config: 'reducer' must be an object {kind, k}");
    }
    reject_unknown_keys(value, {"kind", "k"}, "reducer");
    ReducerConfig reducer;
    reducer.kind = reducer_kind_from_string(value.at("kind").get<std::string>());
    if (reducer.kind != ReducerKind::none) {
        reducer.k = value.at("k").get<int>();
    } else if (value.contains("k")) {
        reducer.k = value.at("k").get<int>();
    }
    return reducer;
}

json reducer_to_json(const ReducerConfig &reducer) {
    json value;
    value["kind"] = to_string(reducer.kind);
    if (reducer.kind != ReducerKind::none) {
        value["k"] = reducer.k;
    }
    return value;
}

ExperimentConfig config_from_json_object(const json &object) {
    static const std::set<std::string> allowed = {
        "dataset_path", "label_column", "soma_column", "sample_cap", "rescaler", "reducer",
        "algorithm",    "reps",         "shots",       "svm_c",      "folds",    "test_fraction",
        "seed",         "fit_prep_once", "psd_clip",
    };
    reject_unknown_keys(object, allowed, "config");

    ExperimentConfig config;
    if (object.contains("dataset_path")) {
        config.dataset_path = object.at("dataset_path").get<std::string>();
    }
    if (object.contains("label_column")) {
        config.label_column = object.at("label_column").get<std::string>();
    }
    if (object.contains("soma_column") && !object.at("soma_column").is_null()) {
        config.soma_column = object.at("soma_column").get<std::string>();
    }
    if (object.contains("sample_cap") && !object.at("sample_cap").is_null()) {
        config.sample_cap = object.at("sample_cap").get<int>();
    }
    if (object.contains("rescaler")) {
        config.rescaler = object.at("rescaler").get<std::string>();
    }
    if (object.contains("reducer")) {
        config.reducer = reducer_from_json(object.at("reducer"));
    }
    config.algorithm = object.at("algorithm").get<std::string>();
    if (object.contains("reps")) {
        config.reps = object.at("reps").get<int>();
    }
    if (object.contains("shots") && !object.at("shots").is_null()) {
        config.shots = object.at("shots").get<std::int64_t>();
    }
    if (object.contains("svm_c")) {
        config.svm_c = object.at("svm_c").get<double>();
    }
    if (object.contains("folds")) {
        config.folds = object.at("folds").get<int>();
    }
    if (object.contains("test_fraction")) {
        config.test_fraction = object.at("test_fraction").get<double>();
    }
    if (object.contains("seed")) {
        config.seed = object.at("seed").get<std::uint64_t>();
    }
    if (object.contains("fit_prep_once")) {
        config.fit_prep_once = object.at("fit_prep_once").get<bool>();
    }
    if (object.contains("psd_clip")) {
        config.psd_clip = object.at("psd_clip").get<bool>();
    }
    validate(config);
    return config;
}

json config_to_json_object(const ExperimentConfig &config) {
    json object;
    object["dataset_path"] = config.dataset_path;
    object["label_column"] = config.label_column;
    if (config.soma_column.has_value()) {
        object["soma_column"] = *config.soma_column;
    }
    if (config.sample_cap.has_value()) {
        object["sample_cap"] = *config.sample_cap;
    }
    object["rescaler"] = config.rescaler;
    object["reducer"] = reducer_to_json(config.reducer);
    object["algorithm"] = config.algorithm;
    object["reps"] = config.reps;
    if (config.shots.has_value()) {
        object["shots"] = *config.shots;
    }
    object["svm_c"] = config.svm_c;
    object["folds"] = config.folds;
    object["test_fraction"] = config.test_fraction;
    object["seed"] = config.seed;
    object["fit_prep_once"] = config.fit_prep_once;
    object["psd_clip"] = config.psd_clip;
    return object;
}

} // namespace

ExperimentConfig experiment_config_from_json(const std::string &text) {
    return config_from_json_object(parse(text, "config"));
}

std::string experiment_config_to_json(const ExperimentConfig &config) {
    return config_to_json_object(config).dump(2);
}

std::string report_to_json(const CvReport &report) {
    json object;
    object["config"] = config_to_json_object(report.config);
    object["fold_scores"] = report.fold_scores;
    object["cv_mean"] = report.cv_mean;
    object["cv_std"] = report.cv_std;
    object["ci95"] = {report.ci_low, report.ci_high};
    if (std::isfinite(report.test_accuracy)) {
        object["test_accuracy"] = report.test_accuracy;
    } else {
        object["test_accuracy"] = nullptr;
    }
    object["timings"] = report.timings;
    if (report.qka.has_value()) {
        json qka;
        qka["lambda_star"] = report.qka->lambda_star;
        qka["loss_history"] = report.qka->loss_history;
        qka["initial_loss"] = report.qka->initial_loss;
        object["qka"] = qka;
    }
    object["versions"] = {{"qkml", version()}, {"report", 1}};
    return object.dump(2);
}

GridConfig grid_config_from_json(const std::string &text) {
    const json object = parse(text, "grid config");
    reject_unknown_keys(object, {"base", "rescalers", "reducers", "algorithms", "sample_caps"},
                        "grid config");
    GridConfig grid;
    grid.base = config_from_json_object(object.at("base"));
    for (const auto &name : object.at("rescalers")) {
        grid.rescalers.push_back(name.get<std::string>());
    }
    for (const auto &value : object.at("reducers")) {
        grid.reducers.push_back(reducer_from_json(value));
    }
    for (const auto &name : object.at("algorithms")) {
        grid.algorithms.push_back(name.get<std::string>());
    }
    if (object.contains("sample_caps")) {
        grid.sample_caps.clear();
        for (const auto &value : object.at("sample_caps")) {
            if (value.is_null()) {
                grid.sample_caps.push_back(std::nullopt);
            } else {
                grid.sample_caps.push_back(value.get<int>());
            }
        }
    }
    if (grid.rescalers.empty() || grid.reducers.empty() || grid.algorithms.empty() ||
        grid.sample_caps.empty()) {
        throw ConfigError("grid config: rescalers, reducers and algorithms must be nonempty");
    }
    return grid;
}

} // namespace qkml
