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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkml/errors.hpp"
#include "qkml/experiment.hpp"
#include "qkml/selfcheck.hpp"

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw qkml::FormatError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path);
    if (!out) {
        throw qkml::FormatError("cannot write '" + path + "'");
    }
    out << content;
}

qkml::ExperimentConfig load_config(const std::string &path, bool fit_prep_once_flag) {
    qkml::ExperimentConfig config = qkml::experiment_config_from_json(read_file(path));
    if (fit_prep_once_flag) {
        config.fit_prep_once = true;
    }
    return config;
}

/// Fits the configured pipeline on the whole (cleaned, optionally capped)
/// dataset; shared by the `gram` and `importances` subcommands.
struct PreparedData {
    qkml::Dataset dataset;
    Eigen::MatrixXd transformed;
    qkml::FittedPipeline pipeline;
};

PreparedData prepare_full_dataset(const qkml::ExperimentConfig &config) {
    PreparedData prepared;
    prepared.dataset = qkml::clean(qkml::load_csv(config.dataset_path, config.label_column),
                                   config.soma_column);
    if (config.sample_cap.has_value()) {
        prepared.dataset = qkml::stratified_subsample(prepared.dataset, *config.sample_cap, config.seed);
    }
    prepared.pipeline = qkml::fit_pipeline(config, prepared.dataset.features, prepared.dataset.labels);
    prepared.transformed = prepared.pipeline.transform(prepared.dataset.features);
    return prepared;
}

int command_run(const std::string &config_path, const std::string &out_path, bool fit_prep_once) {
    const qkml::ExperimentConfig config = load_config(config_path, fit_prep_once);
    const qkml::CvReport report = qkml::run_experiment(config);
    const std::string text = qkml::report_to_json(report);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        write_file(out_path, text);
        std::cout << "report written to " << out_path << "\n";
    }
    return 0;
}

int command_grid(const std::string &config_path, const std::string &out_dir) {
    const qkml::GridConfig grid = qkml::grid_config_from_json(read_file(config_path));
    std::filesystem::create_directories(out_dir);
    const std::vector<qkml::GridCell> cells = qkml::run_grid(grid);

    nlohmann::json index = nlohmann::json::array();
    int failures = 0;
    for (const auto &cell : cells) {
        const std::string file = cell.name + ".json";
        if (cell.report.has_value()) {
            write_file(out_dir + "/" + file, qkml::report_to_json(*cell.report));
            index.push_back({{"file", file},
                             {"status", "ok"},
                             {"cv_mean", cell.report->cv_mean},
                             {"test_accuracy", cell.report->test_accuracy}});
        } else {
            nlohmann::json error_report;
            error_report["config"] =
                nlohmann::json::parse(qkml::experiment_config_to_json(cell.config));
            error_report["error"] = cell.error;
            write_file(out_dir + "/" + file, error_report.dump(2));
            index.push_back({{"file", file}, {"status", "error"}, {"error", cell.error}});
            ++failures;
        }
    }
    write_file(out_dir + "/index.json", index.dump(2));
    std::cout << cells.size() << " grid cells written to " << out_dir << " (" << failures
              << " failed)\n";
    return 0;
}

int command_gram(const std::string &config_path, const std::string &out_path) {
    const qkml::ExperimentConfig config = load_config(config_path, false);
    const PreparedData prepared = prepare_full_dataset(config);

    qkml::GramMatrix K;
    if (qkml::is_quantum_algorithm(config.algorithm)) {
        if (config.algorithm == "q_kernel_training") {
            throw qkml::ConfigError("gram: q_kernel_training requires a training loop; "
                                    "use `run` or a fixed feature-map kernel");
        }
        qkml::FeatureMapSpec spec{qkml::feature_map_kind_from_string(config.algorithm),
                                  static_cast<int>(prepared.transformed.cols()), config.reps};
        qkml::KernelMode mode;
        if (config.shots.has_value()) {
            mode = qkml::ShotOptions{*config.shots, config.seed};
        }
        K = qkml::gram(spec, prepared.transformed, mode);
    } else {
        const auto kind = qkml::classical_kernel_kind_from_string(
            std::string(config.algorithm).substr(std::string("svm_").size()));
        K = qkml::classical_gram(qkml::default_classical_spec(kind, prepared.transformed),
                                 prepared.transformed);
    }
    qkml::save_gram(K, out_path);
    std::cout << "gram " << K.rows() << "x" << K.cols() << " written to " << out_path << "\n";
    return 0;
}

int command_importances(const std::string &config_path) {
    const qkml::ExperimentConfig config = load_config(config_path, false);
    if (config.reducer.kind != qkml::ReducerKind::select_tree &&
        config.reducer.kind != qkml::ReducerKind::select_forest) {
        throw qkml::ConfigError("importances: reducer.kind must be select_tree or select_forest");
    }
    const PreparedData prepared = prepare_full_dataset(config);

    nlohmann::json out;
    out["method"] = qkml::to_string(prepared.pipeline.importances->method);
    out["importances"] = prepared.pipeline.importances->importances;
    nlohmann::json selected = nlohmann::json::array();
    for (int f : prepared.pipeline.selected_features) {
        selected.push_back({{"index", f}, {"name", prepared.dataset.feature_names[static_cast<std::size_t>(f)]}});
    }
    out["selected"] = selected;
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"quantum-kernel machine learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool fit_prep_once = false;

    auto *run = app.add_subcommand("run", "run one experiment and emit its JSON report");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_path, "report path (stdout when omitted)");
    run->add_flag("--fit-prep-once", fit_prep_once,
                  "fit rescaler/reducer once on the training set instead of per fold");

    auto *grid = app.add_subcommand("grid", "run a rescaler x reducer x algorithm grid");
    grid->add_option("--config", config_path, "grid config JSON")->required();
    grid->add_option("--out", out_path, "output directory")->required();

    auto *gram = app.add_subcommand("gram", "compute a kernel matrix and save it as QKGM");
    gram->add_option("--config", config_path, "experiment config JSON")->required();
    gram->add_option("--out", out_path, "output .qkgm path")->required();

    auto *importances = app.add_subcommand("importances", "print tree/forest feature importances");
    importances->add_option("--config", config_path, "experiment config JSON")->required();

    auto *selfcheck = app.add_subcommand("selfcheck", "run the built-in oracle suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return command_run(config_path, out_path, fit_prep_once);
        }
        if (grid->parsed()) {
            return command_grid(config_path, out_path);
        }
        if (gram->parsed()) {
            return command_gram(config_path, out_path);
        }
        if (importances->parsed()) {
            return command_importances(config_path);
        }
        if (selfcheck->parsed()) {
            return qkml::run_selfcheck(std::cout) == 0 ? 0 : 1;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
