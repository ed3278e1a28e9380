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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkml/dataset.hpp"
#include "qkml/preprocess.hpp"
#include "qkml/qka.hpp"

namespace qkml {

enum class ReducerKind { none, select_tree, select_forest, pca, lda };

ReducerKind reducer_kind_from_string(std::string_view name);
std::string to_string(ReducerKind kind);

struct ReducerConfig {
    ReducerKind kind = ReducerKind::none;
    int k = 0;
};

/// Pipeline algorithms: "svm_linear", "svm_rbf", "svm_poly", "svm_sigmoid",
/// the quantum kernels "q_kernel_zz", "q_kernel_default", "q_kernel_8" ...
/// "q_kernel_12", and the trained kernel "q_kernel_training".
bool is_quantum_algorithm(std::string_view algorithm);
void validate_algorithm(std::string_view algorithm);
std::span<const std::string> all_algorithms();

/**
 * One experiment cell: dataset, preprocessing, kernel algorithm, and the
 * evaluation protocol. JSON keys match the field names; unknown keys are
 * rejected.
 */
struct ExperimentConfig {
    std::string dataset_path;
    std::string label_column;
    std::optional<std::string> soma_column;
    std::optional<int> sample_cap;
    std::string rescaler = "none";
    ReducerConfig reducer;
    std::string algorithm = "svm_rbf";
    int reps = 2;
    std::optional<std::int64_t> shots;
    double svm_c = 1.0;
    int folds = 5;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    /// Fit rescaler/reducer once on the whole training set instead of per
    /// fold (compatibility mode; the strict per-fold protocol is default).
    bool fit_prep_once = false;
    /// Repair shot-sampled Gram matrices to PSD before SVM training.
    bool psd_clip = true;
};

ExperimentConfig experiment_config_from_json(const std::string &text);
std::string experiment_config_to_json(const ExperimentConfig &config);
void validate(const ExperimentConfig &config);

struct CvStats {
    double mean = 0.0;
    double stddev = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Mean, population std, and the 95% interval mean +/- 2 std.
CvStats cv_stats(const std::vector<double> &scores);

struct CvReport {
    ExperimentConfig config;
    std::vector<double> fold_scores;
    double cv_mean = 0.0;
    double cv_std = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double test_accuracy = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> timings;
    std::optional<QkaResult> qka;
};

std::string report_to_json(const CvReport &report);

/**
 * Preprocessing state fitted on training rows only. `fingerprint()` is a
 * deterministic byte serialization of every fitted statistic, used to assert
 * that validation rows cannot leak into the fit.
 */
struct FittedPipeline {
    std::optional<RescalerParams> rescaler;
    ReducerKind reducer_kind = ReducerKind::none;
    std::vector<int> selected_features;
    std::optional<ImportanceReport> importances;
    std::optional<PcaResult> pca_state;
    std::optional<LdaResult> lda_state;

    Eigen::MatrixXd transform(const Eigen::MatrixXd &X) const;
    std::string fingerprint() const;
};

FittedPipeline fit_pipeline(const ExperimentConfig &config, const Eigen::MatrixXd &X,
                            const std::vector<int> &y);

/// Stratified k-fold cross-validation on the given training set; fills the
/// fold scores and their statistics. Rescaler and reducer are fitted inside
/// each fold (unless fit_prep_once).
CvReport kfold_cv(const ExperimentConfig &config, const Dataset &train);

/// Full protocol: load, clean, optional stratified cap, 80/20 split, k-fold
/// CV on the training split, refit on the whole training split, score the
/// held-out test split. For q_kernel_training the kernel parameters are
/// trained per fold and again for the final refit (recorded in the report).
CvReport run_experiment(const ExperimentConfig &config);

/// run_experiment on an already loaded-and-cleaned dataset (the CSV stages
/// of the config are skipped).
CvReport run_experiment_on(const ExperimentConfig &config, const Dataset &ds);

/**
 * Grid driver: the cross product of rescalers x reducers x algorithms
 * (x sample caps when given) over a shared base config.
 */
struct GridConfig {
    ExperimentConfig base;
    std::vector<std::string> rescalers;
    std::vector<ReducerConfig> reducers;
    std::vector<std::string> algorithms;
    std::vector<std::optional<int>> sample_caps = {std::nullopt};
};

GridConfig grid_config_from_json(const std::string &text);

struct GridCell {
    std::string name;
    ExperimentConfig config;
    std::optional<CvReport> report;
    std::string error; ///< set when the cell failed; the grid keeps going
};

/// Runs every cell in config order; failures are recorded, not fatal.
std::vector<GridCell> run_grid(const GridConfig &grid);

/// Library version string reported in JSON outputs.
std::string version();

} // namespace qkml
