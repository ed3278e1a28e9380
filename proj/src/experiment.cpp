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

#include "qkml/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <set>

#include "qkml/errors.hpp"
#include "qkml/rng.hpp"
#include "qkml/svm.hpp"

namespace qkml {

namespace {

// Stage tags for deriving independent seed streams from the config seed.
constexpr std::uint64_t kTagSubsample = 1;
constexpr std::uint64_t kTagSplit = 2;
constexpr std::uint64_t kTagFolds = 3;
constexpr std::uint64_t kTagTrainGram = 4;
constexpr std::uint64_t kTagCrossGram = 5;
constexpr std::uint64_t kTagQka = 6;
constexpr std::uint64_t kTagPrep = 7;
// Fold index used for the final full-train refit.
constexpr std::uint64_t kFinalFit = 0xFFFF;

const std::array<std::string, 12> kAlgorithms = {
    "svm_linear",  "svm_rbf",    "svm_poly",   "svm_sigmoid", "q_kernel_zz",
    "q_kernel_default", "q_kernel_8", "q_kernel_9", "q_kernel_10", "q_kernel_11",
    "q_kernel_12", "q_kernel_training",
};

class StageTimer {
  public:
    explicit StageTimer(std::map<std::string, double> &sink) : sink_(sink) {}

    template <typename F>
    auto time(const std::string &stage, F &&fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            auto out = fn();
            record(stage, start);
            return out;
        }
    }

  private:
    void record(const std::string &stage, std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        sink_[stage] += elapsed.count();
    }

    std::map<std::string, double> &sink_;
};

void append_bytes(std::string &out, const void *data, std::size_t size) {
    out.append(static_cast<const char *>(data), size);
}

void append_double(std::string &out, double v) { append_bytes(out, &v, sizeof v); }

void append_doubles(std::string &out, const std::vector<double> &v) {
    for (double x : v) {
        append_double(out, x);
    }
}

void append_matrix(std::string &out, const Eigen::MatrixXd &m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            append_double(out, m(i, j));
        }
    }
}

struct AlgorithmPlan {
    bool quantum = false;
    bool trained = false;
    FeatureMapKind fm_kind = FeatureMapKind::zz;
    ClassicalKernelKind ck_kind = ClassicalKernelKind::rbf;
};

AlgorithmPlan plan_algorithm(std::string_view algorithm) {
    AlgorithmPlan plan;
    if (algorithm == "svm_linear") {
        plan.ck_kind = ClassicalKernelKind::linear;
    } else if (algorithm == "svm_rbf") {
        plan.ck_kind = ClassicalKernelKind::rbf;
    } else if (algorithm == "svm_poly") {
        plan.ck_kind = ClassicalKernelKind::poly;
    } else if (algorithm == "svm_sigmoid") {
        plan.ck_kind = ClassicalKernelKind::sigmoid;
    } else if (algorithm == "q_kernel_training") {
        plan.quantum = true;
        plan.trained = true;
        plan.fm_kind = FeatureMapKind::zz;
    } else {
        plan.quantum = true;
        plan.fm_kind = feature_map_kind_from_string(algorithm);
    }
    return plan;
}

/// Trains on (X_train, y_train), predicts X_eval. For the trained kernel the
/// alignment runs first on the binary reduction of y_train; the result is
/// reported back through qka_out.
std::vector<int> train_and_predict(const ExperimentConfig &config, const Eigen::MatrixXd &X_train,
                                   const std::vector<int> &y_train, const Eigen::MatrixXd &X_eval,
                                   std::uint64_t stage, std::optional<QkaResult> *qka_out) {
    const AlgorithmPlan plan = plan_algorithm(config.algorithm);
    GramMatrix K;
    GramMatrix K_cross;
    if (!plan.quantum) {
        const ClassicalKernelSpec spec = default_classical_spec(plan.ck_kind, X_train);
        K = classical_gram(spec, X_train);
        K_cross = classical_cross_gram(spec, X_eval, X_train);
    } else {
        if (X_train.cols() > kMaxQubits) {
            throw ConfigError("quantum pipeline would need " + std::to_string(X_train.cols()) +
                              " qubits; the ceiling is " + std::to_string(kMaxQubits));
        }
        FeatureMapSpec fm{plan.fm_kind, static_cast<int>(X_train.cols()), config.reps};
        KernelMode train_mode;
        KernelMode cross_mode;
        if (config.shots.has_value()) {
            train_mode = ShotOptions{*config.shots, derive_seed(config.seed, kTagTrainGram, stage)};
            cross_mode = ShotOptions{*config.shots, derive_seed(config.seed, kTagCrossGram, stage)};
        }
        if (plan.trained) {
            CovariantKernelSpec cov{fm};
            QkaConfig qka_config;
            qka_config.svm_c = config.svm_c;
            qka_config.seed = derive_seed(config.seed, kTagQka, stage);
            const QkaResult trained = spsa_train(cov, X_train, binary_reduction(y_train), qka_config);
            K = gram_lambda(cov, trained.lambda_star, X_train, train_mode);
            K_cross = cross_gram_lambda(cov, trained.lambda_star, X_eval, X_train, cross_mode);
            if (qka_out != nullptr) {
                *qka_out = trained;
            }
        } else {
            K = gram(fm, X_train, train_mode);
            K_cross = cross_gram(fm, X_eval, X_train, cross_mode);
        }
        if (K.sampled && config.psd_clip) {
            K = psd_clip(K);
        }
    }
    const OvoModel model = ovo_train(K, y_train, config.svm_c);
    return ovo_predict(model, K_cross);
}

std::vector<int> rows_where(const std::vector<int> &assignment, int fold, bool equal) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if ((assignment[i] == fold) == equal) {
            rows.push_back(static_cast<int>(i));
        }
    }
    return rows;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd &X, const std::vector<int> &rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = X.row(rows[k]);
    }
    return out;
}

std::vector<int> gather_labels(const std::vector<int> &y, const std::vector<int> &rows) {
    std::vector<int> out(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out[k] = y[static_cast<std::size_t>(rows[k])];
    }
    return out;
}

} // namespace

ReducerKind reducer_kind_from_string(std::string_view name) {
    if (name == "none") return ReducerKind::none;
    if (name == "select_tree") return ReducerKind::select_tree;
    if (name == "select_forest") return ReducerKind::select_forest;
    if (name == "pca") return ReducerKind::pca;
    if (name == "lda") return ReducerKind::lda;
    throw ConfigError("unknown reducer kind: '" + std::string(name) + "'");
}

std::string to_string(ReducerKind kind) {
    switch (kind) {
    case ReducerKind::none: return "none";
    case ReducerKind::select_tree: return "select_tree";
    case ReducerKind::select_forest: return "select_forest";
    case ReducerKind::pca: return "pca";
    case ReducerKind::lda: return "lda";
    }
    throw ConfigError("invalid reducer kind value");
}

bool is_quantum_algorithm(std::string_view algorithm) { return plan_algorithm(algorithm).quantum; }

void validate_algorithm(std::string_view algorithm) { (void)plan_algorithm(algorithm); }

std::span<const std::string> all_algorithms() { return {kAlgorithms.data(), kAlgorithms.size()}; }

void validate(const ExperimentConfig &config) {
    validate_algorithm(config.algorithm);
    if (config.rescaler != "none") {
        (void)rescale_method_from_string(config.rescaler);
    }
    if (config.reducer.kind != ReducerKind::none && config.reducer.k < 1) {
        throw ConfigError("reducer.k must be >= 1");
    }
    if (is_quantum_algorithm(config.algorithm) && config.reducer.kind != ReducerKind::none &&
        config.reducer.k > kMaxQubits) {
        throw ConfigError("quantum algorithms require reducer.k <= " + std::to_string(kMaxQubits) +
                          " qubits, got " + std::to_string(config.reducer.k));
    }
    if (config.reps < 1) {
        throw ConfigError("reps must be >= 1");
    }
    if (config.shots.has_value() && *config.shots < 1) {
        throw ConfigError("shots must be >= 1 when given");
    }
    if (!(config.svm_c > 0.0)) {
        throw ConfigError("svm_c must be positive");
    }
    if (config.folds < 2) {
        throw ConfigError("folds must be >= 2");
    }
    if (!(config.test_fraction > 0.0) || !(config.test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie in (0, 1)");
    }
    if (config.sample_cap.has_value() && *config.sample_cap < 1) {
        throw ConfigError("sample_cap must be >= 1 when given");
    }
}

CvStats cv_stats(const std::vector<double> &scores) {
    if (scores.empty()) {
        throw ContractError("cv_stats: no scores");
    }
    CvStats stats;
    double acc = 0.0;
    for (double s : scores) {
        acc += s;
    }
    stats.mean = acc / static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) {
        var += (s - stats.mean) * (s - stats.mean);
    }
    stats.stddev = std::sqrt(var / static_cast<double>(scores.size()));
    stats.ci_low = stats.mean - 2.0 * stats.stddev;
    stats.ci_high = stats.mean + 2.0 * stats.stddev;
    return stats;
}

Eigen::MatrixXd FittedPipeline::transform(const Eigen::MatrixXd &X) const {
    Eigen::MatrixXd out = rescaler.has_value() ? apply_rescaler(*rescaler, X) : X;
    switch (reducer_kind) {
    case ReducerKind::none:
        return out;
    case ReducerKind::select_tree:
    case ReducerKind::select_forest: {
        Eigen::MatrixXd selected(out.rows(), static_cast<Eigen::Index>(selected_features.size()));
        for (std::size_t c = 0; c < selected_features.size(); ++c) {
            selected.col(static_cast<Eigen::Index>(c)) = out.col(selected_features[c]);
        }
        return selected;
    }
    case ReducerKind::pca:
        return pca_state->transform(out);
    case ReducerKind::lda:
        return lda_state->transform(out);
    }
    throw ConfigError("invalid reducer kind value");
}

std::string FittedPipeline::fingerprint() const {
    std::string bytes;
    if (rescaler.has_value()) {
        bytes.push_back(static_cast<char>(rescaler->method));
        append_doubles(bytes, rescaler->mean);
        append_doubles(bytes, rescaler->stddev);
        append_doubles(bytes, rescaler->min);
        append_doubles(bytes, rescaler->max);
        append_doubles(bytes, rescaler->max_abs);
        append_doubles(bytes, rescaler->q1);
        append_doubles(bytes, rescaler->q3);
        append_doubles(bytes, rescaler->log_sigma);
        append_doubles(bytes, rescaler->lambda);
        for (const auto &grid : rescaler->quantiles) {
            append_doubles(bytes, grid);
        }
        for (bool flag : rescaler->degenerate) {
            bytes.push_back(flag ? '\1' : '\0');
        }
    }
    bytes.push_back(static_cast<char>(reducer_kind));
    for (int f : selected_features) {
        append_bytes(bytes, &f, sizeof f);
    }
    if (importances.has_value()) {
        append_doubles(bytes, importances->importances);
    }
    if (pca_state.has_value()) {
        append_matrix(bytes, pca_state->components);
        append_matrix(bytes, pca_state->mean);
        append_matrix(bytes, pca_state->explained_variance);
    }
    if (lda_state.has_value()) {
        append_matrix(bytes, lda_state->directions);
        append_matrix(bytes, lda_state->mean);
    }
    return bytes;
}

FittedPipeline fit_pipeline(const ExperimentConfig &config, const Eigen::MatrixXd &X,
                            const std::vector<int> &y) {
    FittedPipeline pipeline;
    pipeline.reducer_kind = config.reducer.kind;
    Eigen::MatrixXd rescaled = X;
    if (config.rescaler != "none") {
        pipeline.rescaler = fit_rescaler(rescale_method_from_string(config.rescaler), X);
        rescaled = apply_rescaler(*pipeline.rescaler, X);
    }
    switch (config.reducer.kind) {
    case ReducerKind::none:
        break;
    case ReducerKind::select_tree: {
        TreeConfig tree_config;
        tree_config.seed = derive_seed(config.seed, kTagPrep, 0);
        pipeline.importances = tree_importances(rescaled, y, tree_config);
        pipeline.selected_features = select_top_k(*pipeline.importances, config.reducer.k);
        break;
    }
    case ReducerKind::select_forest: {
        ForestConfig forest_config;
        forest_config.seed = derive_seed(config.seed, kTagPrep, 1);
        pipeline.importances = forest_importances(rescaled, y, forest_config);
        pipeline.selected_features = select_top_k(*pipeline.importances, config.reducer.k);
        break;
    }
    case ReducerKind::pca:
        pipeline.pca_state = pca(rescaled, config.reducer.k);
        break;
    case ReducerKind::lda:
        pipeline.lda_state = lda(rescaled, y, config.reducer.k);
        break;
    }
    return pipeline;
}

CvReport kfold_cv(const ExperimentConfig &config, const Dataset &train) {
    validate(config);
    CvReport report;
    report.config = config;

    const std::vector<int> assignment =
        stratified_fold_assignment(train.labels, config.folds, derive_seed(config.seed, kTagFolds, 0));

    std::optional<FittedPipeline> shared_pipeline;
    if (config.fit_prep_once) {
        shared_pipeline = fit_pipeline(config, train.features, train.labels);
    }
    for (int fold = 0; fold < config.folds; ++fold) {
        const std::vector<int> train_rows = rows_where(assignment, fold, false);
        const std::vector<int> val_rows = rows_where(assignment, fold, true);
        const Eigen::MatrixXd X_fit = gather_rows(train.features, train_rows);
        const std::vector<int> y_fit = gather_labels(train.labels, train_rows);
        const Eigen::MatrixXd X_val = gather_rows(train.features, val_rows);
        const std::vector<int> y_val = gather_labels(train.labels, val_rows);

        FittedPipeline fold_pipeline;
        if (!shared_pipeline.has_value()) {
            fold_pipeline = fit_pipeline(config, X_fit, y_fit);
        }
        const FittedPipeline &pipeline = shared_pipeline.has_value() ? *shared_pipeline : fold_pipeline;
        const Eigen::MatrixXd X_train = pipeline.transform(X_fit);
        const Eigen::MatrixXd X_eval = pipeline.transform(X_val);

        const std::vector<int> predictions =
            train_and_predict(config, X_train, y_fit, X_eval, static_cast<std::uint64_t>(fold), nullptr);
        report.fold_scores.push_back(accuracy(predictions, y_val));
    }

    const CvStats stats = cv_stats(report.fold_scores);
    report.cv_mean = stats.mean;
    report.cv_std = stats.stddev;
    report.ci_low = stats.ci_low;
    report.ci_high = stats.ci_high;
    return report;
}

CvReport run_experiment(const ExperimentConfig &config) {
    validate(config);
    if (config.dataset_path.empty() || config.label_column.empty()) {
        throw ConfigError("run_experiment: dataset_path and label_column are required");
    }
    std::map<std::string, double> io_timings;
    StageTimer timer(io_timings);
    const auto total_start = std::chrono::steady_clock::now();

    Dataset ds = timer.time("load", [&] { return load_csv(config.dataset_path, config.label_column); });
    ds = timer.time("clean", [&] { return clean(ds, config.soma_column); });
    CvReport report = run_experiment_on(config, ds);
    report.timings.insert(io_timings.begin(), io_timings.end());
    const std::chrono::duration<double> total = std::chrono::steady_clock::now() - total_start;
    report.timings["total"] = total.count();
    return report;
}

CvReport run_experiment_on(const ExperimentConfig &config, const Dataset &input) {
    validate(config);
    CvReport report;
    report.config = config;
    StageTimer timer(report.timings);
    const auto total_start = std::chrono::steady_clock::now();

    Dataset ds = input;
    if (config.sample_cap.has_value()) {
        ds = timer.time("subsample", [&] {
            return stratified_subsample(ds, *config.sample_cap, derive_seed(config.seed, kTagSubsample, 0));
        });
    }
    auto [train, test] = timer.time("split", [&] {
        return train_test_split(ds, config.test_fraction, derive_seed(config.seed, kTagSplit, 0));
    });

    CvReport cv = timer.time("cv", [&] { return kfold_cv(config, train); });
    report.fold_scores = cv.fold_scores;
    report.cv_mean = cv.cv_mean;
    report.cv_std = cv.cv_std;
    report.ci_low = cv.ci_low;
    report.ci_high = cv.ci_high;

    const FittedPipeline pipeline =
        timer.time("final_fit", [&] { return fit_pipeline(config, train.features, train.labels); });
    const Eigen::MatrixXd X_train = pipeline.transform(train.features);
    const Eigen::MatrixXd X_test = pipeline.transform(test.features);
    const std::vector<int> predictions = timer.time("test_eval", [&] {
        return train_and_predict(config, X_train, train.labels, X_test, kFinalFit, &report.qka);
    });
    report.test_accuracy = accuracy(predictions, test.labels);

    const std::chrono::duration<double> total = std::chrono::steady_clock::now() - total_start;
    report.timings["total"] = total.count();
    return report;
}

std::vector<GridCell> run_grid(const GridConfig &grid) {
    std::vector<GridCell> cells;
    std::size_t index = 0;
    for (const auto &cap : grid.sample_caps) {
        for (const auto &rescaler : grid.rescalers) {
            for (const auto &reducer : grid.reducers) {
                for (const auto &algorithm : grid.algorithms) {
                    GridCell cell;
                    cell.config = grid.base;
                    cell.config.sample_cap = cap;
                    cell.config.rescaler = rescaler;
                    cell.config.reducer = reducer;
                    cell.config.algorithm = algorithm;
                    std::string name = std::to_string(index++);
                    while (name.size() < 4) {
                        name.insert(name.begin(), '0');
                    }
                    name += "__" + rescaler + "__" + to_string(reducer.kind);
                    if (reducer.kind != ReducerKind::none) {
                        name += std::to_string(reducer.k);
                    }
                    name += "__" + algorithm;
                    if (cap.has_value()) {
                        name += "__cap" + std::to_string(*cap);
                    }
                    cell.name = name;
                    try {
                        cell.report = run_experiment(cell.config);
                    } catch (const std::exception &e) {
                        cell.error = e.what();
                    }
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

std::string version() { return "0.1.0"; }

} // namespace qkml
