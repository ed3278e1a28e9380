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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qkml {

// ---------------------------------------------------------------------------
// Feature rescaling
// ---------------------------------------------------------------------------

enum class RescaleMethod {
    standard,
    minmax,
    maxabs,
    robust,
    l2norm,
    logistic,
    lognormal,
    boxcox,
    yeojohnson,
    quantile_normal,
    quantile_uniform,
};

/// Config-string names: "StandardScaler", "MinMaxScaler", "MaxAbsScaler",
/// "RobustScaler", "l2norm", "logistic", "lognormal", "boxcox",
/// "yeojohnson", "quantile_normal", "quantile_uniform".
RescaleMethod rescale_method_from_string(std::string_view name);
std::string to_string(RescaleMethod method);
std::span<const RescaleMethod> all_rescale_methods();

/**
 * Fitted per-feature statistics. Only the fields the method needs are
 * populated. All moments use the population convention (divide by n).
 */
struct RescalerParams {
    RescaleMethod method = RescaleMethod::standard;
    Eigen::Index n_features = 0;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> max_abs;
    std::vector<double> q1;
    std::vector<double> q3;
    std::vector<double> log_sigma;
    std::vector<double> lambda;
    std::vector<std::vector<double>> quantiles;
    /// Set per feature when a degenerate statistic (zero spread) was replaced
    /// by a neutral value.
    std::vector<bool> degenerate;
};

/// Fits the method's statistics on X (rows are samples). Requires >= 2
/// samples; boxcox and lognormal require strictly positive data and throw
/// DomainError naming the offending feature. Box-Cox / Yeo-Johnson lambdas
/// maximize the profile log-likelihood over [-5, 5] by golden-section search
/// to 1e-6.
RescalerParams fit_rescaler(RescaleMethod method, const Eigen::MatrixXd &X);

/// Applies fitted statistics; the feature count must match the fit.
Eigen::MatrixXd apply_rescaler(const RescalerParams &params, const Eigen::MatrixXd &X);

/// Standard-normal quantile (inverse CDF) via the AS241 rational
/// approximation; absolute error below 1e-9. Throws DomainError outside (0,1).
double normal_quantile(double p);

/// Standard-normal CDF.
double normal_cdf(double x);

/// One-value Box-Cox transform; x must be strictly positive.
double box_cox(double x, double lambda);

/// One-value Yeo-Johnson transform (continuous at 0 for every lambda).
double yeo_johnson(double y, double lambda);

// ---------------------------------------------------------------------------
// Outlier filtering
// ---------------------------------------------------------------------------

struct MahalanobisResult {
    std::vector<int> kept_indices;
    /// Squared Mahalanobis distance per input row.
    Eigen::VectorXd squared_distances;
    double threshold = 0.0;
};

/// Keeps rows whose squared Mahalanobis distance from the sample mean is at
/// most the chi-square quantile at probability alpha with n_features degrees
/// of freedom. The sample covariance is ridge-regularized by
/// (1e-6 * trace / d) * I.
MahalanobisResult mahalanobis_filter(const Eigen::MatrixXd &X, double alpha = 0.975);

/// Chi-square quantile via bisection on the regularized incomplete gamma.
double chi_square_quantile(double p, double dof);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// ---------------------------------------------------------------------------
// Tree-based feature selection
// ---------------------------------------------------------------------------

/// Gini impurity 1 - sum (c_k / n)^2 of a class-count vector.
double gini_impurity(std::span<const double> class_counts);

enum class ImportanceMethod { decision_tree, random_forest };

std::string to_string(ImportanceMethod method);

/// Normalized mean-decrease-impurity scores; sums to 1 whenever any split
/// occurred (any_split), otherwise all zeros.
struct ImportanceReport {
    ImportanceMethod method = ImportanceMethod::decision_tree;
    std::vector<double> importances;
    bool any_split = false;
};

struct TreeConfig {
    int max_depth = 0; ///< 0 = unlimited
    int min_samples_split = 2;
    std::uint64_t seed = 0;
};

struct ForestConfig {
    int n_trees = 100;
    int max_features = 0; ///< 0 = ceil(sqrt(d))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// CART importances: exhaustive (feature, threshold) search minimizing the
/// weighted child Gini, thresholds at midpoints of consecutive distinct
/// sorted values, ties to the lower feature index then lower threshold.
ImportanceReport tree_importances(const Eigen::MatrixXd &X, const std::vector<int> &y,
                                  const TreeConfig &config = {});

/// Bootstrap forest of CART trees with per-node feature subsampling;
/// per-tree importances averaged then renormalized. Deterministic per seed.
ImportanceReport forest_importances(const Eigen::MatrixXd &X, const std::vector<int> &y,
                                    const ForestConfig &config = {});

/// Indices of the k largest importances (ties to the lower index), sorted
/// ascending.
std::vector<int> select_top_k(const ImportanceReport &report, int k);

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

struct PcaResult {
    Eigen::MatrixXd projected;
    /// d x m, orthonormal columns by descending eigenvalue; each column's
    /// largest-magnitude entry is positive.
    Eigen::MatrixXd components;
    Eigen::VectorXd explained_variance;
    Eigen::VectorXd mean;

    Eigen::MatrixXd transform(const Eigen::MatrixXd &X) const;
};

PcaResult pca(const Eigen::MatrixXd &X, int m);

struct LdaResult {
    Eigen::MatrixXd projected;
    /// d x m unit-norm discriminant directions by descending generalized
    /// eigenvalue.
    Eigen::MatrixXd directions;
    Eigen::VectorXd mean;

    Eigen::MatrixXd transform(const Eigen::MatrixXd &X) const;
};

/// Fisher discriminant directions: top-m generalized eigenvectors of
/// (S_w^-1 S_b) with S_w ridge-regularized by 1e-6 * trace / d. Requires
/// m <= n_classes - 1.
LdaResult lda(const Eigen::MatrixXd &X, const std::vector<int> &y, int m);

} // namespace qkml
