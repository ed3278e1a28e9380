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

#include <algorithm>
#include <cmath>
#include <map>

#include "qkml/errors.hpp"
#include "qkml/preprocess.hpp"

namespace qkml {

namespace {

/// Flips each column so its largest-magnitude entry is positive, which pins
/// the otherwise arbitrary eigenvector sign.
void fix_column_signs(Eigen::MatrixXd &M) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            const double mag = std::abs(M(r, c));
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (M(arg, c) < 0.0) {
            M.col(c) = -M.col(c);
        }
    }
}

} // namespace

Eigen::MatrixXd PcaResult::transform(const Eigen::MatrixXd &X) const {
    if (X.cols() != components.rows()) {
        throw ContractError("pca transform: feature count mismatch");
    }
    return (X.rowwise() - mean.transpose()) * components;
}

PcaResult pca(const Eigen::MatrixXd &X, int m) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (m < 1 || m > std::min(n, d)) {
        throw ConfigError("pca: m must lie in [1, min(n_samples, n_features)], got " + std::to_string(m));
    }
    PcaResult result;
    result.mean = X.colwise().mean().transpose();
    const Eigen::MatrixXd centered = X.rowwise() - result.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw NumericError("pca: eigendecomposition failed");
    }
    // Eigen reports eigenvalues ascending; take the top m in descending order.
    result.components.resize(d, m);
    result.explained_variance.resize(m);
    for (int c = 0; c < m; ++c) {
        const Eigen::Index source = d - 1 - c;
        result.components.col(c) = solver.eigenvectors().col(source);
        result.explained_variance(c) = std::max(0.0, solver.eigenvalues()(source));
    }
    fix_column_signs(result.components);
    result.projected = centered * result.components;
    return result;
}

Eigen::MatrixXd LdaResult::transform(const Eigen::MatrixXd &X) const {
    if (X.cols() != directions.rows()) {
        throw ContractError("lda transform: feature count mismatch");
    }
    return (X.rowwise() - mean.transpose()) * directions;
}

LdaResult lda(const Eigen::MatrixXd &X, const std::vector<int> &y, int m) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (static_cast<Eigen::Index>(y.size()) != n || n == 0) {
        throw ContractError("lda: sample and label counts must match");
    }
    std::map<int, std::vector<int>> by_class;
    for (Eigen::Index i = 0; i < n; ++i) {
        by_class[y[static_cast<std::size_t>(i)]].push_back(static_cast<int>(i));
    }
    const auto n_classes = static_cast<int>(by_class.size());
    if (n_classes < 2) {
        throw DataError("lda: at least two classes required");
    }
    if (m < 1 || m > n_classes - 1) {
        throw ConfigError("lda: m must lie in [1, n_classes - 1] = [1, " + std::to_string(n_classes - 1) +
                          "], got " + std::to_string(m));
    }

    LdaResult result;
    result.mean = X.colwise().mean().transpose();
    Eigen::MatrixXd s_w = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd s_b = Eigen::MatrixXd::Zero(d, d);
    for (const auto &[cls, rows] : by_class) {
        Eigen::RowVectorXd class_mean = Eigen::RowVectorXd::Zero(d);
        for (int i : rows) {
            class_mean += X.row(i);
        }
        class_mean /= static_cast<double>(rows.size());
        for (int i : rows) {
            const Eigen::RowVectorXd diff = X.row(i) - class_mean;
            s_w += diff.transpose() * diff;
        }
        const Eigen::RowVectorXd gap = class_mean - result.mean.transpose();
        s_b += static_cast<double>(rows.size()) * (gap.transpose() * gap);
    }
    const double ridge = 1e-6 * s_w.trace() / static_cast<double>(d);
    if (!(ridge > 0.0)) {
        throw NumericError("lda: within-class scatter has zero trace");
    }
    s_w += ridge * Eigen::MatrixXd::Identity(d, d);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(s_b, s_w);
    if (solver.info() != Eigen::Success) {
        throw NumericError("lda: generalized eigendecomposition failed");
    }
    result.directions.resize(d, m);
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - c);
        const double norm = v.norm();
        if (!(norm > 0.0)) {
            throw NumericError("lda: degenerate discriminant direction");
        }
        result.directions.col(c) = v / norm;
    }
    fix_column_signs(result.directions);
    result.projected = (X.rowwise() - result.mean.transpose()) * result.directions;
    return result;
}

} // namespace qkml
