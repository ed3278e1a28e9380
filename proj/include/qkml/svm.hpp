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

#include <span>
#include <string>
#include <vector>

#include "qkml/qkernel.hpp"

namespace qkml {

enum class ClassicalKernelKind { linear, rbf, poly, sigmoid };

/**
 * Classical kernel functions:
 *   linear   <x, y>
 *   rbf      exp(-|x - y|^2 / (2 sigma^2))
 *   poly     (<x, y> + a)^b          (b a positive integer degree)
 *   sigmoid  tanh(a <x, y> - b)
 */
struct ClassicalKernelSpec {
    ClassicalKernelKind kind = ClassicalKernelKind::rbf;
    double sigma = 1.0;
    double a = 0.0;
    double b = 3.0;
};

ClassicalKernelKind classical_kernel_kind_from_string(std::string_view name);
std::string to_string(ClassicalKernelKind kind);

/// Fills in the data-dependent defaults: rbf sigma^2 = d * Var(X) / 2,
/// poly (a, b) = (0, 3), sigmoid (a, b) = (1/d, 0).
ClassicalKernelSpec default_classical_spec(ClassicalKernelKind kind, const Eigen::MatrixXd &X);

double classical_kernel(const ClassicalKernelSpec &spec, std::span<const double> x, std::span<const double> y);

GramMatrix classical_gram(const ClassicalKernelSpec &spec, const Eigen::MatrixXd &X);
GramMatrix classical_cross_gram(const ClassicalKernelSpec &spec, const Eigen::MatrixXd &A,
                                const Eigen::MatrixXd &B);

/**
 * Binary soft-margin dual solution. alpha_y holds alpha_i * y_i for each
 * support index; dual feasibility (0 <= alpha <= c, sum alpha_i y_i = 0)
 * holds on every trained model.
 */
struct BinaryModel {
    std::vector<double> alpha_y;
    std::vector<int> support_indices;
    double bias = 0.0;
    double c = 1.0;
};

/**
 * Sequential minimal optimization on a precomputed kernel matrix.
 *
 * Labels must be -1/+1 with both classes present. Pairs are chosen by
 * Platt's heuristics with a deterministic second choice (maximal |E_i - E_j|)
 * and deterministic sweep order, so retraining reproduces the same model.
 * The bias is the average of y_i - f0(x_i) over free support vectors.
 * Throws ConvergenceError with the residual if KKT tolerance is not reached
 * within the pass budget.
 */
BinaryModel smo_train(const GramMatrix &K, const std::vector<int> &labels, double c, double tol = 1e-6);

struct Decision {
    double value = 0.0;
    int label = 1;
};

/// decision = sum over support of alpha_y * k_row[index] + bias;
/// label = sign(decision) with sign(0) = +1. k_row is indexed by training
/// sample and must cover every support index.
Decision predict_binary(const BinaryModel &model, std::span<const double> k_row);

/// Dual-objective value of the trained model against the kernel it was
/// trained on: sum alpha - 1/2 alpha^T (yy^T o K) alpha.
double dual_objective(const BinaryModel &model, const GramMatrix &K);

/// Maximal KKT residual of a trained model (0 for a perfectly converged
/// solution): used by tests and the selfcheck suite.
double kkt_residual(const BinaryModel &model, const GramMatrix &K, const std::vector<int> &labels);

/**
 * All-pairs multiclass model: one binary solution per unordered class pair,
 * trained on the submatrix of the full Gram over that pair's samples. The
 * first class of the pair (in ascending class order) is mapped to +1.
 */
struct OvoModel {
    struct PairModel {
        int class_a = 0;
        int class_b = 0;
        std::vector<int> sample_indices;
        BinaryModel model;
    };

    std::vector<int> classes;
    std::vector<PairModel> pairs;
};

OvoModel ovo_train(const GramMatrix &K, const std::vector<int> &labels, double c, double tol = 1e-6);

/// Majority vote over pair decisions; ties broken by the larger sum of
/// |decision| over winning votes, then by class order. K_cross is indexed
/// (test row, training column).
std::vector<int> ovo_predict(const OvoModel &model, const GramMatrix &K_cross);

/// Fraction of matching labels.
double accuracy(const std::vector<int> &predicted, const std::vector<int> &expected);

} // namespace qkml
