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

#include <optional>

#include "qkml/qkernel.hpp"
#include "qkml/svm.hpp"

namespace qkml {

/**
 * Trainable covariant kernel: the data circuit D(x) acting on a fiducial
 * state U_lambda |0...0> instead of |0...0>. The fiducial layer is one
 * Y-rotation per qubit, so lambda has one angle per qubit.
 */
struct CovariantKernelSpec {
    FeatureMapSpec base;

    int lambda_dim() const { return base.n_qubits; }
};

struct QkaConfig {
    int max_iterations = 10;
    double learning_rate = 0.05;
    double perturbation = 0.05;
    double svm_c = 1.0;
    std::uint64_t seed = 0;
};

struct QkaResult {
    std::vector<double> lambda_star;
    std::vector<double> loss_history;
    double initial_loss = 0.0;
};

/// Product state with qubit i rotated from |0> by RY(lambda_i):
/// per-qubit amplitudes (cos(lambda_i/2), sin(lambda_i/2)). Real-valued.
Statevector fiducial_state(std::span<const double> lambda, int n_qubits);

/// K_lambda(x, y) = |<psi_x|psi_y>|^2 with psi = D(.) applied to the
/// fiducial state. Sampled mode runs the composed circuit
/// U_lambda^dag D^dag(x) D(y) U_lambda on |0...0> and counts zeros.
double kernel_entry_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                           std::span<const double> x, std::span<const double> y,
                           const KernelMode &mode = std::nullopt);

/// Symmetric lambda-kernel matrix over the rows of X.
GramMatrix gram_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                       const Eigen::MatrixXd &X, const KernelMode &mode = std::nullopt);

/// Rectangular lambda-kernel block.
GramMatrix cross_gram_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                             const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                             const KernelMode &mode = std::nullopt);

/// Optimal value of the binary SVM dual on K (the weighted kernel alignment
/// loss minimized over lambda). Labels must be -1/+1 with both classes
/// present; c bounds the box constraint.
double svc_loss(const GramMatrix &K, const std::vector<int> &labels, double c);

/**
 * SPSA minimization of svc_loss over the fiducial angles.
 *
 * lambda starts at 0.1 on every coordinate. Each iteration draws one
 * Rademacher direction from the seeded stream, estimates the gradient from
 * the two perturbed losses, takes the constant-gain step, and records the
 * loss at the updated point. Deterministic for a fixed config.
 */
QkaResult spsa_train(const CovariantKernelSpec &spec, const Eigen::MatrixXd &X,
                     const std::vector<int> &labels, const QkaConfig &config);

/// Reduces multiclass labels to -1/+1 for the binary alignment loss: the
/// positive class is `positive_class` when given, otherwise the rarest class
/// (ties to the smaller label).
std::vector<int> binary_reduction(const std::vector<int> &labels, std::optional<int> positive_class = {});

} // namespace qkml
