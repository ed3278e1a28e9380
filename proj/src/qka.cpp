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

#include "qkml/qka.hpp"

#include <cmath>
#include <map>

#include "qkml/errors.hpp"
#include "qkml/rng.hpp"

namespace qkml {

namespace {

void check_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda) {
    if (static_cast<int>(lambda.size()) != spec.lambda_dim()) {
        throw ContractError("covariant kernel: lambda must have one angle per qubit (" +
                            std::to_string(spec.lambda_dim()) + "), got " +
                            std::to_string(lambda.size()));
    }
}

/// RY(-lambda_i) on every qubit, used to undo the fiducial layer in the
/// sampled estimation circuit.
Statevector apply_ry_adjoint_all(Statevector state, std::span<const double> lambda) {
    auto &amp = state.amplitudes;
    for (int q = 0; q < state.n_qubits; ++q) {
        const double c = std::cos(0.5 * lambda[static_cast<std::size_t>(q)]);
        const double s = std::sin(0.5 * lambda[static_cast<std::size_t>(q)]);
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < amp.size(); base += stride << 1) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const auto a0 = amp[i];
                const auto a1 = amp[i + stride];
                amp[i] = c * a0 + s * a1;
                amp[i + stride] = -s * a0 + c * a1;
            }
        }
    }
    return state;
}

std::vector<double> matrix_row(const Eigen::MatrixXd &X, Eigen::Index i) {
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        row[static_cast<std::size_t>(j)] = X(i, j);
    }
    return row;
}

} // namespace

Statevector fiducial_state(std::span<const double> lambda, int n_qubits) {
    if (static_cast<int>(lambda.size()) != n_qubits) {
        throw ContractError("fiducial_state: expected " + std::to_string(n_qubits) + " angles, got " +
                            std::to_string(lambda.size()));
    }
    Statevector state = zero_state(n_qubits);
    auto &amp = state.amplitudes;
    // Build the product state by doubling: qubit q contributes
    // (cos(l/2), sin(l/2)) to the (bit q = 0, bit q = 1) halves.
    for (int q = 0; q < n_qubits; ++q) {
        const double c = std::cos(0.5 * lambda[static_cast<std::size_t>(q)]);
        const double s = std::sin(0.5 * lambda[static_cast<std::size_t>(q)]);
        const std::size_t half = std::size_t{1} << q;
        for (std::size_t b = 0; b < half; ++b) {
            amp[b | half] = s * amp[b];
            amp[b] *= c;
        }
    }
    return state;
}

double kernel_entry_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                           std::span<const double> x, std::span<const double> y, const KernelMode &mode) {
    check_lambda(spec, lambda);
    if (mode.has_value()) {
        Statevector state = fiducial_state(lambda, spec.base.n_qubits);
        state = prepare_state_from(spec.base, y, std::move(state));
        state = apply_adjoint_circuit(spec.base, x, std::move(state));
        state = apply_ry_adjoint_all(std::move(state), lambda);
        return sample_zero_frequency(state, mode->shots, mode->seed);
    }
    const Statevector a = prepare_state_from(spec.base, x, fiducial_state(lambda, spec.base.n_qubits));
    const Statevector b = prepare_state_from(spec.base, y, fiducial_state(lambda, spec.base.n_qubits));
    return std::norm(inner_product(a, b));
}

GramMatrix gram_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                       const Eigen::MatrixXd &X, const KernelMode &mode) {
    check_lambda(spec, lambda);
    if (X.rows() == 0 || X.cols() != spec.base.n_qubits) {
        throw ContractError("gram_lambda: sample matrix width must match the qubit count");
    }
    const Eigen::Index n = X.rows();
    GramMatrix K;
    K.entries.setZero(n, n);
    K.symmetric = true;
    if (mode.has_value()) {
        K.sampled = true;
        K.shots = mode->shots;
        K.seed = mode->seed;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto xi = matrix_row(X, i);
            for (Eigen::Index j = i; j < n; ++j) {
                ShotOptions shot{mode->shots, derive_seed(mode->seed, static_cast<std::uint64_t>(i),
                                                          static_cast<std::uint64_t>(j))};
                const double v = kernel_entry_lambda(spec, lambda, xi, matrix_row(X, j), shot);
                K.entries(i, j) = v;
                K.entries(j, i) = v;
            }
        }
        return K;
    }
    std::vector<Statevector> states(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        states[static_cast<std::size_t>(i)] =
            prepare_state_from(spec.base, matrix_row(X, i), fiducial_state(lambda, spec.base.n_qubits));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        K.entries(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::norm(
                inner_product(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]));
            K.entries(i, j) = v;
            K.entries(j, i) = v;
        }
    }
    return K;
}

GramMatrix cross_gram_lambda(const CovariantKernelSpec &spec, std::span<const double> lambda,
                             const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, const KernelMode &mode) {
    check_lambda(spec, lambda);
    if (A.cols() != spec.base.n_qubits || B.cols() != spec.base.n_qubits) {
        throw ContractError("cross_gram_lambda: sample matrix width must match the qubit count");
    }
    GramMatrix K;
    K.entries.setZero(A.rows(), B.rows());
    K.symmetric = false;
    if (mode.has_value()) {
        K.sampled = true;
        K.shots = mode->shots;
        K.seed = mode->seed;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const auto ai = matrix_row(A, i);
            for (Eigen::Index j = 0; j < B.rows(); ++j) {
                ShotOptions shot{mode->shots, derive_seed(mode->seed, static_cast<std::uint64_t>(i),
                                                          static_cast<std::uint64_t>(j))};
                K.entries(i, j) = kernel_entry_lambda(spec, lambda, ai, matrix_row(B, j), shot);
            }
        }
        return K;
    }
    std::vector<Statevector> left(static_cast<std::size_t>(A.rows()));
    std::vector<Statevector> right(static_cast<std::size_t>(B.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        left[static_cast<std::size_t>(i)] =
            prepare_state_from(spec.base, matrix_row(A, i), fiducial_state(lambda, spec.base.n_qubits));
    }
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
        right[static_cast<std::size_t>(j)] =
            prepare_state_from(spec.base, matrix_row(B, j), fiducial_state(lambda, spec.base.n_qubits));
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            K.entries(i, j) = std::norm(inner_product(left[static_cast<std::size_t>(i)],
                                                      right[static_cast<std::size_t>(j)]));
        }
    }
    return K;
}

double svc_loss(const GramMatrix &K, const std::vector<int> &labels, double c) {
    const BinaryModel model = smo_train(K, labels, c);
    return dual_objective(model, K);
}

QkaResult spsa_train(const CovariantKernelSpec &spec, const Eigen::MatrixXd &X,
                     const std::vector<int> &labels, const QkaConfig &config) {
    if (X.rows() < 2 || static_cast<Eigen::Index>(labels.size()) != X.rows()) {
        throw ContractError("spsa_train: need at least two labeled samples");
    }
    if (config.max_iterations < 0 || !(config.learning_rate > 0.0) || !(config.perturbation > 0.0)) {
        throw ConfigError("spsa_train: max_iterations >= 0 and positive gains required");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (int y : labels) {
        (y == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw ContractError("spsa_train: both classes must be present");
    }

    const int dim = spec.lambda_dim();
    std::vector<double> lambda(static_cast<std::size_t>(dim), 0.1);
    const auto loss_at = [&](const std::vector<double> &point) {
        return svc_loss(gram_lambda(spec, point, X), labels, config.svm_c);
    };

    QkaResult result;
    result.initial_loss = loss_at(lambda);
    SplitMix64 rng(derive_seed(config.seed, 0x51CA));

    std::vector<double> plus(lambda.size());
    std::vector<double> minus(lambda.size());
    std::vector<int> delta(lambda.size());
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            delta[i] = rng.next_sign();
            plus[i] = lambda[i] + config.perturbation * delta[i];
            minus[i] = lambda[i] - config.perturbation * delta[i];
        }
        const double loss_plus = loss_at(plus);
        const double loss_minus = loss_at(minus);
        const double scale = (loss_plus - loss_minus) / (2.0 * config.perturbation);
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            lambda[i] -= config.learning_rate * scale * delta[i];
        }
        result.loss_history.push_back(loss_at(lambda));
    }
    result.lambda_star = std::move(lambda);
    return result;
}

std::vector<int> binary_reduction(const std::vector<int> &labels, std::optional<int> positive_class) {
    if (labels.empty()) {
        throw ContractError("binary_reduction: empty label vector");
    }
    int positive;
    if (positive_class.has_value()) {
        positive = *positive_class;
    } else {
        std::map<int, int> counts;
        for (int y : labels) {
            counts[y] += 1;
        }
        positive = counts.begin()->first;
        for (const auto &[cls, count] : counts) {
            if (count < counts.at(positive)) {
                positive = cls;
            }
        }
    }
    std::vector<int> reduced(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        reduced[i] = labels[i] == positive ? 1 : -1;
    }
    return reduced;
}

} // namespace qkml
