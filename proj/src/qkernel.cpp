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

#include "qkml/qkernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "qkml/errors.hpp"
#include "qkml/rng.hpp"

namespace qkml {

namespace {

// Rows of a column-major matrix are strided, so assembly copies them into
// contiguous feature vectors once up front.
std::vector<FeatureVector> copy_rows(const Eigen::MatrixXd &X) {
    std::vector<FeatureVector> rows(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].assign(X.cols(), 0.0);
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = X(i, j);
        }
    }
    return rows;
}

void check_width(const FeatureMapSpec &spec, const Eigen::MatrixXd &X, const char *what) {
    if (X.rows() == 0) {
        throw ContractError(std::string(what) + ": sample matrix is empty");
    }
    if (X.cols() != spec.n_qubits) {
        throw ContractError(std::string(what) + ": " + std::to_string(X.cols()) +
                            " features per sample, spec encodes " + std::to_string(spec.n_qubits));
    }
}

double exact_entry(const Statevector &a, const Statevector &b) {
    return std::norm(inner_product(a, b));
}

double sampled_entry(const FeatureMapSpec &spec, std::span<const double> x, std::span<const double> y,
                     const ShotOptions &shot) {
    Statevector state = prepare_state(spec, y);
    state = apply_adjoint_circuit(spec, x, std::move(state));
    return sample_zero_frequency(state, shot.shots, shot.seed);
}

std::uint64_t pair_seed(std::uint64_t base, Eigen::Index i, Eigen::Index j) {
    return derive_seed(base, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
}

/// Runs fn(first, last) over [0, count) split across `threads` workers.
/// Each worker writes disjoint outputs, so scheduling cannot affect results.
void parallel_ranges(std::size_t count, unsigned threads, const std::function<void(std::size_t, std::size_t)> &fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1 || count <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t first = t * chunk;
        const std::size_t last = std::min(count, first + chunk);
        if (first >= last) {
            break;
        }
        workers.emplace_back([&fn, first, last] { fn(first, last); });
    }
    for (auto &w : workers) {
        w.join();
    }
}

std::size_t state_bytes(int n_qubits) {
    return (std::size_t{1} << n_qubits) * sizeof(std::complex<double>);
}

} // namespace

double kernel_entry(const FeatureMapSpec &spec, std::span<const double> x, std::span<const double> y,
                    const KernelMode &mode) {
    if (static_cast<int>(x.size()) != spec.n_qubits || static_cast<int>(y.size()) != spec.n_qubits) {
        throw ContractError("kernel_entry: feature vectors must have " + std::to_string(spec.n_qubits) +
                            " entries");
    }
    if (mode.has_value()) {
        return sampled_entry(spec, x, y, *mode);
    }
    const Statevector a = prepare_state(spec, x);
    const Statevector b = prepare_state(spec, y);
    return exact_entry(a, b);
}

GramMatrix gram(const FeatureMapSpec &spec, const Eigen::MatrixXd &X, const KernelMode &mode,
                const GramOptions &options) {
    check_width(spec, X, "gram");
    const Eigen::Index n = X.rows();
    const std::vector<FeatureVector> rows = copy_rows(X);

    GramMatrix K;
    K.entries.setZero(n, n);
    K.symmetric = true;
    if (mode.has_value()) {
        K.sampled = true;
        K.shots = mode->shots;
        K.seed = mode->seed;
        // Entry (i, j) with i < j gets its own deterministic stream; the
        // diagonal is estimated like any other entry (the circuit composes
        // to the identity, so every seed reports 1).
        parallel_ranges(static_cast<std::size_t>(n), options.threads, [&](std::size_t first, std::size_t last) {
            for (std::size_t i = first; i < last; ++i) {
                for (Eigen::Index j = static_cast<Eigen::Index>(i); j < n; ++j) {
                    ShotOptions shot{mode->shots, pair_seed(mode->seed, static_cast<Eigen::Index>(i), j)};
                    const double value =
                        sampled_entry(spec, rows[i], rows[static_cast<std::size_t>(j)], shot);
                    K.entries(static_cast<Eigen::Index>(i), j) = value;
                    K.entries(j, static_cast<Eigen::Index>(i)) = value;
                }
            }
        });
        return K;
    }

    const std::size_t per_state = state_bytes(spec.n_qubits);
    const std::size_t want_all = per_state * static_cast<std::size_t>(n);
    std::size_t block = static_cast<std::size_t>(n);
    if (want_all > options.state_memory_budget) {
        if (!options.allow_blocks) {
            throw ResourceError("gram: caching " + std::to_string(n) + " statevectors needs " +
                                std::to_string(want_all >> 20) + " MiB, over the " +
                                std::to_string(options.state_memory_budget >> 20) +
                                " MiB budget; enable block mode");
        }
        block = std::max<std::size_t>(1, options.state_memory_budget / (2 * per_state));
        if (block < 1 || 2 * per_state > options.state_memory_budget) {
            throw ResourceError("gram: even a two-state block exceeds the memory budget");
        }
    }

    auto prepare_block = [&](std::size_t first, std::size_t last) {
        std::vector<Statevector> states(last - first);
        parallel_ranges(last - first, options.threads, [&](std::size_t a, std::size_t b) {
            for (std::size_t k = a; k < b; ++k) {
                states[k] = prepare_state(spec, rows[first + k]);
            }
        });
        return states;
    };

    for (std::size_t bi = 0; bi < static_cast<std::size_t>(n); bi += block) {
        const std::size_t bi_end = std::min(static_cast<std::size_t>(n), bi + block);
        const std::vector<Statevector> left = prepare_block(bi, bi_end);
        for (std::size_t bj = bi; bj < static_cast<std::size_t>(n); bj += block) {
            const std::size_t bj_end = std::min(static_cast<std::size_t>(n), bj + block);
            const std::vector<Statevector> right =
                bj == bi ? std::vector<Statevector>{} : prepare_block(bj, bj_end);
            const std::vector<Statevector> &rhs = bj == bi ? left : right;
            parallel_ranges(bi_end - bi, options.threads, [&](std::size_t first, std::size_t last) {
                for (std::size_t a = first; a < last; ++a) {
                    const Eigen::Index i = static_cast<Eigen::Index>(bi + a);
                    for (std::size_t b = 0; b < rhs.size(); ++b) {
                        const Eigen::Index j = static_cast<Eigen::Index>(bj + b);
                        if (j < i) {
                            continue;
                        }
                        const double value = i == j ? 1.0 : exact_entry(left[a], rhs[b]);
                        K.entries(i, j) = value;
                        K.entries(j, i) = value;
                    }
                }
            });
        }
    }
    return K;
}

GramMatrix cross_gram(const FeatureMapSpec &spec, const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                      const KernelMode &mode, const GramOptions &options) {
    check_width(spec, A, "cross_gram");
    check_width(spec, B, "cross_gram");
    const std::vector<FeatureVector> rows_a = copy_rows(A);
    const std::vector<FeatureVector> rows_b = copy_rows(B);

    GramMatrix K;
    K.entries.setZero(A.rows(), B.rows());
    K.symmetric = false;
    if (mode.has_value()) {
        K.sampled = true;
        K.shots = mode->shots;
        K.seed = mode->seed;
        parallel_ranges(rows_a.size(), options.threads, [&](std::size_t first, std::size_t last) {
            for (std::size_t i = first; i < last; ++i) {
                for (std::size_t j = 0; j < rows_b.size(); ++j) {
                    ShotOptions shot{mode->shots, pair_seed(mode->seed, static_cast<Eigen::Index>(i),
                                                            static_cast<Eigen::Index>(j))};
                    K.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        sampled_entry(spec, rows_a[i], rows_b[j], shot);
                }
            }
        });
        return K;
    }

    const std::size_t per_state = state_bytes(spec.n_qubits);
    std::size_t block = rows_a.size() + rows_b.size();
    if (per_state * block > options.state_memory_budget) {
        if (!options.allow_blocks) {
            throw ResourceError("cross_gram: cached statevectors exceed the memory budget; "
                                "enable block mode");
        }
        block = std::max<std::size_t>(1, options.state_memory_budget / (2 * per_state));
        if (2 * per_state > options.state_memory_budget) {
            throw ResourceError("cross_gram: even a two-state block exceeds the memory budget");
        }
    }

    auto prepare_block = [&](const std::vector<FeatureVector> &rows, std::size_t first, std::size_t last) {
        std::vector<Statevector> states(last - first);
        parallel_ranges(last - first, options.threads, [&](std::size_t a, std::size_t b) {
            for (std::size_t k = a; k < b; ++k) {
                states[k] = prepare_state(spec, rows[first + k]);
            }
        });
        return states;
    };

    for (std::size_t bi = 0; bi < rows_a.size(); bi += block) {
        const std::size_t bi_end = std::min(rows_a.size(), bi + block);
        const std::vector<Statevector> left = prepare_block(rows_a, bi, bi_end);
        for (std::size_t bj = 0; bj < rows_b.size(); bj += block) {
            const std::size_t bj_end = std::min(rows_b.size(), bj + block);
            const std::vector<Statevector> right = prepare_block(rows_b, bj, bj_end);
            parallel_ranges(bi_end - bi, options.threads, [&](std::size_t first, std::size_t last) {
                for (std::size_t a = first; a < last; ++a) {
                    for (std::size_t b = 0; b < right.size(); ++b) {
                        K.entries(static_cast<Eigen::Index>(bi + a), static_cast<Eigen::Index>(bj + b)) =
                            exact_entry(left[a], right[b]);
                    }
                }
            });
        }
    }
    return K;
}

GramMatrix psd_clip(const GramMatrix &K) {
    if (!K.symmetric || K.entries.rows() != K.entries.cols()) {
        throw ContractError("psd_clip: input must be a symmetric Gram matrix");
    }
    if (K.entries != K.entries.transpose().eval()) {
        throw ContractError("psd_clip: entries are not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K.entries);
    if (solver.info() != Eigen::Success) {
        throw NumericError("psd_clip: eigendecomposition failed");
    }
    Eigen::VectorXd values = solver.eigenvalues().cwiseMax(0.0);
    GramMatrix out = K;
    out.entries = solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
    out.entries = (0.5 * (out.entries + out.entries.transpose())).eval();
    return out;
}

} // namespace qkml
