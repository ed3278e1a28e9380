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
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qkml/featuremap.hpp"

namespace qkml {

/// Shot-sampling parameters. Passing std::nullopt where a mode is expected
/// selects exact evaluation.
struct ShotOptions {
    std::int64_t shots = 1024;
    std::uint64_t seed = 0;
};

using KernelMode = std::optional<ShotOptions>;

/**
 * Kernel matrix with provenance. Exact symmetric matrices carry an exact
 * unit diagonal; sampled matrices record the shot count and base seed that
 * reproduce them.
 */
struct GramMatrix {
    Eigen::MatrixXd entries;
    bool symmetric = false;
    bool sampled = false;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;

    Eigen::Index rows() const { return entries.rows(); }
    Eigen::Index cols() const { return entries.cols(); }
};

struct GramOptions {
    /// Budget for cached row statevectors; above it rows are processed in
    /// blocks and recomputed.
    std::size_t state_memory_budget = std::size_t{1} << 30;
    bool allow_blocks = true;
    /// Worker threads for entry assembly; <= 1 runs sequentially. Output is
    /// identical for any thread count.
    unsigned threads = 0;
};

/**
 * K(x, y). Exact mode evaluates |<psi(x)|psi(y)>|^2 from the two feature
 * states. Sampled mode runs the estimation circuit — the y-encoding followed
 * by the adjoint x-encoding on |0...0> — and returns the observed frequency
 * of the all-zero outcome.
 */
double kernel_entry(const FeatureMapSpec &spec, std::span<const double> x, std::span<const double> y,
                    const KernelMode &mode = std::nullopt);

/// Symmetric kernel matrix over the rows of X (one sample per row).
/// Sampled entries draw their per-entry seed from (mode->seed, i, j) with
/// the indices ordered, so assembly order and threading never change the
/// result.
GramMatrix gram(const FeatureMapSpec &spec, const Eigen::MatrixXd &X, const KernelMode &mode = std::nullopt,
                const GramOptions &options = {});

/// Rectangular kernel block entries[i][j] = K(A_i, B_j).
GramMatrix cross_gram(const FeatureMapSpec &spec, const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                      const KernelMode &mode = std::nullopt, const GramOptions &options = {});

/**
 * Nearest-PSD repair by eigenvalue clipping: negative eigenvalues of the
 * symmetric eigendecomposition are zeroed and the matrix reassembled and
 * re-symmetrized. The diagonal is not rescaled. Throws ContractError on a
 * non-symmetric input.
 */
GramMatrix psd_clip(const GramMatrix &K);

/// Writes a Gram matrix as a flat binary file: magic "QKGM", version u32,
/// size_a u64, size_b u64, mode tag u8 (0 exact / 1 sampled), shots u64,
/// seed u64, then row-major little-endian 8-byte floats.
void save_gram(const GramMatrix &K, const std::string &path);
GramMatrix load_gram(const std::string &path);

} // namespace qkml
