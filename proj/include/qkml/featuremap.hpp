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
#include <string_view>
#include <vector>

#include "qkml/statevec.hpp"

namespace qkml {

using FeatureVector = std::vector<double>;

/**
 * Data-encoding families. All of them share the single-feature angle
 * phi_i(x) = x_i and differ only in the pair angle applied to every
 * unordered qubit pair (full entanglement):
 *
 *   zz, pauli_default   (pi - x_i) * (pi - x_j)
 *   suzuki8             pi * x_i * x_j
 *   suzuki9             (pi/2) * (1 - x_i) * (1 - x_j)
 *   suzuki10            exp(|x_i - x_j|^2 * ln(pi) / 8)
 *   suzuki11            pi / (3 * cos(x_i) * cos(x_j))
 *   suzuki12            pi * cos(x_i) * cos(x_j)
 */
enum class FeatureMapKind {
    zz,
    pauli_default,
    suzuki8,
    suzuki9,
    suzuki10,
    suzuki11,
    suzuki12,
};

/// Config-string names: "q_kernel_zz", "q_kernel_default", "q_kernel_8" ...
/// "q_kernel_12". Throws ConfigError on anything else.
FeatureMapKind feature_map_kind_from_string(std::string_view name);
std::string to_string(FeatureMapKind kind);

/// All seven kinds, in declaration order.
std::span<const FeatureMapKind> all_feature_map_kinds();

/**
 * An encoding circuit: `reps` repetitions of a global Hadamard layer
 * followed by the kind's diagonal phase layer. One qubit per feature;
 * pair terms over every unordered pair.
 */
struct FeatureMapSpec {
    FeatureMapKind kind = FeatureMapKind::zz;
    int n_qubits = 0;
    int reps = 2;
};

/// Validates qubit/rep bounds; throws ConfigError.
void validate(const FeatureMapSpec &spec);

/// Single-feature encoding angle (identity for every kind).
double phi_single(FeatureMapKind kind, double x_i);

/// Pair encoding angle. suzuki11 throws DomainError when
/// |cos(x_i)*cos(x_j)| < 1e-9; suzuki10 throws DomainError when the exponent
/// would overflow a double.
double phi_pair(FeatureMapKind kind, double x_i, double x_j);

/**
 * Diagonal of the encoding unitary: for every basis state b,
 * phases[b] = sum_i phi_i * z_i(b) + sum_{i<j} phi_ij * z_i(b) * z_j(b),
 * built incrementally in O(2^n) rather than by subset enumeration.
 */
PhaseVector diagonal_phases(const FeatureMapSpec &spec, std::span<const double> x);

/// Encoded feature state: the circuit applied to |0...0>.
Statevector prepare_state(const FeatureMapSpec &spec, std::span<const double> x);

/// Encoded state starting from an arbitrary initial register (used by the
/// trained-kernel path, where the initial state is a fiducial state).
Statevector prepare_state_from(const FeatureMapSpec &spec, std::span<const double> x, Statevector initial);

/// Adjoint circuit applied to an existing state: reversed blocks with
/// negated phases.
Statevector apply_adjoint_circuit(const FeatureMapSpec &spec, std::span<const double> x, Statevector state);

} // namespace qkml
