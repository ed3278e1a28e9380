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

#include "qkml/featuremap.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qkml/errors.hpp"

namespace qkml {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCosFloor = 1e-9;
// exp() overflows a double just above 709; stay clear of it.
constexpr double kExpCeiling = 700.0;

constexpr std::array<FeatureMapKind, 7> kAllKinds = {
    FeatureMapKind::zz,      FeatureMapKind::pauli_default, FeatureMapKind::suzuki8,
    FeatureMapKind::suzuki9, FeatureMapKind::suzuki10,      FeatureMapKind::suzuki11,
    FeatureMapKind::suzuki12,
};

void require_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw ContractError("feature vector contains a non-finite value");
        }
    }
}

} // namespace

FeatureMapKind feature_map_kind_from_string(std::string_view name) {
    if (name == "q_kernel_zz") return FeatureMapKind::zz;
    if (name == "q_kernel_default") return FeatureMapKind::pauli_default;
    if (name == "q_kernel_8") return FeatureMapKind::suzuki8;
    if (name == "q_kernel_9") return FeatureMapKind::suzuki9;
    if (name == "q_kernel_10") return FeatureMapKind::suzuki10;
    if (name == "q_kernel_11") return FeatureMapKind::suzuki11;
    if (name == "q_kernel_12") return FeatureMapKind::suzuki12;
    throw ConfigError("unknown feature map kind: '" + std::string(name) + "'");
}

std::string to_string(FeatureMapKind kind) {
    switch (kind) {
    case FeatureMapKind::zz: return "q_kernel_zz";
    case FeatureMapKind::pauli_default: return "q_kernel_default";
    case FeatureMapKind::suzuki8: return "q_kernel_8";
    case FeatureMapKind::suzuki9: return "q_kernel_9";
    case FeatureMapKind::suzuki10: return "q_kernel_10";
    case FeatureMapKind::suzuki11: return "q_kernel_11";
    case FeatureMapKind::suzuki12: return "q_kernel_12";
    }
    throw ConfigError("invalid feature map kind value");
}

std::span<const FeatureMapKind> all_feature_map_kinds() { return kAllKinds; }

void validate(const FeatureMapSpec &spec) {
    if (spec.n_qubits < 1 || spec.n_qubits > kMaxQubits) {
        throw ConfigError("feature map: n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(spec.n_qubits));
    }
    if (spec.reps < 1) {
        throw ConfigError("feature map: reps must be >= 1, got " + std::to_string(spec.reps));
    }
}

double phi_single(FeatureMapKind /*kind*/, double x_i) { return x_i; }

double phi_pair(FeatureMapKind kind, double x_i, double x_j) {
    switch (kind) {
    case FeatureMapKind::zz:
    case FeatureMapKind::pauli_default:
        return (kPi - x_i) * (kPi - x_j);
    case FeatureMapKind::suzuki8:
        return kPi * x_i * x_j;
    case FeatureMapKind::suzuki9:
        return 0.5 * kPi * (1.0 - x_i) * (1.0 - x_j);
    case FeatureMapKind::suzuki10: {
        const double delta = x_i - x_j;
        const double exponent = delta * delta * std::log(kPi) / 8.0;
        if (exponent > kExpCeiling) {
            throw DomainError("q_kernel_10 pair angle overflows for |x_i - x_j| = " +
                              std::to_string(std::abs(delta)));
        }
        return std::exp(exponent);
    }
    case FeatureMapKind::suzuki11: {
        const double denom = std::cos(x_i) * std::cos(x_j);
        if (std::abs(denom) < kCosFloor) {
            throw DomainError("q_kernel_11 encoding is singular for pair (" + std::to_string(x_i) +
                              ", " + std::to_string(x_j) + "): cos(x_i)*cos(x_j) is below 1e-9");
        }
        return kPi / (3.0 * denom);
    }
    case FeatureMapKind::suzuki12:
        return kPi * std::cos(x_i) * std::cos(x_j);
    }
    throw ConfigError("invalid feature map kind value");
}

PhaseVector diagonal_phases(const FeatureMapSpec &spec, std::span<const double> x) {
    validate(spec);
    if (static_cast<int>(x.size()) != spec.n_qubits) {
        throw ContractError("diagonal_phases: feature vector has " + std::to_string(x.size()) +
                            " entries for " + std::to_string(spec.n_qubits) + " qubits");
    }
    require_finite(x);

    const int n = spec.n_qubits;
    std::vector<double> singles(n);
    for (int i = 0; i < n; ++i) {
        singles[i] = phi_single(spec.kind, x[i]);
    }
    // pair(i, j) for i < j, stored row by row.
    std::vector<double> pairs(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            pairs[static_cast<std::size_t>(i) * n + j] = phi_pair(spec.kind, x[i], x[j]);
        }
    }

    PhaseVector out;
    out.n_qubits = n;
    out.phases.assign(std::size_t{1} << n, 0.0);
    // Extend one qubit at a time. When qubit k joins, every existing entry b
    // gains z_k * (single_k + sum_{i<k} pair(i,k) * z_i(b)); the linear form
    // over earlier qubits is itself grown by doubling, so the whole build is
    // O(2^n) instead of O(2^n * n^2).
    std::vector<double> linear(std::size_t{1} << (n > 1 ? n - 1 : 0), 0.0);
    for (int k = 0; k < n; ++k) {
        const std::size_t half = std::size_t{1} << k;
        linear[0] = 0.0;
        for (int i = 0; i < k; ++i) {
            const double c = pairs[static_cast<std::size_t>(i) * n + k];
            const std::size_t block = std::size_t{1} << i;
            for (std::size_t b = 0; b < block; ++b) {
                linear[b | block] = linear[b] - c;
                linear[b] += c;
            }
        }
        for (std::size_t b = 0; b < half; ++b) {
            const double contribution = singles[k] + linear[b];
            out.phases[b | half] = out.phases[b] - contribution;
            out.phases[b] += contribution;
        }
    }
    return out;
}

Statevector prepare_state(const FeatureMapSpec &spec, std::span<const double> x) {
    return prepare_state_from(spec, x, zero_state(spec.n_qubits));
}

Statevector prepare_state_from(const FeatureMapSpec &spec, std::span<const double> x, Statevector initial) {
    if (initial.n_qubits != spec.n_qubits) {
        throw ContractError("prepare_state_from: initial state qubit count mismatch");
    }
    const PhaseVector phases = diagonal_phases(spec, x);
    Statevector state = std::move(initial);
    for (int r = 0; r < spec.reps; ++r) {
        state = apply_phases(hadamard_all(std::move(state)), phases);
    }
    return state;
}

Statevector apply_adjoint_circuit(const FeatureMapSpec &spec, std::span<const double> x, Statevector state) {
    if (state.n_qubits != spec.n_qubits) {
        throw ContractError("apply_adjoint_circuit: state qubit count mismatch");
    }
    PhaseVector negated = diagonal_phases(spec, x);
    for (double &p : negated.phases) {
        p = -p;
    }
    for (int r = 0; r < spec.reps; ++r) {
        state = hadamard_all(apply_phases(std::move(state), negated));
    }
    return state;
}

} // namespace qkml
