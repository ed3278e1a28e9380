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

#include <complex>
#include <cstdint>
#include <vector>

namespace qkml {

/// Largest register the engine will allocate. A 24-qubit state occupies
/// 256 MiB of complex doubles; anything bigger is a configuration mistake
/// at desk scale.
inline constexpr int kMaxQubits = 24;

/**
 * Pure state of an n-qubit register as 2^n complex amplitudes.
 *
 * Basis-index convention: qubit i corresponds to bit i of the basis index,
 * bit 0 least significant. The Pauli-Z eigenvalue of qubit i in basis state
 * b is +1 when bit i of b is 0 and -1 when it is 1.
 */
struct Statevector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }
};

/// Accumulated phase angle (radians) per basis state; the diagonal of a
/// Pauli-Z-basis diagonal gate.
struct PhaseVector {
    int n_qubits = 0;
    std::vector<double> phases;

    std::size_t dim() const { return phases.size(); }
};

/// |0...0> on n qubits. Throws ConfigError outside 1 <= n_qubits <= 24.
Statevector zero_state(int n_qubits);

/// Validates length and unit norm (1e-6) of externally supplied amplitudes.
Statevector statevector_from_amplitudes(int n_qubits, std::vector<std::complex<double>> amplitudes);

/// Applies one Hadamard gate to every qubit (normalized Walsh-Hadamard
/// transform of the amplitude vector).
Statevector hadamard_all(Statevector state);

/// amplitudes[b] *= exp(i * phases[b]). Throws ContractError on a qubit-count
/// mismatch.
Statevector apply_phases(Statevector state, const PhaseVector &phases);

/// <a|b> = sum_b conj(a[b]) * b[b]. Throws ContractError on mismatch.
std::complex<double> inner_product(const Statevector &a, const Statevector &b);

/// sum_b |amplitudes[b]|^2.
double norm_squared(const Statevector &state);

/**
 * Draws `shots` computational-basis outcomes from |amplitudes|^2 and returns
 * the observed frequency of the all-zero outcome.
 *
 * Sampling is inverse-CDF over the cumulative probability array with a
 * counter-based generator, so the result is a pure function of
 * (state, shots, seed). Throws ConfigError when shots < 1.
 */
double sample_zero_frequency(const Statevector &state, std::int64_t shots, std::uint64_t seed);

} // namespace qkml
