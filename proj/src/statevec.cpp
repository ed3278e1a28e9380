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

#include "qkml/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkml/errors.hpp"
#include "qkml/rng.hpp"

namespace qkml {

Statevector zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("zero_state: n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(n_qubits));
    }
    Statevector state;
    state.n_qubits = n_qubits;
    state.amplitudes.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    state.amplitudes[0] = {1.0, 0.0};
    return state;
}

Statevector statevector_from_amplitudes(int n_qubits, std::vector<std::complex<double>> amplitudes) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("statevector_from_amplitudes: n_qubits out of range");
    }
    if (amplitudes.size() != (std::size_t{1} << n_qubits)) {
        throw ContractError("statevector_from_amplitudes: expected 2^" + std::to_string(n_qubits) +
                            " amplitudes, got " + std::to_string(amplitudes.size()));
    }
    double norm2 = 0.0;
    for (const auto &a : amplitudes) {
        norm2 += std::norm(a);
    }
    if (std::abs(norm2 - 1.0) > 1e-6) {
        throw ContractError("statevector_from_amplitudes: amplitudes are not normalized");
    }
    Statevector state;
    state.n_qubits = n_qubits;
    state.amplitudes = std::move(amplitudes);
    return state;
}

Statevector hadamard_all(Statevector state) {
    auto &amp = state.amplitudes;
    const std::size_t dim = amp.size();
    for (std::size_t h = 1; h < dim; h <<= 1) {
        for (std::size_t base = 0; base < dim; base += h << 1) {
            for (std::size_t i = base; i < base + h; ++i) {
                const auto a = amp[i];
                const auto b = amp[i + h];
                amp[i] = a + b;
                amp[i + h] = a - b;
            }
        }
    }
    const double scale = std::pow(2.0, -0.5 * state.n_qubits);
    for (auto &a : amp) {
        a *= scale;
    }
    return state;
}

Statevector apply_phases(Statevector state, const PhaseVector &phases) {
    if (phases.n_qubits != state.n_qubits || phases.phases.size() != state.amplitudes.size()) {
        throw ContractError("apply_phases: phase vector is for " + std::to_string(phases.n_qubits) +
                            " qubits, state has " + std::to_string(state.n_qubits));
    }
    for (std::size_t b = 0; b < state.amplitudes.size(); ++b) {
        state.amplitudes[b] *= std::polar(1.0, phases.phases[b]);
    }
    return state;
}

std::complex<double> inner_product(const Statevector &a, const Statevector &b) {
    if (a.n_qubits != b.n_qubits) {
        throw ContractError("inner_product: qubit counts differ (" + std::to_string(a.n_qubits) +
                            " vs " + std::to_string(b.n_qubits) + ")");
    }
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return acc;
}

double norm_squared(const Statevector &state) {
    double norm2 = 0.0;
    for (const auto &a : state.amplitudes) {
        norm2 += std::norm(a);
    }
    return norm2;
}

double sample_zero_frequency(const Statevector &state, std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw ConfigError("sample_zero_frequency: shots must be >= 1, got " + std::to_string(shots));
    }
    std::vector<double> cumulative(state.amplitudes.size());
    double running = 0.0;
    for (std::size_t b = 0; b < state.amplitudes.size(); ++b) {
        running += std::norm(state.amplitudes[b]);
        cumulative[b] = running;
    }
    const double total = cumulative.back();

    SplitMix64 rng(seed);
    std::int64_t zeros = 0;
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t outcome =
            it == cumulative.end() ? cumulative.size() - 1 : static_cast<std::size_t>(it - cumulative.begin());
        if (outcome == 0) {
            ++zeros;
        }
    }
    return static_cast<double>(zeros) / static_cast<double>(shots);
}

} // namespace qkml
