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

#include "qkml/selfcheck.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "qkml/preprocess.hpp"
#include "qkml/qkernel.hpp"
#include "qkml/rng.hpp"
#include "qkml/svm.hpp"

namespace qkml {

namespace {

using complexd = std::complex<double>;

// --- independent dense-circuit oracle -------------------------------------
// Everything below recomputes expected values from first principles (dense
// matrices, subset enumeration, projected gradient) without touching the
// fast paths it cross-checks.

double oracle_pair_angle(FeatureMapKind kind, double xi, double xj) {
    const double pi = std::numbers::pi;
    switch (kind) {
    case FeatureMapKind::zz:
    case FeatureMapKind::pauli_default: return (pi - xi) * (pi - xj);
    case FeatureMapKind::suzuki8: return pi * xi * xj;
    case FeatureMapKind::suzuki9: return 0.5 * pi * (1.0 - xi) * (1.0 - xj);
    case FeatureMapKind::suzuki10: return std::exp((xi - xj) * (xi - xj) * std::log(pi) / 8.0);
    case FeatureMapKind::suzuki11: return pi / (3.0 * std::cos(xi) * std::cos(xj));
    case FeatureMapKind::suzuki12: return pi * std::cos(xi) * std::cos(xj);
    }
    return 0.0;
}

int z_sign(std::size_t basis, int qubit) { return (basis >> qubit) & 1 ? -1 : 1; }

std::vector<double> oracle_phases(FeatureMapKind kind, const std::vector<double> &x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> phases(std::size_t{1} << n, 0.0);
    for (std::size_t b = 0; b < phases.size(); ++b) {
        double phase = 0.0;
        for (int i = 0; i < n; ++i) {
            phase += x[static_cast<std::size_t>(i)] * z_sign(b, i);
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                phase += oracle_pair_angle(kind, x[static_cast<std::size_t>(i)],
                                           x[static_cast<std::size_t>(j)]) *
                         z_sign(b, i) * z_sign(b, j);
            }
        }
        phases[b] = phase;
    }
    return phases;
}

std::vector<complexd> oracle_state(FeatureMapKind kind, const std::vector<double> &x, int reps) {
    const int n = static_cast<int>(x.size());
    const std::size_t dim = std::size_t{1} << n;
    const double scale = std::pow(2.0, -0.5 * n);
    const std::vector<double> phases = oracle_phases(kind, x);

    std::vector<complexd> state(dim, complexd{0.0, 0.0});
    state[0] = 1.0;
    std::vector<complexd> next(dim);
    for (int r = 0; r < reps; ++r) {
        for (std::size_t row = 0; row < dim; ++row) {
            complexd acc{0.0, 0.0};
            for (std::size_t col = 0; col < dim; ++col) {
                const double sign = std::popcount(row & col) % 2 == 0 ? 1.0 : -1.0;
                acc += sign * scale * state[col];
            }
            next[row] = acc;
        }
        for (std::size_t b = 0; b < dim; ++b) {
            state[b] = next[b] * std::polar(1.0, phases[b]);
        }
    }
    return state;
}

// --- small projected-gradient QP oracle ------------------------------------

double qp_oracle_objective(const Eigen::MatrixXd &K, const std::vector<int> &y, double c) {
    const auto n = static_cast<std::size_t>(K.rows());
    Eigen::MatrixXd Q(K.rows(), K.cols());
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            Q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * K(i, j);
        }
    }
    const double lipschitz = Q.cwiseAbs().rowwise().sum().maxCoeff() + 1e-9;
    const double step = 1.0 / lipschitz;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(K.rows());
    Eigen::VectorXd yv(K.rows());
    for (std::size_t i = 0; i < n; ++i) {
        yv(static_cast<Eigen::Index>(i)) = y[i];
    }
    const auto project = [&](Eigen::VectorXd v) {
        // Projection onto {0 <= a <= c, y.a = 0} via bisection on the
        // equality multiplier.
        double lo = -1e6;
        double hi = 1e6;
        for (int iter = 0; iter < 200; ++iter) {
            const double tau = 0.5 * (lo + hi);
            double balance = 0.0;
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                const double a = std::clamp(v(i) - tau * yv(i), 0.0, c);
                balance += yv(i) * a;
            }
            if (balance > 0.0) {
                lo = tau;
            } else {
                hi = tau;
            }
        }
        const double tau = 0.5 * (lo + hi);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = std::clamp(v(i) - tau * yv(i), 0.0, c);
        }
        return v;
    };

    for (int iter = 0; iter < 200000; ++iter) {
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(K.rows()) - Q * alpha;
        const Eigen::VectorXd next = project(alpha + step * grad);
        const double move = (next - alpha).lpNorm<Eigen::Infinity>();
        alpha = next;
        if (move < 1e-12) {
            break;
        }
    }
    return alpha.sum() - 0.5 * alpha.dot(Q * alpha);
}

struct Check {
    const char *name;
    std::function<bool()> run;
};

} // namespace

int run_selfcheck(std::ostream &out) {
    std::vector<Check> checks;

    checks.push_back({"statevector: Hadamard layer is an involution", [] {
        SplitMix64 rng(11);
        Statevector psi = zero_state(3);
        double norm = 0.0;
        for (auto &a : psi.amplitudes) {
            a = {rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)};
            norm += std::norm(a);
        }
        for (auto &a : psi.amplitudes) {
            a /= std::sqrt(norm);
        }
        const Statevector twice = hadamard_all(hadamard_all(psi));
        for (std::size_t b = 0; b < psi.dim(); ++b) {
            if (std::abs(twice.amplitudes[b] - psi.amplitudes[b]) > 1e-12) {
                return false;
            }
        }
        return std::abs(norm_squared(twice) - 1.0) < 1e-12;
    }});

    checks.push_back({"feature maps: dense-matrix circuit oracle (n <= 3)", [] {
        SplitMix64 rng(23);
        for (const FeatureMapKind kind : all_feature_map_kinds()) {
            for (int n = 1; n <= 3; ++n) {
                std::vector<double> x(static_cast<std::size_t>(n));
                for (auto &v : x) {
                    v = rng.next_in(-1.0, 1.0);
                }
                const FeatureMapSpec spec{kind, n, 2};
                const Statevector fast = prepare_state(spec, x);
                const auto expected = oracle_state(kind, x, 2);
                for (std::size_t b = 0; b < fast.dim(); ++b) {
                    if (std::abs(fast.amplitudes[b] - expected[b]) > 1e-12) {
                        return false;
                    }
                }
            }
        }
        return true;
    }});

    checks.push_back({"kernel: self-fidelity and sampled identity", [] {
        const FeatureMapSpec spec{FeatureMapKind::zz, 3, 2};
        const std::vector<double> x{0.3, -0.8, 1.1};
        if (std::abs(kernel_entry(spec, x, x) - 1.0) > 1e-12) {
            return false;
        }
        const double sampled = kernel_entry(spec, x, x, ShotOptions{512, 99});
        return sampled == 1.0;
    }});

    checks.push_back({"svm: SMO matches projected-gradient dual objective", [] {
        SplitMix64 rng(31);
        for (int trial = 0; trial < 3; ++trial) {
            const int n = 6;
            Eigen::MatrixXd B(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    B(i, j) = rng.next_in(-1.0, 1.0);
                }
            }
            GramMatrix K;
            K.entries = B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
            K.symmetric = true;
            std::vector<int> y(n);
            for (int i = 0; i < n; ++i) {
                y[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
            }
            const BinaryModel model = smo_train(K, y, 1.0, 1e-6);
            const double smo_obj = dual_objective(model, K);
            const double pg_obj = qp_oracle_objective(K.entries, y, 1.0);
            if (std::abs(smo_obj - pg_obj) > 1e-4 * std::max(1.0, std::abs(pg_obj))) {
                return false;
            }
            if (kkt_residual(model, K, y) > 1e-6) {
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"psd_clip: 2x2 indefinite matrix", [] {
        GramMatrix K;
        K.entries.resize(2, 2);
        K.entries << 1.0, 1.2, 1.2, 1.0;
        K.symmetric = true;
        const GramMatrix fixed = psd_clip(K);
        return std::abs(fixed.entries(0, 0) - 1.1) < 1e-12 && std::abs(fixed.entries(0, 1) - 1.1) < 1e-12;
    }});

    checks.push_back({"normal quantile: spot values and symmetry", [] {
        if (std::abs(normal_quantile(0.5)) > 1e-12) {
            return false;
        }
        if (std::abs(normal_quantile(0.975) - 1.959964) > 1e-5) {
            return false;
        }
        for (double p : {0.01, 0.2, 0.77, 0.999}) {
            if (std::abs(normal_quantile(p) + normal_quantile(1.0 - p)) > 1e-12) {
                return false;
            }
            if (std::abs(normal_cdf(normal_quantile(p)) - p) > 1e-9) {
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"gini: pure 0, two equal 0.5, three equal 2/3", [] {
        const std::vector<double> pure{7.0};
        const std::vector<double> two{5.0, 5.0};
        const std::vector<double> three{4.0, 4.0, 4.0};
        return gini_impurity(pure) == 0.0 && gini_impurity(two) == 0.5 &&
               std::abs(gini_impurity(three) - 2.0 / 3.0) < 1e-15;
    }});

    checks.push_back({"sampling: seeded frequencies are unbiased near p = 0.5", [] {
        Statevector psi = zero_state(1);
        psi.amplitudes[0] = {std::sqrt(0.5), 0.0};
        psi.amplitudes[1] = {std::sqrt(0.5), 0.0};
        double total = 0.0;
        const int seeds = 64;
        for (int s = 0; s < seeds; ++s) {
            total += sample_zero_frequency(psi, 1024, static_cast<std::uint64_t>(s));
        }
        const double mean = total / seeds;
        return std::abs(mean - 0.5) < 5.0 * std::sqrt(0.25 / 1024.0) / std::sqrt(double(seeds));
    }});

    int failures = 0;
    for (const auto &check : checks) {
        bool ok = false;
        try {
            ok = check.run();
        } catch (const std::exception &e) {
            out << "FAIL  " << check.name << " (exception: " << e.what() << ")\n";
            ++failures;
            continue;
        }
        out << (ok ? "PASS  " : "FAIL  ") << check.name << "\n";
        if (!ok) {
            ++failures;
        }
    }
    return failures;
}

} // namespace qkml
