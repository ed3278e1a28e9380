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

#include "qkml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "qkml/errors.hpp"

namespace qkml {

namespace {

void check_vector_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractError("classical_kernel: vector lengths differ");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw ContractError("classical_kernel: non-finite input");
        }
    }
}

double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

void validate_kernel_spec(const ClassicalKernelSpec &spec) {
    if (spec.kind == ClassicalKernelKind::rbf && !(spec.sigma > 0.0)) {
        throw ConfigError("rbf kernel requires sigma > 0");
    }
    if (spec.kind == ClassicalKernelKind::poly) {
        if (spec.b < 1.0 || spec.b != std::floor(spec.b)) {
            throw ConfigError("poly kernel requires an integer degree b >= 1");
        }
    }
}

std::vector<double> eigen_row(const Eigen::MatrixXd &X, Eigen::Index i) {
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        row[static_cast<std::size_t>(j)] = X(i, j);
    }
    return row;
}

/// Platt-style SMO working state over a fixed kernel and +-1 labels.
class SmoSolver {
  public:
    SmoSolver(const GramMatrix &K, const std::vector<int> &labels, double c, double tol)
        : K_(K.entries), y_(labels), c_(c), tol_(tol), n_(static_cast<int>(labels.size())),
          alpha_(labels.size(), 0.0), f_(labels.size(), 0.0) {}

    void solve() {
        // f_ caches the decision value without bias; with alpha = 0 it is 0.
        const long max_passes = std::max<long>(64, 10L * n_);
        long passes = 0;
        bool examine_all = true;
        int num_changed = 0;
        while (num_changed > 0 || examine_all) {
            if (passes++ >= max_passes) {
                throw ConvergenceError("smo_train: no convergence after " + std::to_string(max_passes) +
                                       " passes; max KKT residual " + std::to_string(max_residual()));
            }
            num_changed = 0;
            if (examine_all) {
                for (int i = 0; i < n_; ++i) {
                    num_changed += examine(i);
                }
            } else {
                for (int i = 0; i < n_; ++i) {
                    if (is_free(alpha_[static_cast<std::size_t>(i)])) {
                        num_changed += examine(i);
                    }
                }
            }
            if (examine_all) {
                examine_all = false;
            } else if (num_changed == 0) {
                examine_all = true;
            }
        }
        compute_final_bias();
    }

    BinaryModel model() const {
        BinaryModel m;
        m.bias = bias_;
        m.c = c_;
        for (int i = 0; i < n_; ++i) {
            const double a = alpha_[static_cast<std::size_t>(i)];
            if (a > 0.0) {
                m.support_indices.push_back(i);
                m.alpha_y.push_back(a * y_[static_cast<std::size_t>(i)]);
            }
        }
        return m;
    }

  private:
    bool is_free(double a) const { return a > 0.0 && a < c_; }

    double error(int i) const {
        return f_[static_cast<std::size_t>(i)] + b_working_ - y_[static_cast<std::size_t>(i)];
    }

    int examine(int i2) {
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double alph2 = alpha_[static_cast<std::size_t>(i2)];
        const double e2 = error(i2);
        const double r2 = e2 * y2;
        const bool violates = (r2 < -tol_ && alph2 < c_) || (r2 > tol_ && alph2 > 0.0);
        if (!violates) {
            return 0;
        }
        // Second choice: the free point with maximal |E1 - E2|.
        int best = -1;
        double best_gap = -1.0;
        for (int i = 0; i < n_; ++i) {
            if (!is_free(alpha_[static_cast<std::size_t>(i)])) {
                continue;
            }
            const double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) {
            return 1;
        }
        // Deterministic fallback sweeps; the start offset rotates with the
        // step counter so the same pair is not retried forever.
        for (int k = 0; k < n_; ++k) {
            const int i1 = static_cast<int>((k + steps_) % n_);
            if (is_free(alpha_[static_cast<std::size_t>(i1)]) && take_step(i1, i2)) {
                return 1;
            }
        }
        for (int k = 0; k < n_; ++k) {
            const int i1 = static_cast<int>((k + steps_) % n_);
            if (take_step(i1, i2)) {
                return 1;
            }
        }
        return 0;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) {
            return false;
        }
        const double alph1 = alpha_[static_cast<std::size_t>(i1)];
        const double alph2 = alpha_[static_cast<std::size_t>(i2)];
        const double y1 = y_[static_cast<std::size_t>(i1)];
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double e1 = error(i1);
        const double e2 = error(i2);
        const double s = y1 * y2;

        double lo;
        double hi;
        if (s < 0.0) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c_, c_ + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - c_);
            hi = std::min(c_, alph1 + alph2);
        }
        if (hi - lo < 1e-15) {
            return false;
        }

        const double k11 = K_(i1, i1);
        const double k12 = K_(i1, i2);
        const double k22 = K_(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 1e-15) {
            a2 = alph2 + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // Flat direction: evaluate the (minimization) objective at both
            // clip bounds and move only on a strict improvement.
            const double f1 = y1 * (e1 - b_working_) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 - b_working_) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12) {
                a2 = lo;
            } else if (obj_hi < obj_lo - 1e-12) {
                a2 = hi;
            } else {
                return false;
            }
        }
        if (std::abs(a2 - alph2) < 1e-12 * (a2 + alph2 + 1e-12)) {
            return false;
        }
        double a1 = alph1 + s * (alph2 - a2);
        // a1 may drift marginally outside the box; push it back and absorb
        // the difference into a2 so the equality constraint stays exact.
        if (a1 < 0.0) {
            a2 += s * a1;
            a1 = 0.0;
        } else if (a1 > c_) {
            a2 += s * (a1 - c_);
            a1 = c_;
        }

        const double d1 = (a1 - alph1) * y1;
        const double d2 = (a2 - alph2) * y2;

        // Threshold so that the updated point sits exactly on its margin
        // (f = sum_j alpha_j y_j K + b, E = f - y).
        const double b1 = b_working_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_working_ - e2 - d1 * k12 - d2 * k22;
        if (a1 > 0.0 && a1 < c_) {
            b_working_ = b1;
        } else if (a2 > 0.0 && a2 < c_) {
            b_working_ = b2;
        } else {
            b_working_ = 0.5 * (b1 + b2);
        }

        for (int k = 0; k < n_; ++k) {
            f_[static_cast<std::size_t>(k)] += d1 * K_(i1, k) + d2 * K_(i2, k);
        }
        alpha_[static_cast<std::size_t>(i1)] = a1;
        alpha_[static_cast<std::size_t>(i2)] = a2;
        ++steps_;
        return true;
    }

    void compute_final_bias() {
        double free_sum = 0.0;
        int free_count = 0;
        for (int i = 0; i < n_; ++i) {
            if (is_free(alpha_[static_cast<std::size_t>(i)])) {
                free_sum += y_[static_cast<std::size_t>(i)] - f_[static_cast<std::size_t>(i)];
                ++free_count;
            }
        }
        if (free_count > 0) {
            bias_ = free_sum / free_count;
            return;
        }
        // No free support vectors: any bias between the bound-set margins is
        // optimal; take the midpoint of the feasible interval.
        double up = std::numeric_limits<double>::infinity();
        double lo = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) {
            const double g = y_[static_cast<std::size_t>(i)] - f_[static_cast<std::size_t>(i)];
            const double a = alpha_[static_cast<std::size_t>(i)];
            const bool in_up = (a < c_ && y_[static_cast<std::size_t>(i)] > 0) ||
                               (a > 0.0 && y_[static_cast<std::size_t>(i)] < 0);
            const bool in_lo = (a < c_ && y_[static_cast<std::size_t>(i)] < 0) ||
                               (a > 0.0 && y_[static_cast<std::size_t>(i)] > 0);
            if (in_up) {
                up = std::min(up, g);
            }
            if (in_lo) {
                lo = std::max(lo, g);
            }
        }
        if (std::isfinite(up) && std::isfinite(lo)) {
            bias_ = 0.5 * (up + lo);
        } else if (std::isfinite(up)) {
            bias_ = up;
        } else if (std::isfinite(lo)) {
            bias_ = lo;
        } else {
            bias_ = 0.0;
        }
    }

    double max_residual() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double margin = y_[static_cast<std::size_t>(i)] * (f_[static_cast<std::size_t>(i)] + b_working_);
            const double a = alpha_[static_cast<std::size_t>(i)];
            if (a <= 0.0) {
                worst = std::max(worst, 1.0 - margin);
            } else if (a >= c_) {
                worst = std::max(worst, margin - 1.0);
            } else {
                worst = std::max(worst, std::abs(margin - 1.0));
            }
        }
        return worst;
    }

    const Eigen::MatrixXd &K_;
    std::vector<int> y_;
    double c_;
    double tol_;
    int n_;
    std::vector<double> alpha_;
    std::vector<double> f_;
    double b_working_ = 0.0;
    double bias_ = 0.0;
    std::uint64_t steps_ = 0;
};

} // namespace

ClassicalKernelKind classical_kernel_kind_from_string(std::string_view name) {
    if (name == "linear") return ClassicalKernelKind::linear;
    if (name == "rbf") return ClassicalKernelKind::rbf;
    if (name == "poly") return ClassicalKernelKind::poly;
    if (name == "sigmoid") return ClassicalKernelKind::sigmoid;
    throw ConfigError("unknown classical kernel: '" + std::string(name) + "'");
}

std::string to_string(ClassicalKernelKind kind) {
    switch (kind) {
    case ClassicalKernelKind::linear: return "linear";
    case ClassicalKernelKind::rbf: return "rbf";
    case ClassicalKernelKind::poly: return "poly";
    case ClassicalKernelKind::sigmoid: return "sigmoid";
    }
    throw ConfigError("invalid classical kernel value");
}

ClassicalKernelSpec default_classical_spec(ClassicalKernelKind kind, const Eigen::MatrixXd &X) {
    ClassicalKernelSpec spec;
    spec.kind = kind;
    const double d = static_cast<double>(X.cols());
    switch (kind) {
    case ClassicalKernelKind::rbf: {
        const double mean = X.mean();
        const double var = (X.array() - mean).square().mean();
        spec.sigma = std::sqrt(std::max(d * var / 2.0, 1e-12));
        break;
    }
    case ClassicalKernelKind::poly:
        spec.a = 0.0;
        spec.b = 3.0;
        break;
    case ClassicalKernelKind::sigmoid:
        spec.a = 1.0 / std::max(d, 1.0);
        spec.b = 0.0;
        break;
    case ClassicalKernelKind::linear:
        break;
    }
    return spec;
}

double classical_kernel(const ClassicalKernelSpec &spec, std::span<const double> x, std::span<const double> y) {
    check_vector_pair(x, y);
    validate_kernel_spec(spec);
    switch (spec.kind) {
    case ClassicalKernelKind::linear:
        return dot(x, y);
    case ClassicalKernelKind::rbf: {
        double dist2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            dist2 += d * d;
        }
        return std::exp(-dist2 / (2.0 * spec.sigma * spec.sigma));
    }
    case ClassicalKernelKind::poly:
        return std::pow(dot(x, y) + spec.a, spec.b);
    case ClassicalKernelKind::sigmoid:
        return std::tanh(spec.a * dot(x, y) - spec.b);
    }
    throw ConfigError("invalid classical kernel value");
}

GramMatrix classical_gram(const ClassicalKernelSpec &spec, const Eigen::MatrixXd &X) {
    GramMatrix K;
    K.entries.setZero(X.rows(), X.rows());
    K.symmetric = true;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const auto xi = eigen_row(X, i);
        for (Eigen::Index j = i; j < X.rows(); ++j) {
            const auto xj = eigen_row(X, j);
            const double v = classical_kernel(spec, xi, xj);
            K.entries(i, j) = v;
            K.entries(j, i) = v;
        }
    }
    return K;
}

GramMatrix classical_cross_gram(const ClassicalKernelSpec &spec, const Eigen::MatrixXd &A,
                                const Eigen::MatrixXd &B) {
    if (A.cols() != B.cols()) {
        throw ContractError("classical_cross_gram: feature widths differ");
    }
    GramMatrix K;
    K.entries.setZero(A.rows(), B.rows());
    K.symmetric = false;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const auto ai = eigen_row(A, i);
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            K.entries(i, j) = classical_kernel(spec, ai, eigen_row(B, j));
        }
    }
    return K;
}

BinaryModel smo_train(const GramMatrix &K, const std::vector<int> &labels, double c, double tol) {
    if (K.entries.rows() != K.entries.cols() || !K.symmetric) {
        throw ContractError("smo_train: kernel matrix must be symmetric");
    }
    if (static_cast<Eigen::Index>(labels.size()) != K.entries.rows()) {
        throw ContractError("smo_train: label count does not match kernel size");
    }
    if (!(c > 0.0)) {
        throw ConfigError("smo_train: c must be positive");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (int y : labels) {
        if (y == 1) {
            has_pos = true;
        } else if (y == -1) {
            has_neg = true;
        } else {
            throw ContractError("smo_train: labels must be -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw ContractError("smo_train: both classes must be present");
    }
    SmoSolver solver(K, labels, c, tol);
    solver.solve();
    return solver.model();
}

Decision predict_binary(const BinaryModel &model, std::span<const double> k_row) {
    double value = model.bias;
    for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
        const auto idx = static_cast<std::size_t>(model.support_indices[s]);
        if (idx >= k_row.size()) {
            throw ContractError("predict_binary: kernel row does not cover support index " +
                                std::to_string(model.support_indices[s]));
        }
        value += model.alpha_y[s] * k_row[idx];
    }
    return Decision{value, value >= 0.0 ? 1 : -1};
}

double dual_objective(const BinaryModel &model, const GramMatrix &K) {
    double linear = 0.0;
    for (double ay : model.alpha_y) {
        linear += std::abs(ay);
    }
    double quad = 0.0;
    for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
        for (std::size_t t = 0; t < model.support_indices.size(); ++t) {
            quad += model.alpha_y[s] * model.alpha_y[t] *
                    K.entries(model.support_indices[s], model.support_indices[t]);
        }
    }
    return linear - 0.5 * quad;
}

double kkt_residual(const BinaryModel &model, const GramMatrix &K, const std::vector<int> &labels) {
    const auto n = static_cast<std::size_t>(K.entries.rows());
    std::vector<double> alpha(n, 0.0);
    for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
        alpha[static_cast<std::size_t>(model.support_indices[s])] =
            std::abs(model.alpha_y[s]);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = model.bias;
        for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
            f += model.alpha_y[s] * K.entries(model.support_indices[s], static_cast<Eigen::Index>(i));
        }
        const double margin = labels[i] * f;
        if (alpha[i] <= 0.0) {
            worst = std::max(worst, 1.0 - margin);
        } else if (alpha[i] >= model.c) {
            worst = std::max(worst, margin - 1.0);
        } else {
            worst = std::max(worst, std::abs(margin - 1.0));
        }
    }
    return worst;
}

OvoModel ovo_train(const GramMatrix &K, const std::vector<int> &labels, double c, double tol) {
    if (static_cast<Eigen::Index>(labels.size()) != K.entries.rows()) {
        throw ContractError("ovo_train: label count does not match kernel size");
    }
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) {
        throw ContractError("ovo_train: at least two classes required");
    }
    OvoModel model;
    model.classes.assign(distinct.begin(), distinct.end());

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            OvoModel::PairModel pair;
            pair.class_a = model.classes[a];
            pair.class_b = model.classes[b];
            std::vector<int> sub_labels;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] == pair.class_a || labels[i] == pair.class_b) {
                    pair.sample_indices.push_back(static_cast<int>(i));
                    sub_labels.push_back(labels[i] == pair.class_a ? 1 : -1);
                }
            }
            if (sub_labels.empty()) {
                throw DataError("ovo_train: class pair (" + std::to_string(pair.class_a) + ", " +
                                std::to_string(pair.class_b) + ") has no samples");
            }
            const auto m = static_cast<Eigen::Index>(pair.sample_indices.size());
            GramMatrix sub;
            sub.symmetric = true;
            sub.sampled = K.sampled;
            sub.entries.resize(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    sub.entries(i, j) = K.entries(pair.sample_indices[static_cast<std::size_t>(i)],
                                                  pair.sample_indices[static_cast<std::size_t>(j)]);
                }
            }
            pair.model = smo_train(sub, sub_labels, c, tol);
            model.pairs.push_back(std::move(pair));
        }
    }
    return model;
}

std::vector<int> ovo_predict(const OvoModel &model, const GramMatrix &K_cross) {
    std::vector<int> predictions(static_cast<std::size_t>(K_cross.entries.rows()));
    std::vector<double> k_row;
    for (Eigen::Index r = 0; r < K_cross.entries.rows(); ++r) {
        std::map<int, int> votes;
        std::map<int, double> confidence;
        for (const auto &pair : model.pairs) {
            k_row.resize(pair.sample_indices.size());
            for (std::size_t t = 0; t < pair.sample_indices.size(); ++t) {
                if (pair.sample_indices[t] >= K_cross.entries.cols()) {
                    throw ContractError("ovo_predict: kernel block does not cover training sample " +
                                        std::to_string(pair.sample_indices[t]));
                }
                k_row[t] = K_cross.entries(r, pair.sample_indices[t]);
            }
            const Decision d = predict_binary(pair.model, k_row);
            const int winner = d.label >= 0 ? pair.class_a : pair.class_b;
            votes[winner] += 1;
            confidence[winner] += std::abs(d.value);
        }
        int best_class = model.classes.front();
        int best_votes = -1;
        double best_confidence = -1.0;
        for (int cls : model.classes) {
            const int v = votes.count(cls) ? votes.at(cls) : 0;
            const double conf = confidence.count(cls) ? confidence.at(cls) : 0.0;
            if (v > best_votes || (v == best_votes && conf > best_confidence + 1e-15)) {
                best_class = cls;
                best_votes = v;
                best_confidence = conf;
            }
        }
        predictions[static_cast<std::size_t>(r)] = best_class;
    }
    return predictions;
}

double accuracy(const std::vector<int> &predicted, const std::vector<int> &expected) {
    if (predicted.size() != expected.size() || predicted.empty()) {
        throw ContractError("accuracy: label vectors must match and be nonempty");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == expected[i]) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

} // namespace qkml
