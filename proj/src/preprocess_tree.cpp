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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "qkml/errors.hpp"
#include "qkml/preprocess.hpp"
#include "qkml/rng.hpp"

namespace qkml {

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double boundary = 0.0; ///< samples with value <= boundary go left
    double weighted_child_gini = std::numeric_limits<double>::infinity();
};

double gini_of_counts(const std::map<int, int> &counts, int total) {
    double acc = 0.0;
    for (const auto &[cls, count] : counts) {
        const double p = static_cast<double>(count) / static_cast<double>(total);
        acc += p * p;
    }
    return 1.0 - acc;
}

class CartBuilder {
  public:
    CartBuilder(const Eigen::MatrixXd &X, const std::vector<int> &y, const TreeConfig &config,
                int max_features, SplitMix64 *feature_rng)
        : X_(X), y_(y), config_(config), max_features_(max_features), feature_rng_(feature_rng),
          importances_(static_cast<std::size_t>(X.cols()), 0.0) {}

    /// Grows the tree on the given sample indices (duplicates allowed for
    /// bootstrap samples) and accumulates impurity decreases.
    void grow(std::vector<int> indices) {
        total_ = static_cast<double>(indices.size());
        build(std::move(indices), 0);
    }

    const std::vector<double> &importances() const { return importances_; }
    bool any_split() const { return any_split_; }

  private:
    void build(std::vector<int> indices, int depth) {
        const int n = static_cast<int>(indices.size());
        std::map<int, int> counts;
        for (int i : indices) {
            counts[y_[static_cast<std::size_t>(i)]] += 1;
        }
        const double node_gini = gini_of_counts(counts, n);
        if (node_gini == 0.0 || n < config_.min_samples_split ||
            (config_.max_depth > 0 && depth >= config_.max_depth)) {
            return;
        }

        const SplitChoice split = find_split(indices, counts, n);
        if (split.feature < 0) {
            return;
        }

        std::vector<int> left;
        std::vector<int> right;
        for (int i : indices) {
            (X_(i, split.feature) <= split.boundary ? left : right).push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        std::map<int, int> left_counts;
        for (int i : left) {
            left_counts[y_[static_cast<std::size_t>(i)]] += 1;
        }
        std::map<int, int> right_counts;
        for (int i : right) {
            right_counts[y_[static_cast<std::size_t>(i)]] += 1;
        }
        const double nl = static_cast<double>(left.size());
        const double nr = static_cast<double>(right.size());
        const double decrease = (static_cast<double>(n) * node_gini -
                                 nl * gini_of_counts(left_counts, static_cast<int>(left.size())) -
                                 nr * gini_of_counts(right_counts, static_cast<int>(right.size()))) /
                                total_;
        importances_[static_cast<std::size_t>(split.feature)] += decrease;
        any_split_ = true;

        build(std::move(left), depth + 1);
        build(std::move(right), depth + 1);
    }

    std::vector<int> candidate_features() const {
        const int d = static_cast<int>(X_.cols());
        if (feature_rng_ == nullptr || max_features_ >= d) {
            std::vector<int> all(static_cast<std::size_t>(d));
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        // Partial Fisher-Yates draw of max_features_ distinct features,
        // reported in ascending order so tie-breaking matches the full scan.
        std::vector<int> pool(static_cast<std::size_t>(d));
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<int> chosen;
        chosen.reserve(static_cast<std::size_t>(max_features_));
        for (int k = 0; k < max_features_; ++k) {
            const auto pick = static_cast<std::size_t>(
                feature_rng_->next_below(static_cast<std::uint64_t>(d - k)));
            chosen.push_back(pool[pick]);
            std::swap(pool[pick], pool[static_cast<std::size_t>(d - k - 1)]);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    SplitChoice find_split(const std::vector<int> &indices, const std::map<int, int> &node_counts,
                           int n) const {
        SplitChoice best;
        std::vector<std::pair<double, int>> ordered(indices.size());
        for (int feature : candidate_features()) {
            for (std::size_t k = 0; k < indices.size(); ++k) {
                ordered[k] = {X_(indices[k], feature), indices[k]};
            }
            std::sort(ordered.begin(), ordered.end());

            std::map<int, int> left_counts;
            double left_sq = 0.0; // sum of squared left counts, updated incrementally
            std::map<int, int> right_counts = node_counts;
            double right_sq = 0.0;
            for (const auto &[cls, count] : right_counts) {
                right_sq += static_cast<double>(count) * count;
            }

            for (int k = 0; k < n - 1; ++k) {
                const int cls = y_[static_cast<std::size_t>(ordered[static_cast<std::size_t>(k)].second)];
                auto &lc = left_counts[cls];
                left_sq += 2.0 * lc + 1.0;
                lc += 1;
                auto &rc = right_counts[cls];
                right_sq -= 2.0 * rc - 1.0;
                rc -= 1;

                const double v_lo = ordered[static_cast<std::size_t>(k)].first;
                const double v_hi = ordered[static_cast<std::size_t>(k + 1)].first;
                if (v_lo == v_hi) {
                    continue;
                }
                const double nl = static_cast<double>(k + 1);
                const double nr = static_cast<double>(n - k - 1);
                const double weighted =
                    (nl * (1.0 - left_sq / (nl * nl)) + nr * (1.0 - right_sq / (nr * nr))) /
                    static_cast<double>(n);
                if (weighted < best.weighted_child_gini - 1e-15) {
                    best.feature = feature;
                    best.threshold = 0.5 * (v_lo + v_hi);
                    best.boundary = v_lo;
                    best.weighted_child_gini = weighted;
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd &X_;
    const std::vector<int> &y_;
    TreeConfig config_;
    int max_features_;
    SplitMix64 *feature_rng_;
    std::vector<double> importances_;
    double total_ = 0.0;
    bool any_split_ = false;
};

void check_labels(const Eigen::MatrixXd &X, const std::vector<int> &y) {
    if (static_cast<Eigen::Index>(y.size()) != X.rows() || X.rows() == 0) {
        throw ContractError("importances: sample and label counts must match");
    }
    const std::set<int> classes(y.begin(), y.end());
    if (classes.size() < 2) {
        throw DataError("importances: at least two classes required");
    }
}

std::vector<double> normalized(const std::vector<double> &raw) {
    double total = 0.0;
    for (double v : raw) {
        total += v;
    }
    std::vector<double> out(raw.size(), 0.0);
    if (total > 0.0) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = raw[i] / total;
        }
    }
    return out;
}

} // namespace

double gini_impurity(std::span<const double> class_counts) {
    double total = 0.0;
    for (double c : class_counts) {
        if (c < 0.0) {
            throw ContractError("gini_impurity: counts must be nonnegative");
        }
        total += c;
    }
    if (total <= 0.0) {
        throw ContractError("gini_impurity: empty count vector");
    }
    double acc = 0.0;
    for (double c : class_counts) {
        const double p = c / total;
        acc += p * p;
    }
    return 1.0 - acc;
}

std::string to_string(ImportanceMethod method) {
    return method == ImportanceMethod::decision_tree ? "decision_tree" : "random_forest";
}

ImportanceReport tree_importances(const Eigen::MatrixXd &X, const std::vector<int> &y,
                                  const TreeConfig &config) {
    check_labels(X, y);
    CartBuilder builder(X, y, config, static_cast<int>(X.cols()), nullptr);
    std::vector<int> all(static_cast<std::size_t>(X.rows()));
    std::iota(all.begin(), all.end(), 0);
    builder.grow(std::move(all));

    ImportanceReport report;
    report.method = ImportanceMethod::decision_tree;
    report.any_split = builder.any_split();
    report.importances = report.any_split ? normalized(builder.importances())
                                          : std::vector<double>(static_cast<std::size_t>(X.cols()), 0.0);
    return report;
}

ImportanceReport forest_importances(const Eigen::MatrixXd &X, const std::vector<int> &y,
                                    const ForestConfig &config) {
    check_labels(X, y);
    if (config.n_trees < 1) {
        throw ConfigError("forest_importances: n_trees must be >= 1");
    }
    const int d = static_cast<int>(X.cols());
    const int max_features =
        config.max_features > 0
            ? std::min(config.max_features, d)
            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    std::vector<double> accumulated(static_cast<std::size_t>(d), 0.0);
    bool any_split = false;
    for (int t = 0; t < config.n_trees; ++t) {
        SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(t), 0x7265));
        std::vector<int> sample(static_cast<std::size_t>(X.rows()));
        if (config.bootstrap) {
            for (auto &idx : sample) {
                idx = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(X.rows())));
            }
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        TreeConfig tree_config;
        tree_config.max_depth = 0;
        tree_config.min_samples_split = 2;
        CartBuilder builder(X, y, tree_config, max_features, max_features < d ? &rng : nullptr);
        builder.grow(std::move(sample));
        if (builder.any_split()) {
            any_split = true;
            const auto tree_scores = normalized(builder.importances());
            for (std::size_t j = 0; j < accumulated.size(); ++j) {
                accumulated[j] += tree_scores[j];
            }
        }
    }

    ImportanceReport report;
    report.method = ImportanceMethod::random_forest;
    report.any_split = any_split;
    report.importances = any_split ? normalized(accumulated)
                                   : std::vector<double>(static_cast<std::size_t>(d), 0.0);
    return report;
}

std::vector<int> select_top_k(const ImportanceReport &report, int k) {
    const int d = static_cast<int>(report.importances.size());
    if (k < 1 || k > d) {
        throw ConfigError("select_top_k: k must lie in [1, " + std::to_string(d) + "], got " +
                          std::to_string(k));
    }
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ia = report.importances[static_cast<std::size_t>(a)];
        const double ib = report.importances[static_cast<std::size_t>(b)];
        if (ia != ib) {
            return ia > ib;
        }
        return a < b;
    });
    std::vector<int> selected(order.begin(), order.begin() + k);
    std::sort(selected.begin(), selected.end());
    return selected;
}

} // namespace qkml
