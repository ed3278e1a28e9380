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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qkml {

/**
 * Tabular classification dataset. Labels are integer codes into label_names,
 * which is sorted ascending lexicographically. Missing feature cells are NaN
 * until clean() drops their rows.
 */
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> label_names;
    std::vector<std::string> feature_names;

    Eigen::Index n_samples() const { return features.rows(); }
    Eigen::Index n_features() const { return features.cols(); }
};

/// Parses a header CSV. Every column except the named label column must hold
/// numbers or empty cells (missing); anything else raises FormatError with
/// the row and column. Label values are encoded by ascending lexicographic
/// order.
Dataset load_csv(const std::string &path, const std::string &label_column);

/// Drops rows containing any non-finite feature and, when soma_column names
/// a feature, rows where that feature equals 0. Survivor order is preserved.
Dataset clean(const Dataset &ds, const std::optional<std::string> &soma_column = {});

/// Rows of ds at the given indices, in the given order.
Dataset take_rows(const Dataset &ds, const std::vector<int> &rows);

/// Seeded stratified shuffle split; per-class test counts are within one
/// sample of test_fraction. Throws DataError naming any single-sample class.
std::pair<Dataset, Dataset> train_test_split(const Dataset &ds, double test_fraction, std::uint64_t seed);

/// Caps the dataset at `cap` rows with a seeded stratified subsample
/// (largest-remainder apportionment, at least one row per class).
Dataset stratified_subsample(const Dataset &ds, int cap, std::uint64_t seed);

/// Fold id per sample for stratified k-fold: classes are shuffled per seed
/// and dealt round-robin. Requires folds <= smallest class count.
std::vector<int> stratified_fold_assignment(const std::vector<int> &labels, int folds, std::uint64_t seed);

} // namespace qkml
