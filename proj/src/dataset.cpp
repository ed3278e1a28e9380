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

#include "qkml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "qkml/errors.hpp"
#include "qkml/rng.hpp"

namespace qkml {

namespace {

/// RFC4180-style line split: quoted fields may contain commas and doubled
/// quotes. Trailing \r from Windows line endings is stripped by the caller.
std::vector<std::string> split_csv_line(const std::string &line, std::size_t line_number) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) {
        throw FormatError("csv: unterminated quote on line " + std::to_string(line_number));
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<int> class_indices(const std::vector<int> &labels, int cls) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == cls) {
            rows.push_back(static_cast<int>(i));
        }
    }
    return rows;
}

std::map<int, std::vector<int>> rows_by_class(const std::vector<int> &labels) {
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<int>(i));
    }
    return by_class;
}

} // namespace

Dataset load_csv(const std::string &path, const std::string &label_column) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("load_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("load_csv: '" + path + "' is empty (no header row)");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const std::vector<std::string> header = split_csv_line(line, 1);
    std::size_t label_index = header.size();
    std::vector<std::string> feature_names;
    std::vector<std::size_t> feature_columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == label_column) {
            label_index = c;
        } else {
            feature_names.push_back(name);
            feature_columns.push_back(c);
        }
    }
    if (label_index == header.size()) {
        throw FormatError("load_csv: label column '" + label_column + "' not found in header");
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split_csv_line(line, line_number);
        if (cells.size() != header.size()) {
            throw FormatError("load_csv: line " + std::to_string(line_number) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        }
        const std::string label = trim(cells[label_index]);
        if (label.empty()) {
            throw FormatError("load_csv: empty label cell on line " + std::to_string(line_number));
        }
        raw_labels.push_back(label);

        std::vector<double> row(feature_columns.size());
        for (std::size_t f = 0; f < feature_columns.size(); ++f) {
            const std::string cell = trim(cells[feature_columns[f]]);
            if (cell.empty()) {
                row[f] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &consumed);
            } catch (const std::exception &) {
                consumed = 0;
            }
            if (consumed != cell.size()) {
                throw FormatError("load_csv: non-numeric value '" + cell + "' at line " +
                                  std::to_string(line_number) + ", column '" + feature_names[f] + "'");
            }
            row[f] = value;
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::string> names = raw_labels;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    Dataset ds;
    ds.feature_names = std::move(feature_names);
    ds.label_names = names;
    ds.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        const auto it = std::lower_bound(names.begin(), names.end(), raw_labels[i]);
        ds.labels[i] = static_cast<int>(it - names.begin());
    }
    ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(ds.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return ds;
}

Dataset clean(const Dataset &ds, const std::optional<std::string> &soma_column) {
    Eigen::Index soma = -1;
    if (soma_column.has_value()) {
        for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
            if (ds.feature_names[j] == *soma_column) {
                soma = static_cast<Eigen::Index>(j);
                break;
            }
        }
        if (soma < 0) {
            throw ConfigError("clean: soma column '" + *soma_column + "' not found");
        }
    }
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
        bool ok = true;
        for (Eigen::Index j = 0; j < ds.n_features(); ++j) {
            if (!std::isfinite(ds.features(i, j))) {
                ok = false;
                break;
            }
        }
        if (ok && soma >= 0 && ds.features(i, soma) == 0.0) {
            ok = false;
        }
        if (ok) {
            kept.push_back(static_cast<int>(i));
        }
    }
    return take_rows(ds, kept);
}

Dataset take_rows(const Dataset &ds, const std::vector<int> &rows) {
    Dataset out;
    out.label_names = ds.label_names;
    out.feature_names = ds.feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.n_features());
    out.labels.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.features.row(static_cast<Eigen::Index>(k)) = ds.features.row(rows[k]);
        out.labels[k] = ds.labels[static_cast<std::size_t>(rows[k])];
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset &ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw ConfigError("train_test_split: test_fraction must lie in (0, 1)");
    }
    std::vector<int> train_rows;
    std::vector<int> test_rows;
    for (const auto &[cls, rows] : rows_by_class(ds.labels)) {
        if (rows.size() < 2) {
            throw DataError("train_test_split: class '" +
                            ds.label_names[static_cast<std::size_t>(cls)] + "' has fewer than 2 samples");
        }
        std::vector<int> shuffled = rows;
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(cls), 0x5753));
        shuffle(shuffled, rng);
        auto n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(rows.size())));
        n_test = std::min(n_test, rows.size() - 1);
        test_rows.insert(test_rows.end(), shuffled.begin(), shuffled.begin() + static_cast<long>(n_test));
        train_rows.insert(train_rows.end(), shuffled.begin() + static_cast<long>(n_test), shuffled.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {take_rows(ds, train_rows), take_rows(ds, test_rows)};
}

Dataset stratified_subsample(const Dataset &ds, int cap, std::uint64_t seed) {
    if (cap < 1) {
        throw ConfigError("stratified_subsample: cap must be >= 1");
    }
    const auto n = static_cast<int>(ds.n_samples());
    if (cap >= n) {
        return ds;
    }
    const auto by_class = rows_by_class(ds.labels);
    if (static_cast<int>(by_class.size()) > cap) {
        throw DataError("stratified_subsample: cap " + std::to_string(cap) +
                        " is below the class count " + std::to_string(by_class.size()));
    }
    // Largest-remainder apportionment with a floor of one row per class.
    std::vector<int> classes;
    std::vector<int> quota;
    std::vector<double> remainder;
    int assigned = 0;
    for (const auto &[cls, rows] : by_class) {
        const double share =
            static_cast<double>(cap) * static_cast<double>(rows.size()) / static_cast<double>(n);
        int q = std::max(1, static_cast<int>(std::floor(share)));
        q = std::min<int>(q, static_cast<int>(rows.size()));
        classes.push_back(cls);
        quota.push_back(q);
        remainder.push_back(share - std::floor(share));
        assigned += q;
    }
    std::vector<std::size_t> order(classes.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t pos = 0; assigned < cap; pos = (pos + 1) % order.size()) {
        const std::size_t c = order[pos];
        const auto available = static_cast<int>(by_class.at(classes[c]).size());
        if (quota[c] < available) {
            quota[c] += 1;
            assigned += 1;
        } else {
            bool room = false;
            for (std::size_t i = 0; i < classes.size(); ++i) {
                if (quota[i] < static_cast<int>(by_class.at(classes[i]).size())) {
                    room = true;
                    break;
                }
            }
            if (!room) {
                break;
            }
        }
    }
    while (assigned > cap) {
        // Floors can overshoot tiny caps; trim from the largest quota.
        const auto widest = static_cast<std::size_t>(
            std::max_element(quota.begin(), quota.end()) - quota.begin());
        if (quota[widest] <= 1) {
            break;
        }
        quota[widest] -= 1;
        assigned -= 1;
    }

    std::vector<int> picked;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<int> shuffled = by_class.at(classes[c]);
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(classes[c]), 0x5542));
        shuffle(shuffled, rng);
        picked.insert(picked.end(), shuffled.begin(), shuffled.begin() + quota[c]);
    }
    std::sort(picked.begin(), picked.end());
    return take_rows(ds, picked);
}

std::vector<int> stratified_fold_assignment(const std::vector<int> &labels, int folds, std::uint64_t seed) {
    if (folds < 2) {
        throw ConfigError("stratified_fold_assignment: folds must be >= 2");
    }
    std::vector<int> assignment(labels.size(), -1);
    for (const auto &[cls, rows] : rows_by_class(labels)) {
        if (static_cast<int>(rows.size()) < folds) {
            throw DataError("stratified_fold_assignment: class " + std::to_string(cls) + " has " +
                            std::to_string(rows.size()) + " samples for " + std::to_string(folds) +
                            " folds");
        }
        std::vector<int> shuffled = rows;
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(cls), 0x4B46));
        shuffle(shuffled, rng);
        for (std::size_t k = 0; k < shuffled.size(); ++k) {
            assignment[static_cast<std::size_t>(shuffled[k])] = static_cast<int>(k % static_cast<std::size_t>(folds));
        }
    }
    return assignment;
}

} // namespace qkml
