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
#include <array>
#include <cmath>
#include <limits>

#include "qkml/errors.hpp"
#include "qkml/preprocess.hpp"

namespace qkml {

namespace {

constexpr double kQuantileClip = 1e-7;
constexpr std::size_t kMaxQuantiles = 1000;

constexpr std::array<RescaleMethod, 11> kAllMethods = {
    RescaleMethod::standard,   RescaleMethod::minmax,          RescaleMethod::maxabs,
    RescaleMethod::robust,     RescaleMethod::l2norm,          RescaleMethod::logistic,
    RescaleMethod::lognormal,  RescaleMethod::boxcox,          RescaleMethod::yeojohnson,
    RescaleMethod::quantile_normal, RescaleMethod::quantile_uniform,
};

std::vector<double> column_sorted(const Eigen::MatrixXd &X, Eigen::Index j) {
    std::vector<double> v(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        v[static_cast<std::size_t>(i)] = X(i, j);
    }
    std::sort(v.begin(), v.end());
    return v;
}

/// Empirical quantile of a sorted vector with linear interpolation at
/// position p * (n - 1).
double sorted_quantile(const std::vector<double> &sorted, double p) {
    const std::size_t n = sorted.size();
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= n) {
        return sorted.back();
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double column_mean(const Eigen::MatrixXd &X, Eigen::Index j) { return X.col(j).mean(); }

double column_pop_std(const Eigen::MatrixXd &X, Eigen::Index j) {
    const double mu = column_mean(X, j);
    return std::sqrt((X.col(j).array() - mu).square().mean());
}

void require_strictly_positive(const Eigen::MatrixXd &X, Eigen::Index j, const char *method) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (!(X(i, j) > 0.0)) {
            throw DomainError(std::string(method) + " requires strictly positive data; feature " +
                              std::to_string(j) + " has value " + std::to_string(X(i, j)) + " at row " +
                              std::to_string(i));
        }
    }
}

double pop_variance(const std::vector<double> &v) {
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(v.size());
}

/// Maximizes f on [lo, hi] by golden-section search to the given tolerance.
template <typename F>
double golden_section_max(F &&f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double box_cox_log_likelihood(const std::vector<double> &x, double lambda) {
    std::vector<double> z(x.size());
    double log_sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = box_cox(x[i], lambda);
        log_sum += std::log(x[i]);
    }
    const double var = pop_variance(z);
    if (!(var > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return -0.5 * static_cast<double>(x.size()) * std::log(var) + (lambda - 1.0) * log_sum;
}

double yeo_johnson_log_likelihood(const std::vector<double> &y, double lambda) {
    std::vector<double> z(y.size());
    double log_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = yeo_johnson(y[i], lambda);
        log_sum += (y[i] < 0.0 ? -1.0 : 1.0) * std::log1p(std::abs(y[i]));
    }
    const double var = pop_variance(z);
    if (!(var > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return -0.5 * static_cast<double>(y.size()) * std::log(var) + (lambda - 1.0) * log_sum;
}

bool column_constant(const Eigen::MatrixXd &X, Eigen::Index j) {
    return X.col(j).maxCoeff() == X.col(j).minCoeff();
}

/// Piecewise-linear CDF lookup. Values on a flat run of the quantile grid
/// take the top of the run; combined with the reverse lookup below the pair
/// averages to the run midpoint.
double interp_cdf_forward(double x, const std::vector<double> &q) {
    const double m1 = static_cast<double>(q.size() - 1);
    if (x >= q.back()) {
        return 1.0;
    }
    if (x <= q.front()) {
        return 0.0;
    }
    const auto it = std::upper_bound(q.begin(), q.end(), x);
    const auto hi = static_cast<std::size_t>(it - q.begin());
    const std::size_t lo = hi - 1;
    const double p_lo = static_cast<double>(lo) / m1;
    if (q[hi] == q[lo]) {
        return p_lo;
    }
    return p_lo + (x - q[lo]) / (q[hi] - q[lo]) * (1.0 / m1);
}

double interp_cdf_reverse(double x, const std::vector<double> &q) {
    const double m1 = static_cast<double>(q.size() - 1);
    if (x >= q.back()) {
        return 1.0;
    }
    if (x <= q.front()) {
        return 0.0;
    }
    const auto it = std::lower_bound(q.begin(), q.end(), x);
    const auto at = static_cast<std::size_t>(it - q.begin());
    if (q[at] == x) {
        return static_cast<double>(at) / m1;
    }
    const std::size_t lo = at - 1;
    const double p_lo = static_cast<double>(lo) / m1;
    return p_lo + (x - q[lo]) / (q[at] - q[lo]) * (1.0 / m1);
}

double quantile_cdf(double x, const std::vector<double> &q) {
    if (q.front() == q.back()) {
        return 0.5;
    }
    return 0.5 * (interp_cdf_forward(x, q) + interp_cdf_reverse(x, q));
}

} // namespace

RescaleMethod rescale_method_from_string(std::string_view name) {
    if (name == "StandardScaler") return RescaleMethod::standard;
    if (name == "MinMaxScaler") return RescaleMethod::minmax;
    if (name == "MaxAbsScaler") return RescaleMethod::maxabs;
    if (name == "RobustScaler") return RescaleMethod::robust;
    if (name == "l2norm") return RescaleMethod::l2norm;
    if (name == "logistic") return RescaleMethod::logistic;
    if (name == "lognormal") return RescaleMethod::lognormal;
    if (name == "boxcox") return RescaleMethod::boxcox;
    if (name == "yeojohnson") return RescaleMethod::yeojohnson;
    if (name == "quantile_normal") return RescaleMethod::quantile_normal;
    if (name == "quantile_uniform") return RescaleMethod::quantile_uniform;
    throw ConfigError("unknown rescaling method: '" + std::string(name) + "'");
}

std::string to_string(RescaleMethod method) {
    switch (method) {
    case RescaleMethod::standard: return "StandardScaler";
    case RescaleMethod::minmax: return "MinMaxScaler";
    case RescaleMethod::maxabs: return "MaxAbsScaler";
    case RescaleMethod::robust: return "RobustScaler";
    case RescaleMethod::l2norm: return "l2norm";
    case RescaleMethod::logistic: return "logistic";
    case RescaleMethod::lognormal: return "lognormal";
    case RescaleMethod::boxcox: return "boxcox";
    case RescaleMethod::yeojohnson: return "yeojohnson";
    case RescaleMethod::quantile_normal: return "quantile_normal";
    case RescaleMethod::quantile_uniform: return "quantile_uniform";
    }
    throw ConfigError("invalid rescale method value");
}

std::span<const RescaleMethod> all_rescale_methods() { return kAllMethods; }

double box_cox(double x, double lambda) {
    if (!(x > 0.0)) {
        throw DomainError("box_cox: input must be strictly positive, got " + std::to_string(x));
    }
    if (std::abs(lambda) < 1e-12) {
        return std::log(x);
    }
    return std::expm1(lambda * std::log(x)) / lambda;
}

double yeo_johnson(double y, double lambda) {
    if (y >= 0.0) {
        if (std::abs(lambda) < 1e-12) {
            return std::log1p(y);
        }
        return std::expm1(lambda * std::log1p(y)) / lambda;
    }
    if (std::abs(lambda - 2.0) < 1e-12) {
        return -std::log1p(-y);
    }
    return -std::expm1((2.0 - lambda) * std::log1p(-y)) / (2.0 - lambda);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
    }
    // Wichura's algorithm AS241 (PPND16).
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                 4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                 2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-6) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

RescalerParams fit_rescaler(RescaleMethod method, const Eigen::MatrixXd &X) {
    if (X.rows() < 2) {
        throw ContractError("fit_rescaler: at least two samples required");
    }
    const Eigen::Index d = X.cols();
    RescalerParams params;
    params.method = method;
    params.n_features = d;
    params.degenerate.assign(static_cast<std::size_t>(d), false);

    switch (method) {
    case RescaleMethod::standard:
        params.mean.resize(static_cast<std::size_t>(d));
        params.stddev.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            params.mean[static_cast<std::size_t>(j)] = column_mean(X, j);
            double sd = column_pop_std(X, j);
            if (sd == 0.0) {
                sd = 1.0;
                params.degenerate[static_cast<std::size_t>(j)] = true;
            }
            params.stddev[static_cast<std::size_t>(j)] = sd;
        }
        break;
    case RescaleMethod::minmax:
        params.min.resize(static_cast<std::size_t>(d));
        params.max.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            params.min[static_cast<std::size_t>(j)] = X.col(j).minCoeff();
            params.max[static_cast<std::size_t>(j)] = X.col(j).maxCoeff();
            if (params.min[static_cast<std::size_t>(j)] == params.max[static_cast<std::size_t>(j)]) {
                params.degenerate[static_cast<std::size_t>(j)] = true;
            }
        }
        break;
    case RescaleMethod::maxabs:
        params.max_abs.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            double m = X.col(j).cwiseAbs().maxCoeff();
            if (m == 0.0) {
                m = 1.0;
                params.degenerate[static_cast<std::size_t>(j)] = true;
            }
            params.max_abs[static_cast<std::size_t>(j)] = m;
        }
        break;
    case RescaleMethod::robust:
        params.q1.resize(static_cast<std::size_t>(d));
        params.q3.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto sorted = column_sorted(X, j);
            const double q1 = sorted_quantile(sorted, 0.25);
            const double q3 = sorted_quantile(sorted, 0.75);
            if (!(q3 > q1)) {
                throw DomainError("RobustScaler requires Q3 > Q1; feature " + std::to_string(j) +
                                  " has an empty interquartile range");
            }
            params.q1[static_cast<std::size_t>(j)] = q1;
            params.q3[static_cast<std::size_t>(j)] = q3;
        }
        break;
    case RescaleMethod::l2norm:
    case RescaleMethod::logistic:
        break; // stateless
    case RescaleMethod::lognormal:
        params.log_sigma.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            require_strictly_positive(X, j, "lognormal");
            std::vector<double> logs(static_cast<std::size_t>(X.rows()));
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                logs[static_cast<std::size_t>(i)] = std::log(X(i, j));
            }
            double sigma = std::sqrt(pop_variance(logs));
            if (sigma == 0.0) {
                sigma = 1.0;
                params.degenerate[static_cast<std::size_t>(j)] = true;
            }
            params.log_sigma[static_cast<std::size_t>(j)] = sigma;
        }
        break;
    case RescaleMethod::boxcox:
        params.lambda.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            require_strictly_positive(X, j, "boxcox");
            if (column_constant(X, j)) {
                params.lambda[static_cast<std::size_t>(j)] = 1.0;
                params.degenerate[static_cast<std::size_t>(j)] = true;
                continue;
            }
            std::vector<double> column(static_cast<std::size_t>(X.rows()));
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                column[static_cast<std::size_t>(i)] = X(i, j);
            }
            params.lambda[static_cast<std::size_t>(j)] = golden_section_max(
                [&column](double l) { return box_cox_log_likelihood(column, l); }, -5.0, 5.0, 1e-6);
        }
        break;
    case RescaleMethod::yeojohnson:
        params.lambda.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            if (column_constant(X, j)) {
                params.lambda[static_cast<std::size_t>(j)] = 1.0;
                params.degenerate[static_cast<std::size_t>(j)] = true;
                continue;
            }
            std::vector<double> column(static_cast<std::size_t>(X.rows()));
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                column[static_cast<std::size_t>(i)] = X(i, j);
            }
            params.lambda[static_cast<std::size_t>(j)] = golden_section_max(
                [&column](double l) { return yeo_johnson_log_likelihood(column, l); }, -5.0, 5.0, 1e-6);
        }
        break;
    case RescaleMethod::quantile_normal:
    case RescaleMethod::quantile_uniform: {
        const std::size_t m = std::min<std::size_t>(kMaxQuantiles, static_cast<std::size_t>(X.rows()));
        params.quantiles.resize(static_cast<std::size_t>(d));
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto sorted = column_sorted(X, j);
            auto &grid = params.quantiles[static_cast<std::size_t>(j)];
            grid.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                grid[k] = sorted_quantile(sorted, static_cast<double>(k) / static_cast<double>(m - 1));
            }
        }
        break;
    }
    }
    return params;
}

Eigen::MatrixXd apply_rescaler(const RescalerParams &params, const Eigen::MatrixXd &X) {
    const bool stateless =
        params.method == RescaleMethod::l2norm || params.method == RescaleMethod::logistic;
    if (!stateless && X.cols() != params.n_features) {
        throw ContractError("apply_rescaler: fitted on " + std::to_string(params.n_features) +
                            " features, given " + std::to_string(X.cols()));
    }
    Eigen::MatrixXd out(X.rows(), X.cols());
    switch (params.method) {
    case RescaleMethod::standard:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            out.col(j) = (X.col(j).array() - params.mean[static_cast<std::size_t>(j)]) /
                         params.stddev[static_cast<std::size_t>(j)];
        }
        break;
    case RescaleMethod::minmax:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double lo = params.min[static_cast<std::size_t>(j)];
            const double hi = params.max[static_cast<std::size_t>(j)];
            const double scale = params.degenerate[static_cast<std::size_t>(j)] ? 1.0 : hi - lo;
            out.col(j) = (X.col(j).array() - lo) / scale;
        }
        break;
    case RescaleMethod::maxabs:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            out.col(j) = X.col(j).array() / params.max_abs[static_cast<std::size_t>(j)];
        }
        break;
    case RescaleMethod::robust:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double q1 = params.q1[static_cast<std::size_t>(j)];
            const double q3 = params.q3[static_cast<std::size_t>(j)];
            out.col(j) = (X.col(j).array() - q1) / (q3 - q1);
        }
        break;
    case RescaleMethod::l2norm:
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double norm = X.row(i).norm();
            out.row(i) = norm > 0.0 ? (X.row(i) / norm).eval() : X.row(i);
        }
        break;
    case RescaleMethod::logistic:
        out = (1.0 / (1.0 + (-X.array()).exp())).matrix();
        break;
    case RescaleMethod::lognormal:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                const double x = X(i, j);
                if (!(x > 0.0)) {
                    throw DomainError("lognormal transform of non-positive value at feature " +
                                      std::to_string(j));
                }
                out(i, j) = normal_cdf(std::log(x) / params.log_sigma[static_cast<std::size_t>(j)]);
            }
        }
        break;
    case RescaleMethod::boxcox:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                out(i, j) = box_cox(X(i, j), params.lambda[static_cast<std::size_t>(j)]);
            }
        }
        break;
    case RescaleMethod::yeojohnson:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                out(i, j) = yeo_johnson(X(i, j), params.lambda[static_cast<std::size_t>(j)]);
            }
        }
        break;
    case RescaleMethod::quantile_normal:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const auto &grid = params.quantiles[static_cast<std::size_t>(j)];
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                const double p = std::clamp(quantile_cdf(X(i, j), grid), kQuantileClip, 1.0 - kQuantileClip);
                out(i, j) = normal_quantile(p);
            }
        }
        break;
    case RescaleMethod::quantile_uniform:
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const auto &grid = params.quantiles[static_cast<std::size_t>(j)];
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                out(i, j) = quantile_cdf(X(i, j), grid);
            }
        }
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Incomplete gamma, chi-square quantile, Mahalanobis filter
// ---------------------------------------------------------------------------

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 500; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 500; ++k) {
        const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw DomainError("gamma_p: requires a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return gamma_p_series(a, x);
    }
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_quantile(double p, double dof) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw DomainError("chi_square_quantile: p must lie in (0, 1)");
    }
    if (!(dof > 0.0)) {
        throw DomainError("chi_square_quantile: dof must be positive");
    }
    const double a = 0.5 * dof;
    double lo = 0.0;
    double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
    while (gamma_p(a, 0.5 * hi) < p) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw NumericError("chi_square_quantile: bracket expansion failed");
        }
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_p(a, 0.5 * mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12 * (1.0 + hi)) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

MahalanobisResult mahalanobis_filter(const Eigen::MatrixXd &X, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ConfigError("mahalanobis_filter: alpha must lie in (0, 1)");
    }
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n <= d) {
        throw ContractError("mahalanobis_filter: need more samples than features");
    }
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    const double ridge = 1e-6 * cov.trace() / static_cast<double>(d);
    if (!(ridge > 0.0)) {
        throw NumericError("mahalanobis_filter: covariance has zero trace");
    }
    cov += ridge * Eigen::MatrixXd::Identity(d, d);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("mahalanobis_filter: covariance is singular after regularization");
    }

    MahalanobisResult result;
    result.squared_distances.resize(n);
    result.threshold = chi_square_quantile(alpha, static_cast<double>(d));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd diff = centered.row(i).transpose();
        const double d2 = diff.dot(ldlt.solve(diff));
        result.squared_distances(i) = d2;
        if (d2 <= result.threshold) {
            result.kept_indices.push_back(static_cast<int>(i));
        }
    }
    return result;
}

} // namespace qkml
