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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkml/dataset.hpp"
#include "qkml/errors.hpp"
#include "qkml/experiment.hpp"
#include "qkml/preprocess.hpp"
#include "qkml/qka.hpp"
#include "qkml/qkernel.hpp"
#include "qkml/selfcheck.hpp"
#include "qkml/svm.hpp"

#include <cmath>
#include <sstream>

namespace py = pybind11;

namespace {

qkml::KernelMode mode_from_args(std::optional<std::int64_t> shots, std::uint64_t seed) {
    if (!shots.has_value()) {
        return std::nullopt;
    }
    return qkml::ShotOptions{*shots, seed};
}

qkml::FeatureMapSpec make_spec(const std::string &kind, int n_qubits, int reps) {
    qkml::FeatureMapSpec spec{qkml::feature_map_kind_from_string(kind), n_qubits, reps};
    qkml::validate(spec);
    return spec;
}

py::dict gram_to_dict(const qkml::GramMatrix &K) {
    py::dict out;
    out["entries"] = K.entries;
    out["symmetric"] = K.symmetric;
    out["sampled"] = K.sampled;
    out["shots"] = K.shots;
    out["seed"] = K.seed;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantum-kernel machine learning core (statevector feature maps, kernel "
              "estimation, SVM, preprocessing, experiment harness)";

    py::register_exception<qkml::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<qkml::ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<qkml::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<qkml::DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<qkml::FormatError>(m, "FormatError", PyExc_ValueError);

    // --- statevector engine -------------------------------------------------
    m.def(
        "zero_state",
        [](int n_qubits) { return qkml::zero_state(n_qubits).amplitudes; },
        py::arg("n_qubits"), "amplitudes of |0...0>");
    m.def(
        "prepare_state",
        [](const std::string &kind, const std::vector<double> &x, int reps) {
            const auto spec = make_spec(kind, static_cast<int>(x.size()), reps);
            return qkml::prepare_state(spec, x).amplitudes;
        },
        py::arg("kind"), py::arg("x"), py::arg("reps") = 2,
        "encoded feature-state amplitudes for a data vector");
    m.def(
        "sample_zero_frequency",
        [](const std::vector<std::complex<double>> &amplitudes, std::int64_t shots, std::uint64_t seed) {
            const int n = static_cast<int>(std::round(std::log2(double(amplitudes.size()))));
            return qkml::sample_zero_frequency(qkml::statevector_from_amplitudes(n, amplitudes), shots,
                                               seed);
        },
        py::arg("amplitudes"), py::arg("shots"), py::arg("seed"));

    // --- quantum kernels ----------------------------------------------------
    m.def(
        "kernel_entry",
        [](const std::string &kind, const std::vector<double> &x, const std::vector<double> &y, int reps,
           std::optional<std::int64_t> shots, std::uint64_t seed) {
            const auto spec = make_spec(kind, static_cast<int>(x.size()), reps);
            return qkml::kernel_entry(spec, x, y, mode_from_args(shots, seed));
        },
        py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("reps") = 2,
        py::arg("shots") = std::nullopt, py::arg("seed") = 0);
    m.def(
        "gram",
        [](const std::string &kind, const Eigen::MatrixXd &X, int reps,
           std::optional<std::int64_t> shots, std::uint64_t seed) {
            const auto spec = make_spec(kind, static_cast<int>(X.cols()), reps);
            return qkml::gram(spec, X, mode_from_args(shots, seed)).entries;
        },
        py::arg("kind"), py::arg("X"), py::arg("reps") = 2, py::arg("shots") = std::nullopt,
        py::arg("seed") = 0, "symmetric quantum kernel matrix over the rows of X");
    m.def(
        "cross_gram",
        [](const std::string &kind, const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, int reps,
           std::optional<std::int64_t> shots, std::uint64_t seed) {
            const auto spec = make_spec(kind, static_cast<int>(A.cols()), reps);
            return qkml::cross_gram(spec, A, B, mode_from_args(shots, seed)).entries;
        },
        py::arg("kind"), py::arg("A"), py::arg("B"), py::arg("reps") = 2,
        py::arg("shots") = std::nullopt, py::arg("seed") = 0);
    m.def(
        "psd_clip",
        [](const Eigen::MatrixXd &entries) {
            qkml::GramMatrix K;
            K.entries = entries;
            K.symmetric = true;
            return qkml::psd_clip(K).entries;
        },
        py::arg("entries"), "nearest-PSD repair by eigenvalue clipping");
    m.def("save_gram",
          [](const Eigen::MatrixXd &entries, bool sampled, std::int64_t shots, std::uint64_t seed,
             const std::string &path) {
              qkml::GramMatrix K;
              K.entries = entries;
              K.symmetric = entries.rows() == entries.cols();
              K.sampled = sampled;
              K.shots = shots;
              K.seed = seed;
              qkml::save_gram(K, path);
          },
          py::arg("entries"), py::arg("sampled"), py::arg("shots"), py::arg("seed"), py::arg("path"));
    m.def("load_gram", [](const std::string &path) { return gram_to_dict(qkml::load_gram(path)); },
          py::arg("path"));

    // --- trained (covariant) kernels -----------------------------------------
    m.def(
        "fiducial_state",
        [](const std::vector<double> &lambda) {
            return qkml::fiducial_state(lambda, static_cast<int>(lambda.size())).amplitudes;
        },
        py::arg("lambda_"));
    m.def(
        "kernel_entry_lambda",
        [](const std::string &kind, const std::vector<double> &lambda, const std::vector<double> &x,
           const std::vector<double> &y, int reps) {
            const qkml::CovariantKernelSpec spec{make_spec(kind, static_cast<int>(x.size()), reps)};
            return qkml::kernel_entry_lambda(spec, lambda, x, y);
        },
        py::arg("kind"), py::arg("lambda_"), py::arg("x"), py::arg("y"), py::arg("reps") = 2);
    m.def(
        "spsa_train",
        [](const std::string &kind, const Eigen::MatrixXd &X, const std::vector<int> &labels, int reps,
           int max_iterations, double learning_rate, double perturbation, double svm_c,
           std::uint64_t seed) {
            const qkml::CovariantKernelSpec spec{make_spec(kind, static_cast<int>(X.cols()), reps)};
            qkml::QkaConfig config{max_iterations, learning_rate, perturbation, svm_c, seed};
            const qkml::QkaResult result = qkml::spsa_train(spec, X, labels, config);
            py::dict out;
            out["lambda_star"] = result.lambda_star;
            out["loss_history"] = result.loss_history;
            out["initial_loss"] = result.initial_loss;
            return out;
        },
        py::arg("kind"), py::arg("X"), py::arg("labels"), py::arg("reps") = 2,
        py::arg("max_iterations") = 10, py::arg("learning_rate") = 0.05,
        py::arg("perturbation") = 0.05, py::arg("svm_c") = 1.0, py::arg("seed") = 0,
        "align the fiducial layer by SPSA; labels must be -1/+1");

    // --- classical SVM --------------------------------------------------------
    m.def(
        "classical_gram",
        [](const std::string &kind, const Eigen::MatrixXd &X) {
            return qkml::classical_gram(
                       qkml::default_classical_spec(qkml::classical_kernel_kind_from_string(kind), X), X)
                .entries;
        },
        py::arg("kind"), py::arg("X"));
    m.def(
        "ovo_svm_fit_predict",
        [](const Eigen::MatrixXd &K_train, const std::vector<int> &labels,
           const Eigen::MatrixXd &K_cross, double c) {
            qkml::GramMatrix K;
            K.entries = K_train;
            K.symmetric = true;
            const qkml::OvoModel model = qkml::ovo_train(K, labels, c);
            qkml::GramMatrix Kx;
            Kx.entries = K_cross;
            return qkml::ovo_predict(model, Kx);
        },
        py::arg("K_train"), py::arg("labels"), py::arg("K_cross"), py::arg("c") = 1.0,
        "train a one-vs-one SVM on a precomputed kernel and predict from the cross block");

    // --- preprocessing ---------------------------------------------------------
    m.def(
        "rescale_fit_apply",
        [](const std::string &method, const Eigen::MatrixXd &fit, const Eigen::MatrixXd &apply) {
            const auto params = qkml::fit_rescaler(qkml::rescale_method_from_string(method), fit);
            return qkml::apply_rescaler(params, apply);
        },
        py::arg("method"), py::arg("fit"), py::arg("apply"),
        "fit a rescaler on one matrix and apply it to another");
    m.def("normal_quantile", &qkml::normal_quantile, py::arg("p"));
    m.def(
        "mahalanobis_filter",
        [](const Eigen::MatrixXd &X, double alpha) {
            const auto result = qkml::mahalanobis_filter(X, alpha);
            py::dict out;
            out["kept_indices"] = result.kept_indices;
            out["squared_distances"] = result.squared_distances;
            out["threshold"] = result.threshold;
            return out;
        },
        py::arg("X"), py::arg("alpha") = 0.975);
    m.def(
        "tree_importances",
        [](const Eigen::MatrixXd &X, const std::vector<int> &y, std::uint64_t seed) {
            qkml::TreeConfig config;
            config.seed = seed;
            return qkml::tree_importances(X, y, config).importances;
        },
        py::arg("X"), py::arg("y"), py::arg("seed") = 0);
    m.def(
        "forest_importances",
        [](const Eigen::MatrixXd &X, const std::vector<int> &y, int n_trees, std::uint64_t seed) {
            qkml::ForestConfig config;
            config.n_trees = n_trees;
            config.seed = seed;
            return qkml::forest_importances(X, y, config).importances;
        },
        py::arg("X"), py::arg("y"), py::arg("n_trees") = 100, py::arg("seed") = 0);
    m.def(
        "pca",
        [](const Eigen::MatrixXd &X, int m) {
            const auto result = qkml::pca(X, m);
            py::dict out;
            out["projected"] = result.projected;
            out["components"] = result.components;
            out["explained_variance"] = result.explained_variance;
            return out;
        },
        py::arg("X"), py::arg("m"));
    m.def(
        "lda",
        [](const Eigen::MatrixXd &X, const std::vector<int> &y, int m) {
            const auto result = qkml::lda(X, y, m);
            py::dict out;
            out["projected"] = result.projected;
            out["directions"] = result.directions;
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("m"));

    // --- experiment harness ------------------------------------------------------
    m.def(
        "run_experiment_json",
        [](const std::string &config_json) {
            return qkml::report_to_json(qkml::run_experiment(qkml::experiment_config_from_json(config_json)));
        },
        py::arg("config_json"), "run one experiment from a JSON config string; returns the JSON report");
    m.def(
        "selfcheck",
        []() {
            std::ostringstream out;
            const int failures = qkml::run_selfcheck(out);
            return py::make_tuple(failures, out.str());
        },
        "run the built-in oracle suite; returns (failures, output)");

    m.attr("__version__") = qkml::version();
}
