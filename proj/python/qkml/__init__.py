# Copyright 2026 The qkml developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quantum-kernel machine learning toolkit.

Statevector feature-map simulation, exact and shot-sampled quantum kernel
estimation, SPSA kernel alignment, an SMO-based one-vs-one SVM over
precomputed kernels, the feature-engineering grid (rescalers, tree
importances, PCA/LDA), and the cross-validation experiment harness.
"""

from qkml._core import (  # noqa: F401
    ConfigError,
    ContractError,
    DataError,
    DomainError,
    FormatError,
    __version__,
    classical_gram,
    cross_gram,
    fiducial_state,
    forest_importances,
    gram,
    kernel_entry,
    kernel_entry_lambda,
    lda,
    load_gram,
    mahalanobis_filter,
    normal_quantile,
    ovo_svm_fit_predict,
    pca,
    prepare_state,
    psd_clip,
    rescale_fit_apply,
    run_experiment_json,
    sample_zero_frequency,
    save_gram,
    selfcheck,
    spsa_train,
    tree_importances,
    zero_state,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DataError",
    "DomainError",
    "FormatError",
    "__version__",
    "classical_gram",
    "cross_gram",
    "fiducial_state",
    "forest_importances",
    "gram",
    "kernel_entry",
    "kernel_entry_lambda",
    "lda",
    "load_gram",
    "mahalanobis_filter",
    "normal_quantile",
    "ovo_svm_fit_predict",
    "pca",
    "prepare_state",
    "psd_clip",
    "rescale_fit_apply",
    "run_experiment_json",
    "sample_zero_frequency",
    "save_gram",
    "selfcheck",
    "spsa_train",
    "tree_importances",
    "zero_state",
]
