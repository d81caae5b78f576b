# Copyright 2026 the retrievalguard authors
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
"""Certified L2 robustness radii for Gaussian-smoothed 1-NN retrieval."""

from ._core import (
    BaseModel,
    CertificationRecord,
    Error,
    certified_radius,
    certify,
    chernoff_epsilon,
    default_radius_grid,
    exact_smooth,
    exact_smooth_sign,
    lipschitz_bound_loose,
    lipschitz_bound_tight,
    margin_lower_bound,
    normal_cdf,
    normal_quantile,
    recall_at_1_curve,
    rejected_ratio,
    run_cli,
    smooth_embed_mc,
)

__all__ = [
    "BaseModel",
    "CertificationRecord",
    "Error",
    "certified_radius",
    "certify",
    "chernoff_epsilon",
    "default_radius_grid",
    "exact_smooth",
    "exact_smooth_sign",
    "lipschitz_bound_loose",
    "lipschitz_bound_tight",
    "margin_lower_bound",
    "normal_cdf",
    "normal_quantile",
    "recall_at_1_curve",
    "rejected_ratio",
    "run_cli",
    "smooth_embed_mc",
]
__version__ = "0.1.0"
