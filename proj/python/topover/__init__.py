# Copyright 2026 The Topover Authors
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

"""Topological verification of local feature matches."""

from topover._core import (
    FeatureSet,
    TopoverError,
    average_precision,
    load_features,
    map_eval,
    ratio_test_match,
    run_cli,
    save_features,
    spatial_verify,
    synth,
    topo_verify,
)

__all__ = [
    "FeatureSet",
    "TopoverError",
    "average_precision",
    "load_features",
    "map_eval",
    "ratio_test_match",
    "run_cli",
    "save_features",
    "spatial_verify",
    "synth",
    "topo_verify",
]
