# Copyright 2026 The DGREC Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Decentralized private recommender simulator.

Python surface over the C++ core: the secure gradient-sharing codec
(clip / encode / decode), closed-form privacy budgets, communication-cost
formulas, ranking metrics, hypergraph adjacency, synthetic datasets and
the full experiment driver.
"""

from dgrec._core import (
    __version__,
    clip,
    encode,
    decode,
    rdp_epsilon,
    compose_to_dp,
    two_point_renyi_divergence,
    communication_cost,
    normalized_adjacency,
    recall_at_k,
    ndcg_at_k,
    synth_dataset,
    run_experiment,
)

__all__ = [
    "__version__",
    "clip",
    "encode",
    "decode",
    "rdp_epsilon",
    "compose_to_dp",
    "two_point_renyi_divergence",
    "communication_cost",
    "normalized_adjacency",
    "recall_at_k",
    "ndcg_at_k",
    "synth_dataset",
    "run_experiment",
]
