# Copyright 2026 The chshauth Authors
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

"""CHSH-game leveled authorization, simulated classically."""

from ._core import (
    DomainError,
    PlanningError,
    acceptance_interval,
    check_no_overlap,
    classical_maximum,
    commit,
    concurrence_of_theta,
    level_table,
    omega_of_concurrence,
    omega_of_theta,
    optimal_win_probability,
    plan,
    run_session,
    simulate,
    win_probability,
)

__all__ = [
    "DomainError",
    "PlanningError",
    "acceptance_interval",
    "check_no_overlap",
    "classical_maximum",
    "commit",
    "concurrence_of_theta",
    "level_table",
    "omega_of_concurrence",
    "omega_of_theta",
    "optimal_win_probability",
    "plan",
    "run_session",
    "simulate",
    "win_probability",
]
