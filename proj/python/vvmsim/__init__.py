# Copyright 2026 The vvmsim Authors.
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

"""Python front end of the vvmsim timing model."""

from ._core import (
    AddressError,
    AlignmentError,
    ConfigError,
    ContractViolation,
    IoError,
    SimConfig,
    SimulationAbort,
    context_switch_cycles,
    footprint_pages,
    overhead,
    run,
    run_json,
    split_bursts,
    sweep,
    tick_schedule,
    trace,
)

__all__ = [
    "AddressError",
    "AlignmentError",
    "ConfigError",
    "ContractViolation",
    "IoError",
    "SimConfig",
    "SimulationAbort",
    "context_switch_cycles",
    "footprint_pages",
    "overhead",
    "run",
    "run_json",
    "split_bursts",
    "sweep",
    "tick_schedule",
    "trace",
]
