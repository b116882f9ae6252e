# Copyright 2026 The bloch_relax Authors
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

"""Controlled relaxation of a qubit under Markovian dissipation."""

import json as _json

from ._core import (
    BlochState,
    Channel,
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    amplitude_damping,
    closed_form_ad,
    closed_form_dp,
    closed_form_pd,
    depolarizing,
    evolve,
    fast_time,
    free_time,
    phase_damping,
    purity,
    purity_speed,
    stall_control,
    target_fixed_point,
    theta_stall,
    time_to_ball,
    trace_distance,
)
from ._core import analytic_report as _analytic_report
from ._core import optimize as _optimize

__version__ = "0.1.0"


def analytic_report(config):
    """Analytic summary for a run configuration (dict), as a dict."""
    return _json.loads(_analytic_report(_json.dumps(config)))


def optimize(channel, s0, eps, m, **kwargs):
    """Best hitting time at control bound m; returns the report as a dict."""
    return _json.loads(_optimize(channel, s0, eps, m, **kwargs))
