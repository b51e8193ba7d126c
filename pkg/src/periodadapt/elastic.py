"""Elastic task compression (``Task_compress``), used as a comparison baseline.

Each compressible task gives up utilization in proportion to its elastic
coefficient until the set fits under ``u_d``. A task that would drop below
``c / t_max`` is held at ``t_max`` and the remaining tasks are compressed
again. Hard tasks, fixed-rate soft tasks and tasks without a positive
coefficient keep their nominal period.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .task_model import TaskClass, TaskSet, check

BUDGET_TOL = 1e-9


class ElasticReason(str, enum.Enum):
    OVERCOMPRESSED = "Overcompressed"
    UNBOUNDED_TASK_PRESENT = "UnboundedTaskPresent"


@dataclass(frozen=True)
class ElasticResult:
    feasible: bool
    reason: Optional[ElasticReason] = None
    periods: dict[str, float] = field(default_factory=dict)
    iterations: int = 0

    @property
    def verdict(self) -> str:
        return "Feasible" if self.feasible else f"Infeasible({self.reason.value})"


def task_compress(ts: TaskSet, u_d: float = 1.0) -> ElasticResult:
    check(ts)
    if not (0 < u_d <= 1):
        raise ValueError(f"u_d must lie in (0, 1], got {u_d}")
    if ts.of_class(TaskClass.SOFT_UNBOUNDED):
        return ElasticResult(False, ElasticReason.UNBOUNDED_TASK_PRESENT)
    nominal = ts.nominal_periods()
    if math.fsum(t.c / nominal[t.name] for t in ts) <= u_d:
        return ElasticResult(True, None, nominal, 1)

    elastic = [t for t in ts if t.task_class is TaskClass.SOFT_BOUNDED and (t.elastic_coeff or 0) > 0]
    u_floor = math.fsum(t.c / nominal[t.name] for t in ts if t not in elastic)
    u_floor += math.fsum(t.c / t.t_max for t in elastic)
    if u_floor > u_d + BUDGET_TOL:
        return ElasticResult(False, ElasticReason.OVERCOMPRESSED)

    periods = dict(nominal)
    inelastic_util = math.fsum(t.c / nominal[t.name] for t in ts if t not in elastic)
    compressible = list(elastic)
    iterations = 0
    while True:
        iterations += 1
        e_sum = math.fsum(t.elastic_coeff for t in compressible)
        u_nominal = math.fsum(t.c / t.t0 for t in compressible)
        excess = u_nominal + inelastic_util - u_d
        clamped = []
        for t in compressible:
            u = t.c / t.t0 - excess * t.elastic_coeff / e_sum
            if u < t.c / t.t_max:
                clamped.append(t)
                periods[t.name] = t.t_max
            else:
                periods[t.name] = t.c / u
        if not clamped:
            break
        compressible = [t for t in compressible if t not in clamped]
        inelastic_util += math.fsum(t.c / t.t_max for t in clamped)
        if not compressible:
            break
    return ElasticResult(True, None, {name: periods[name] for name in ts.names}, iterations)
