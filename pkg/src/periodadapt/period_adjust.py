"""Weighted period assignment for soft real-time tasks.

Hard tasks and soft tasks that asked for a fixed rate are served first; the
utilization left over under ``u_d`` is split among the adjustable soft tasks in
proportion to their weights, with the weights of fixed-rate soft tasks spread
evenly over the adjustable ones. Bounded tasks whose share would push them past
``t_max`` are pinned at ``t_max``, treated as fixed-rate from then on, and the
assignment is recomputed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .task_model import TaskClass, TaskSet, check

CLAMP_RTOL = 1e-9


class Reason(str, enum.Enum):
    HARD_OVERLOAD = "HardOverload"
    FIXED_OVERLOAD = "FixedOverload"
    NO_ADJUSTABLE_CAPACITY = "NoAdjustableCapacity"


class ClampKind(str, enum.Enum):
    TO_C = "ToC"
    TO_TMIN = "ToTmin"
    TO_TMAX_MIGRATED = "ToTmaxMigrated"


@dataclass(frozen=True)
class Clamp:
    pass_no: int
    task: str
    kind: ClampKind


@dataclass(frozen=True)
class PeriodAssignment:
    feasible: bool
    reason: Optional[Reason] = None
    periods: dict[str, float] = field(default_factory=dict)
    passes: int = 1
    clamp_log: tuple[Clamp, ...] = ()
    achieved_utilization: Optional[float] = None

    @property
    def verdict(self) -> str:
        return "Feasible" if self.feasible else f"Infeasible({self.reason.value})"


def _check_ud(u_d: float) -> None:
    if not (0 < u_d <= 1):
        raise ValueError(f"u_d must lie in (0, 1], got {u_d}")


def period_adjust(ts: TaskSet, u_d: float = 1.0) -> PeriodAssignment:
    check(ts)
    _check_ud(u_d)

    hard = ts.of_class(TaskClass.HARD)
    u_h = math.fsum(t.c / t.fixed_period for t in hard)
    if u_d - u_h <= 0:
        return PeriodAssignment(False, Reason.HARD_OVERLOAD)

    # fixed period per soft-fixed task, grows as bounded tasks migrate in
    fixed = {t.name: t.fixed_period for t in ts.of_class(TaskClass.SOFT_FIXED)}
    clamps: list[Clamp] = []
    passes = 0
    while True:
        passes += 1
        u_sp = math.fsum(ts[name].c / p for name, p in fixed.items())
        u_s = u_d - u_h - u_sp
        if u_s <= 0:
            reason = Reason.FIXED_OVERLOAD if passes == 1 else Reason.NO_ADJUSTABLE_CAPACITY
            return PeriodAssignment(False, reason, passes=passes, clamp_log=tuple(clamps))

        adjustable = [t for t in ts if t.task_class.is_adjustable and t.name not in fixed]
        spread = math.fsum(ts[name].weight for name in fixed) / len(adjustable) if adjustable else 0.0

        periods: dict[str, float] = {}
        migrated = []
        for t in adjustable:
            p = t.c / ((t.weight + spread) * u_s)
            if t.task_class is TaskClass.SOFT_UNBOUNDED:
                if p < t.c:
                    if p < t.c * (1 - CLAMP_RTOL):
                        clamps.append(Clamp(passes, t.name, ClampKind.TO_C))
                    p = t.c
            else:
                floor = t.period_floor
                if p < floor:
                    if p < floor * (1 - CLAMP_RTOL):
                        clamps.append(Clamp(passes, t.name, ClampKind.TO_TMIN))
                    p = floor
                elif p > t.t_max:
                    if p > t.t_max * (1 + CLAMP_RTOL):
                        clamps.append(Clamp(passes, t.name, ClampKind.TO_TMAX_MIGRATED))
                        migrated.append(t.name)
                    p = t.t_max
            periods[t.name] = p

        if not migrated:
            break
        for name in migrated:
            fixed[name] = ts[name].t_max

    out = {}
    for t in ts:
        if t.task_class is TaskClass.HARD:
            out[t.name] = t.fixed_period
        elif t.name in fixed:
            out[t.name] = fixed[t.name]
        else:
            out[t.name] = periods[t.name]
    achieved = math.fsum(t.c / out[t.name] for t in ts)
    return PeriodAssignment(True, None, out, passes, tuple(clamps), achieved)
