"""Periodic task and task-set types plus basic utilization arithmetic.

Times are milliseconds (floats). A missing ``t_min``/``t_max`` means the task
has no bound on that side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

WEIGHT_SUM_TOL = 1e-9


class TaskClass(str, enum.Enum):
    HARD = "hard"
    SOFT_FIXED = "soft-fixed"
    SOFT_BOUNDED = "soft-bounded"
    SOFT_UNBOUNDED = "soft-unbounded"

    @property
    def is_soft(self) -> bool:
        return self is not TaskClass.HARD

    @property
    def is_adjustable(self) -> bool:
        return self in (TaskClass.SOFT_BOUNDED, TaskClass.SOFT_UNBOUNDED)


@dataclass(frozen=True)
class Task:
    """One periodic task.

    ``fixed_period`` is the period used for hard tasks and for soft tasks that
    requested a fixed rate; adjustable tasks ignore it.
    """

    name: str
    c: float
    t0: float
    task_class: TaskClass = TaskClass.SOFT_UNBOUNDED
    weight: float = 1.0
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    fixed_period: Optional[float] = None
    elastic_coeff: Optional[float] = None

    @property
    def nominal_period(self) -> float:
        """Period the task runs at when no adaptation is needed."""
        if self.task_class in (TaskClass.HARD, TaskClass.SOFT_FIXED):
            return self.fixed_period
        return self.t0

    @property
    def period_floor(self) -> float:
        """Shortest admissible period: ``t_min`` when set, never below ``c``."""
        return self.c if self.t_min is None else max(self.t_min, self.c)

    def with_fixed_period(self, period: float) -> "Task":
        return replace(self, task_class=TaskClass.SOFT_FIXED, fixed_period=period)

    def scaled(self, k: float) -> "Task":
        def mul(x):
            return None if x is None else x * k

        return replace(
            self,
            c=self.c * k,
            t0=self.t0 * k,
            t_min=mul(self.t_min),
            t_max=mul(self.t_max),
            fixed_period=mul(self.fixed_period),
        )


def task_violations(task: Task) -> list[str]:
    """Return every invariant the task breaks, each prefixed by its name."""
    out = []
    n = task.name
    if not (task.c > 0):
        out.append(f"{n}: c must be > 0")
    if not (task.t0 > 0):
        out.append(f"{n}: t0 must be > 0")
    elif task.c > 0 and task.t0 < task.c:
        out.append(f"{n}: t0 < c")
    for label, value in (("t_min", task.t_min), ("t_max", task.t_max),
                         ("fixed_period", task.fixed_period)):
        if value is not None and not (value > 0 and math.isfinite(value)):
            out.append(f"{n}: {label} must be a positive finite number")
    if task.elastic_coeff is not None and not (task.elastic_coeff >= 0):
        out.append(f"{n}: elastic_coeff must be >= 0")

    cls = task.task_class
    if cls is TaskClass.SOFT_BOUNDED:
        if task.t_min is None or task.t_max is None:
            out.append(f"{n}: bounded task needs both t_min and t_max")
        else:
            if task.t_min > task.t_max:
                out.append(f"{n}: t_min > t_max")
            if not (task.t_min <= task.t0 <= task.t_max):
                out.append(f"{n}: t0 outside [t_min, t_max]")
    elif cls is TaskClass.SOFT_UNBOUNDED:
        if task.t_min is not None or task.t_max is not None:
            out.append(f"{n}: unbounded task must not carry t_min/t_max")
    else:
        if task.fixed_period is None:
            out.append(f"{n}: {cls.value} task needs fixed_period")
        elif task.fixed_period < task.c:
            out.append(f"{n}: fixed_period < c")
    if cls is TaskClass.HARD:
        if task.fixed_period is not None and task.fixed_period != task.t0:
            out.append(f"{n}: hard task fixed_period must equal t0")
        if task.weight != 1:
            out.append(f"{n}: hard task weight must be 1")
    elif not (0 <= task.weight <= 1):
        out.append(f"{n}: weight must lie in [0, 1]")
    elif cls.is_adjustable and task.weight <= 0:
        out.append(f"{n}: adjustable task weight must be > 0")
    return out


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[Task, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self) -> int:
        return len(self.tasks)

    def __getitem__(self, name: str) -> Task:
        for t in self.tasks:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.tasks]

    def of_class(self, *classes: TaskClass) -> list[Task]:
        return [t for t in self.tasks if t.task_class in classes]

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def n_h(self) -> int:
        return len(self.of_class(TaskClass.HARD))

    @property
    def n_sp(self) -> int:
        return len(self.of_class(TaskClass.SOFT_FIXED))

    @property
    def n_adjustable(self) -> int:
        return self.n - self.n_h - self.n_sp

    def soft_weight_sum(self) -> float:
        return math.fsum(t.weight for t in self.tasks if t.task_class.is_soft)

    def nominal_periods(self) -> dict[str, float]:
        return {t.name: t.nominal_period for t in self.tasks}

    def replace_task(self, task: Task) -> "TaskSet":
        return TaskSet(task if t.name == task.name else t for t in self.tasks)

    def subset(self, names: Iterable[str]) -> "TaskSet":
        keep = set(names)
        return TaskSet(t for t in self.tasks if t.name in keep)

    def scaled(self, k: float) -> "TaskSet":
        return TaskSet(t.scaled(k) for t in self.tasks)


def validate(ts: TaskSet) -> list[str]:
    """Collect all violations in ``ts``; an empty list means the set is valid."""
    out = []
    seen = set()
    for t in ts:
        if t.name in seen:
            out.append(f"{t.name}: duplicate task name")
        seen.add(t.name)
        out.extend(task_violations(t))
    if any(t.task_class.is_soft for t in ts):
        total = ts.soft_weight_sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            out.append(f"soft weights sum ≠ 1 (got {total:.12g})")
    return out


class InvalidTaskSet(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def check(ts: TaskSet) -> TaskSet:
    problems = validate(ts)
    if problems:
        raise InvalidTaskSet(problems)
    return ts


def utilization(c: float, t: float) -> float:
    if not (c > 0 and t > 0):
        raise ValueError(f"utilization needs c > 0 and t > 0, got c={c}, t={t}")
    return c / t


def rm_bound(n: int) -> float:
    """Liu-Layland rate-monotonic schedulable utilization for ``n`` tasks."""
    if int(n) != n or n < 1:
        raise ValueError(f"rm_bound needs a positive integer, got {n!r}")
    return n * (2.0 ** (1.0 / n) - 1.0)


def total_utilization(ts: TaskSet, periods: Mapping[str, float]) -> float:
    missing = [t.name for t in ts if t.name not in periods]
    if missing:
        raise KeyError(f"no period for task(s): {', '.join(missing)}")
    return math.fsum(utilization(t.c, periods[t.name]) for t in ts)
