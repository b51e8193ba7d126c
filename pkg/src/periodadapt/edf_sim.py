"""Preemptive EDF simulation of a periodic task set with run-time period changes.

Every job's deadline is its release plus the period in force at release. When a
scenario event fires, the active set is re-admitted and new periods take effect
at each task's next release; in-flight jobs keep their deadlines. A job still
running at its deadline is aborted and logged as a miss.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .elastic import task_compress
from .period_adjust import period_adjust
from .task_model import Task, TaskSet, validate

EPS = 1e-9
ALGORITHMS = ("period-adjust", "task-compress")


class EventKind(str, enum.Enum):
    # declaration order is the processing order at equal times
    DEPART = "depart"
    ARRIVE = "arrive"
    SET_FIXED_PERIOD = "set-fixed-period"
    CLEAR_FIXED_PERIOD = "clear-fixed-period"

    @property
    def rank(self) -> int:
        return list(EventKind).index(self)


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    task: str
    period: Optional[float] = None


@dataclass(frozen=True)
class Scenario:
    taskset: TaskSet
    events: tuple[Event, ...] = ()
    duration: float = 0.0
    u_d: float = 1.0
    algorithm: str = "period-adjust"
    sample_interval: float = 1000.0
    # names of tasks released at t = 0; None means all of them
    active_at_start: Optional[frozenset[str]] = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.active_at_start is not None:
            active = frozenset(self.active_at_start)
            if active >= set(self.taskset.names):
                active = None
            object.__setattr__(self, "active_at_start", active)

    @property
    def initially_active(self) -> list[str]:
        if self.active_at_start is None:
            return self.taskset.names
        return [n for n in self.taskset.names if n in self.active_at_start]


def scenario_violations(sc: Scenario) -> list[str]:
    out = list(validate(sc.taskset))
    names = set(sc.taskset.names)
    if not (0 < sc.u_d <= 1):
        out.append(f"u_d must lie in (0, 1], got {sc.u_d}")
    if sc.algorithm not in ALGORITHMS:
        out.append(f"unknown algorithm {sc.algorithm!r}")
    if not (sc.duration >= 0 and math.isfinite(sc.duration)):
        out.append("duration must be a finite number >= 0")
    if not (sc.sample_interval > 0):
        out.append("sample_interval must be > 0")
    if sc.active_at_start is not None:
        for n in sorted(sc.active_at_start - names):
            out.append(f"{n}: active_at_start names an unknown task")
    prev = -math.inf
    for i, ev in enumerate(sc.events):
        where = f"event {i}"
        if ev.time < prev:
            out.append(f"{where}: events not sorted by time")
        prev = max(prev, ev.time)
        if not (0 <= ev.time <= sc.duration):
            out.append(f"{where}: time {ev.time} outside [0, {sc.duration}]")
        if ev.task not in names:
            out.append(f"{where}: unknown task {ev.task!r}")
            continue
        task = sc.taskset[ev.task]
        if ev.kind in (EventKind.SET_FIXED_PERIOD, EventKind.CLEAR_FIXED_PERIOD) and not task.task_class.is_soft:
            out.append(f"{where}: {ev.kind.value} applies to soft tasks only ({ev.task})")
        if ev.kind is EventKind.SET_FIXED_PERIOD:
            if ev.period is None or not ev.period >= task.c:
                out.append(f"{where}: set-fixed-period needs period >= c for {ev.task}")
        elif ev.period is not None:
            out.append(f"{where}: period only allowed on set-fixed-period")
    return out


@dataclass
class SimTrace:
    samples: list[tuple[float, str, int, Optional[float]]] = field(default_factory=list)
    misses: list[tuple[float, str, float]] = field(default_factory=list)
    adjustments: list[tuple[float, str, dict[str, float]]] = field(default_factory=list)
    busy: Optional[list[tuple[float, float, str]]] = None
    task_order: tuple[str, ...] = ()


def _normalize_weights(ts: TaskSet) -> TaskSet:
    soft = [t for t in ts if t.task_class.is_soft]
    if not soft:
        return ts
    total = math.fsum(t.weight for t in soft)
    if abs(total - 1.0) <= 1e-12:
        return ts
    out = []
    for t in ts:
        if t.task_class.is_soft:
            w = t.weight / total if total > 0 else 1.0 / len(soft)
            t = replace(t, weight=w)
        out.append(t)
    return TaskSet(out)


def admit(ts: TaskSet, u_d: float, algorithm: str) -> tuple[str, Optional[dict[str, float]]]:
    """Periods for the active set ``ts``: nominal ones when they fit under
    ``u_d``, otherwise whatever ``algorithm`` assigns. Returns (verdict, periods),
    periods being None when the algorithm finds no feasible assignment.
    """
    nominal = ts.nominal_periods()
    if math.fsum(t.c / nominal[t.name] for t in ts) <= u_d + EPS:
        return "Feasible", nominal
    ts = _normalize_weights(ts)
    if algorithm == "period-adjust":
        res = period_adjust(ts, u_d)
    elif algorithm == "task-compress":
        res = task_compress(ts, u_d)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return res.verdict, (res.periods if res.feasible else None)


@dataclass
class _Job:
    release: float
    deadline: float
    remaining: float


def simulate(sc: Scenario, record_busy: bool = False) -> SimTrace:
    problems = scenario_violations(sc)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))

    base = sc.taskset
    order = {n: i for i, n in enumerate(base.names)}
    tasks: dict[str, Task] = {t.name: t for t in base}
    active: set[str] = set(sc.initially_active)
    period: dict[str, float] = {}
    job: dict[str, Optional[_Job]] = {n: None for n in order}
    next_release: dict[str, Optional[float]] = {n: None for n in order}
    completed = {n: 0 for n in order}
    trace = SimTrace(busy=[] if record_busy else None, task_order=tuple(base.names))

    def readmit(t: float, arrived: list[str]) -> None:
        current = TaskSet(tasks[n] for n in base.names if n in active)
        verdict, periods = admit(current, sc.u_d, sc.algorithm)
        if periods is None:
            periods = {n: period[n] if n in period else tasks[n].nominal_period
                       for n in current.names}
        period.clear()
        period.update(periods)
        for n in arrived:
            next_release[n] = t
        trace.adjustments.append((t, verdict, dict(periods)))

    readmit(0.0, list(active))

    events = sorted(sc.events, key=lambda e: (e.time, e.kind.rank, order[e.task]))
    ei = 0
    k_sample = 0
    t = 0.0
    while True:
        ready = [n for n in base.names if job[n] is not None]
        running = min(ready, key=lambda n: (job[n].deadline, order[n])) if ready else None

        horizon = [sc.duration, k_sample * sc.sample_interval]
        if ei < len(events):
            horizon.append(events[ei].time)
        horizon.extend(r for r in next_release.values() if r is not None)
        horizon.extend(j.deadline for j in job.values() if j is not None)
        if running is not None:
            horizon.append(t + job[running].remaining)
        t_next = max(t, min(horizon))

        if running is not None and t_next > t:
            job[running].remaining -= t_next - t
            if trace.busy is not None:
                if trace.busy and trace.busy[-1][2] == running and trace.busy[-1][1] == t:
                    trace.busy[-1] = (trace.busy[-1][0], t_next, running)
                else:
                    trace.busy.append((t, t_next, running))
        t = t_next

        if running is not None and job[running].remaining <= EPS:
            completed[running] += 1
            job[running] = None

        for n in base.names:
            j = job[n]
            if j is not None and j.deadline <= t + EPS:
                trace.misses.append((j.deadline, n, j.release))
                job[n] = None

        fired = False
        arrived = []
        while ei < len(events) and events[ei].time <= t + EPS:
            ev = events[ei]
            ei += 1
            fired = True
            n = ev.task
            if ev.kind is EventKind.DEPART:
                active.discard(n)
                job[n] = None
                next_release[n] = None
                if n in arrived:
                    arrived.remove(n)
            elif ev.kind is EventKind.ARRIVE:
                if n not in active:
                    active.add(n)
                    arrived.append(n)
            elif ev.kind is EventKind.SET_FIXED_PERIOD:
                tasks[n] = tasks[n].with_fixed_period(ev.period)
            else:
                tasks[n] = base[n]
        if fired:
            readmit(t, arrived)

        for n in base.names:
            r = next_release[n]
            if r is not None and r <= t + EPS:
                job[n] = _Job(r, r + period[n], tasks[n].c)
                next_release[n] = r + period[n]

        if k_sample * sc.sample_interval <= t + EPS:
            at = k_sample * sc.sample_interval
            for n in base.names:
                trace.samples.append((at, n, completed[n], period.get(n) if n in active else None))
            k_sample += 1

        if t >= sc.duration - EPS:
            break
    return trace


def instance_count_oracle(period: float, start: float, end: float) -> int:
    """Whole periods of an uncontended task that fit in ``[start, end)``."""
    if not period > 0 or start > end:
        raise ValueError("need period > 0 and start <= end")
    return math.floor((end - start) / period)
