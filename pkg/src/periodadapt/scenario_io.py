"""Scenario files (JSON) in; period tables and simulation traces (CSV) out."""

from __future__ import annotations

import csv
import json
import os
from typing import Iterable, Optional, TextIO, Union

from jsonschema import Draft202012Validator

from .edf_sim import Event, EventKind, Scenario, SimTrace, scenario_violations
from .task_model import Task, TaskClass, TaskSet

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["u_d", "algorithm", "duration_ms", "tasks", "events"],
    "properties": {
        "u_d": _NUM,
        "algorithm": {"enum": ["period-adjust", "task-compress"]},
        "duration_ms": _NUM,
        "sample_interval_ms": _NUM,
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "class", "c_ms", "t0_ms", "weight"],
                "properties": {
                    "name": {"type": "string"},
                    "class": {"enum": [c.value for c in TaskClass]},
                    "c_ms": _NUM,
                    "t0_ms": _NUM,
                    "t_min_ms": _NUM_OR_NULL,
                    "t_max_ms": _NUM_OR_NULL,
                    "weight": _NUM,
                    "fixed_period_ms": _NUM,
                    "elastic_coeff": _NUM,
                    "active_at_start": {"type": "boolean"},
                },
            },
        },
        "events": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["time_ms", "kind", "task"],
                "properties": {
                    "time_ms": _NUM,
                    "kind": {"enum": [k.value for k in EventKind]},
                    "task": {"type": "string"},
                    "period_ms": _NUM,
                },
            },
        },
    },
}

_validator = Draft202012Validator(SCENARIO_SCHEMA)


class ScenarioError(ValueError):
    """Raised with every problem found in a scenario document."""

    def __init__(self, errors: list[str]):
        super().__init__("\n".join(errors))
        self.errors = errors


def _schema_errors(doc) -> list[str]:
    out = []
    for err in sorted(_validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = err.json_path
        if err.validator == "required":
            for key in err.validator_value:
                if isinstance(err.instance, dict) and key not in err.instance:
                    out.append(f"{path}.{key}: missing required key")
        elif err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            out.extend(f"{path}.{key}: unknown key" for key in extra)
        else:
            out.append(f"{path}: {err.message}")
    return out


def _task_from_json(obj: dict) -> Task:
    return Task(
        name=obj["name"],
        c=obj["c_ms"],
        t0=obj["t0_ms"],
        task_class=TaskClass(obj["class"]),
        weight=obj["weight"],
        t_min=obj.get("t_min_ms"),
        t_max=obj.get("t_max_ms"),
        fixed_period=obj.get("fixed_period_ms"),
        elastic_coeff=obj.get("elastic_coeff"),
    )


def parse_scenario(data: Union[bytes, str]) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises ScenarioError carrying every syntax, schema or semantic problem.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError([f"not UTF-8: {exc}"]) from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None

    errors = _schema_errors(doc)
    if errors:
        raise ScenarioError(errors)

    tasks = [_task_from_json(obj) for obj in doc["tasks"]]
    sc = Scenario(
        taskset=TaskSet(tasks),
        events=[Event(e["time_ms"], EventKind(e["kind"]), e["task"], e.get("period_ms"))
                for e in doc["events"]],
        duration=doc["duration_ms"],
        u_d=doc["u_d"],
        algorithm=doc["algorithm"],
        sample_interval=doc.get("sample_interval_ms", 1000),
        active_at_start=frozenset(obj["name"] for obj in doc["tasks"]
                                  if obj.get("active_at_start", True)),
    )
    problems = scenario_violations(sc)
    if problems:
        raise ScenarioError(problems)
    return sc


def load_scenario(path: Union[str, os.PathLike]) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def scenario_to_dict(sc: Scenario) -> dict:
    active = set(sc.initially_active)
    tasks = []
    for t in sc.taskset:
        obj = {
            "name": t.name,
            "class": t.task_class.value,
            "c_ms": t.c,
            "t0_ms": t.t0,
            "t_min_ms": t.t_min,
            "t_max_ms": t.t_max,
            "weight": t.weight,
        }
        if t.fixed_period is not None:
            obj["fixed_period_ms"] = t.fixed_period
        if t.elastic_coeff is not None:
            obj["elastic_coeff"] = t.elastic_coeff
        obj["active_at_start"] = t.name in active
        tasks.append(obj)
    events = []
    for e in sc.events:
        obj = {"time_ms": e.time, "kind": e.kind.value, "task": e.task}
        if e.period is not None:
            obj["period_ms"] = e.period
        events.append(obj)
    return {
        "u_d": sc.u_d,
        "algorithm": sc.algorithm,
        "duration_ms": sc.duration,
        "sample_interval_ms": sc.sample_interval,
        "tasks": tasks,
        "events": events,
    }


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


def fmt_num(x: Optional[float]) -> str:
    """Integers without a decimal point, other reals with at most 6 decimals."""
    if x is None:
        return ""
    x = float(x)
    if x.is_integer():
        return str(int(x))
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _writer(sink: TextIO):
    return csv.writer(sink, lineterminator="\n")


def write_samples(trace: SimTrace, sink: TextIO) -> None:
    w = _writer(sink)
    w.writerow(["time_ms", "task", "completed_count", "current_period_ms"])
    for time, task, count, period in trace.samples:
        w.writerow([fmt_num(time), task, count, fmt_num(period)])


def write_misses(trace: SimTrace, sink: TextIO) -> None:
    order = {n: i for i, n in enumerate(trace.task_order)}
    w = _writer(sink)
    w.writerow(["time_ms", "task", "job_release_ms"])
    for time, task, release in sorted(trace.misses, key=lambda r: (r[0], order.get(r[1], 0))):
        w.writerow([fmt_num(time), task, fmt_num(release)])


def write_adjustments(trace: SimTrace, sink: TextIO) -> None:
    w = _writer(sink)
    w.writerow(["time_ms", "verdict", "task", "period_ms"])
    for time, verdict, periods in trace.adjustments:
        for task in trace.task_order:
            if task in periods:
                w.writerow([fmt_num(time), verdict, task, fmt_num(periods[task])])


def write_trace_csv(trace: SimTrace, outdir: Union[str, os.PathLike], samples_name: str = "samples.csv") -> None:
    """Write samples.csv, misses.csv and adjustments.csv into ``outdir``."""
    os.makedirs(outdir, exist_ok=True)
    for name, fn in ((samples_name, write_samples),
                     ("misses.csv", write_misses),
                     ("adjustments.csv", write_adjustments)):
        with open(os.path.join(outdir, name), "w", newline="", encoding="utf-8") as fh:
            fn(trace, fh)


def write_verdicts(times_and_verdicts: Iterable[tuple[float, str, str]], sink: TextIO) -> None:
    w = _writer(sink)
    w.writerow(["time_ms", "period_adjust", "task_compress"])
    for time, pa, tc in times_and_verdicts:
        w.writerow([fmt_num(time), pa, tc])


def assignment_to_dict(result) -> dict:
    """JSON view of a PeriodAssignment or ElasticResult."""
    if not result.feasible:
        return {"verdict": "Infeasible", "reason": result.reason.value}
    out = {"verdict": "Feasible", "periods": dict(result.periods)}
    if hasattr(result, "passes"):
        out["passes"] = result.passes
        out["clamp_log"] = [{"pass": c.pass_no, "task": c.task, "kind": c.kind.value}
                            for c in result.clamp_log]
        out["achieved_utilization"] = result.achieved_utilization
    else:
        out["iterations"] = result.iterations
    return out


def write_assignment(result, taskset: TaskSet, sink: TextIO, fmt: str = "csv") -> None:
    if fmt == "json":
        json.dump(assignment_to_dict(result), sink, indent=2)
        sink.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    w = _writer(sink)
    if not result.feasible:
        w.writerow(["verdict", "reason"])
        w.writerow(["Infeasible", result.reason.value])
        return
    # full precision so the table agrees with the JSON form
    w.writerow(["task", "period_ms", "utilization"])
    for t in taskset:
        p = result.periods[t.name]
        w.writerow([t.name, repr(p), repr(t.c / p)])
