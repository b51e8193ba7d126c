"""Adaptive period assignment for periodic real-time tasks under EDF."""

from .edf_sim import Event, EventKind, Scenario, SimTrace, admit, instance_count_oracle, simulate
from .elastic import ElasticReason, ElasticResult, task_compress
from .period_adjust import Clamp, ClampKind, PeriodAssignment, Reason, period_adjust
from .scenario_io import ScenarioError, dump_scenario, load_scenario, parse_scenario, write_assignment, write_trace_csv
from .task_model import (
    InvalidTaskSet,
    Task,
    TaskClass,
    TaskSet,
    check,
    rm_bound,
    total_utilization,
    utilization,
    validate,
)

__all__ = [
    "Clamp", "ClampKind", "ElasticReason", "ElasticResult", "Event", "EventKind",
    "InvalidTaskSet", "PeriodAssignment", "Reason", "Scenario", "ScenarioError",
    "SimTrace", "Task", "TaskClass", "TaskSet", "admit", "check", "dump_scenario",
    "instance_count_oracle", "load_scenario", "parse_scenario", "period_adjust",
    "rm_bound", "simulate", "task_compress", "total_utilization", "utilization",
    "validate", "write_assignment", "write_trace_csv",
]
