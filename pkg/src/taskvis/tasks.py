"""The analytic task table: 18 tasks, their marks in priority order, defaults.

The table ships as a versioned JSON resource so new tasks can be added
without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

VALID_MARKS = (
    "arc",
    "area",
    "bar",
    "boxplot",
    "circle",
    "errorband",
    "errorbar",
    "geoshape",
    "line",
    "point",
    "rect",
    "rule",
    "text",
    "tick",
)

RANKING_SCHEMES = ("complexity", "reverse_complexity", "interest", "task_coverage")

# Overlay combinations the task table may construct.
ALLOWED_OVERLAYS = {
    ("rect", "text"),
    ("bar", "rule"),
    ("point", "rule"),
    ("circle", "text"),
    ("point", "line"),
}


class TaskError(ValueError):
    """Unknown task name or malformed task table."""


@dataclass(frozen=True)
class MarkSpec:
    base: str
    overlay: Optional[str] = None

    def __post_init__(self) -> None:
        if self.base not in VALID_MARKS:
            raise TaskError("unknown mark: %r" % self.base)
        if self.overlay is not None:
            if self.overlay == self.base:
                raise TaskError("overlay must differ from base mark")
            if (self.base, self.overlay) not in ALLOWED_OVERLAYS:
                raise TaskError(
                    "unsupported mark combination: %s(%s)" % (self.base, self.overlay)
                )

    def label(self) -> str:
        if self.overlay:
            return "%s(%s)" % (self.base, self.overlay)
        return self.base


@dataclass(frozen=True)
class TaskDescriptor:
    task: str
    description: str
    marks: Tuple[MarkSpec, ...]
    default_scheme: str
    aggregation_allowed: bool


def _load_table() -> List[TaskDescriptor]:
    raw = resources.files("taskvis.resources").joinpath("tasks.json").read_text("utf-8")
    doc = json.loads(raw)
    if doc.get("version") != 1:
        raise TaskError("unsupported task table version: %r" % doc.get("version"))
    out: List[TaskDescriptor] = []
    for entry in doc["tasks"]:
        marks = tuple(
            MarkSpec(base=m["base"], overlay=m.get("overlay")) for m in entry["marks"]
        )
        if not marks:
            raise TaskError("task %r lists no marks" % entry["task"])
        if entry["default_scheme"] not in RANKING_SCHEMES:
            raise TaskError("unknown default scheme: %r" % entry["default_scheme"])
        out.append(
            TaskDescriptor(
                task=entry["task"],
                description=entry["description"],
                marks=marks,
                default_scheme=entry["default_scheme"],
                aggregation_allowed=bool(entry["aggregation_allowed"]),
            )
        )
    return out


_TABLE: List[TaskDescriptor] = _load_table()
_BY_NAME: Dict[str, TaskDescriptor] = {d.task: d for d in _TABLE}

ALL_TASKS = tuple(d.task for d in _TABLE)
# filter is resolved during data preprocessing, never sent to the enumerator
ENUMERABLE_TASKS = tuple(t for t in ALL_TASKS if t != "filter")


def list_tasks() -> List[TaskDescriptor]:
    """All 18 descriptors in stable table order."""
    return list(_TABLE)


def descriptor(task: str) -> TaskDescriptor:
    try:
        return _BY_NAME[task]
    except KeyError:
        raise TaskError("unknown task: %r" % task)


def marks_for_task(task: str) -> List[MarkSpec]:
    return list(descriptor(task).marks)


def mark_priority(task: str, mark: MarkSpec) -> Optional[int]:
    """1-based rank of the mark within the task's list, or None."""
    for i, m in enumerate(descriptor(task).marks, start=1):
        if m == mark:
            return i
    return None


def aggregation_allowed(task: str) -> bool:
    return descriptor(task).aggregation_allowed


def default_scheme(task: str) -> str:
    return descriptor(task).default_scheme
