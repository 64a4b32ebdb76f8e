"""Greedy chart-set combination: pick the chart ranked best by task
coverage, drop every candidate whose columns are already covered, repeat
until the columns of interest are covered or candidates run out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set

from .data import Dataset
from .enumerator import EnumerationLimits, enumerate_candidates
from .ranking import (
    CostTable,
    ScoredSpec,
    load_cost_table,
    merge_dedup,
    rank_task_coverage,
    score_specs,
)
from .rules import RuleSet, load_rules
from .tasks import ENUMERABLE_TASKS


@dataclass
class CombinationResult:
    charts: List[ScoredSpec]
    covered_columns: Set[str]
    complete: bool
    iterations: int = 0
    comparisons: int = 0
    partial: bool = False

    def __post_init__(self) -> None:
        union: Set[str] = set()
        for c in self.charts:
            union |= c.fields
        if union != set(self.covered_columns):
            raise ValueError("covered_columns must be the union of chart fields")


def combine(recs: Sequence[ScoredSpec], interested: Set[str]) -> CombinationResult:
    """One pass of the greedy selection. recs should be deduplicated with
    coverage sets populated; ordering ties resolve canonically, so output is
    reproducible."""
    pending = rank_task_coverage(recs)
    chosen: List[ScoredSpec] = []
    covered: Set[str] = set()
    iterations = 0
    comparisons = 0
    while not interested <= covered and pending:
        iterations += 1
        head = pending[0]
        chosen.append(head)
        covered |= head.fields
        kept = []
        for entry in pending:
            comparisons += 1
            if not entry.fields <= covered:
                kept.append(entry)
        pending = kept
    return CombinationResult(
        charts=chosen,
        covered_columns=covered,
        complete=interested <= covered,
        iterations=iterations,
        comparisons=comparisons,
    )


def recommend_combination(
    dataset: Dataset,
    interested: Optional[Set[str]] = None,
    tasks: Optional[Sequence[str]] = None,
    extra_rules: Optional[RuleSet] = None,
    table: Optional[CostTable] = None,
    limits: Optional[EnumerationLimits] = None,
) -> CombinationResult:
    """Dataset-level combination. Without a task selection the whole task
    base participates and the result aims to cover every column of interest
    (all columns when none are named). With a task selection only those
    tasks participate and incomplete coverage is acceptable: some columns
    simply have no chart under the chosen tasks."""
    if table is None:
        table = load_cost_table()
    task_list = list(tasks) if tasks else list(ENUMERABLE_TASKS)
    if interested:
        wanted = set(interested)
    else:
        wanted = set(dataset.field_names)
    per_task: Dict[str, List[ScoredSpec]] = {}
    partial = False
    for task in task_list:
        ruleset = load_rules(task)
        if extra_rules is not None:
            ruleset = ruleset.merge(extra_rules)
        result = enumerate_candidates(dataset, sorted(wanted), task, ruleset, limits)
        partial = partial or result.partial
        per_task[task] = score_specs(result.specs, task, table)
    merged = merge_dedup(per_task)
    out = combine(merged, wanted)
    out.partial = partial
    return out
