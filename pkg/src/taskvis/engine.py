"""Shared request pipeline behind the HTTP service and the CLI: filter,
enumerate, score, rank, truncate, emit. Both front ends call the same
functions so identical inputs produce identical chart manifests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set

from .combiner import CombinationResult
from .data import DataError, Dataset, FilterPredicate, apply_filters
from .enumerator import EnumerationLimits, canonicalize, enumerate_candidates
from .ranking import (
    ClusterParams,
    CostTable,
    ScoredSpec,
    load_cost_table,
    merge_dedup,
    rank_complexity,
    rank_interest,
    rank_reverse_complexity,
    rank_task_coverage,
    score_specs,
)
from .rules import RuleSet, load_rules
from .tasks import ENUMERABLE_TASKS, TaskError, default_scheme, descriptor
from .vegalite import to_vegalite

MODES = ("individual", "combination")
SCHEMES = ("complexity", "reverse_complexity", "interest", "task_coverage", "default")
DEFAULT_MAX_CHARTS = 20


class RequestError(ValueError):
    """Invalid request parameters; maps to exit code 2 / HTTP 422."""


@dataclass
class IndividualResult:
    flat: List[ScoredSpec]
    grouped: Optional[Dict[str, List[ScoredSpec]]]
    partial: bool


def validate_tasks(tasks: Sequence[str]) -> List[str]:
    out = []
    for t in tasks:
        try:
            descriptor(t)
        except TaskError:
            raise RequestError(
                "unknown task: %r (valid: %s)" % (t, ", ".join(ENUMERABLE_TASKS))
            )
        if t == "filter":
            raise RequestError(
                "the filter task is expressed through filters, not enumerated"
            )
        out.append(t)
    return out


def validate_columns(dataset: Dataset, columns: Sequence[str]) -> List[str]:
    known = set(dataset.field_names)
    for c in columns:
        if c not in known:
            raise RequestError(
                "unknown column: %r (dataset has: %s)"
                % (c, ", ".join(dataset.field_names))
            )
    return list(columns)


def resolve_scheme(scheme: str, tasks: Sequence[str]) -> str:
    if scheme not in SCHEMES:
        raise RequestError("unknown scheme: %r (valid: %s)" % (scheme, ", ".join(SCHEMES)))
    if scheme != "default":
        return scheme
    if len(tasks) == 1:
        return default_scheme(tasks[0])
    return "task_coverage"


def parse_filter_payload(raw: Mapping[str, Any]) -> FilterPredicate:
    if not isinstance(raw, Mapping):
        raise RequestError("each filter must be an object")
    unknown = set(raw) - {"field", "op", "value"}
    if unknown:
        raise RequestError("unknown filter keys: %s" % ", ".join(sorted(unknown)))
    try:
        field, op, value = raw["field"], raw["op"], raw["value"]
    except KeyError as exc:
        raise RequestError("filter needs field, op and value (missing %s)" % exc)
    operands = tuple(value) if isinstance(value, (list, tuple)) else (value,)
    return FilterPredicate(field=str(field), op=str(op), operands=operands)


def filtered_dataset(dataset: Dataset, filters: Sequence[FilterPredicate]) -> Dataset:
    try:
        return apply_filters(dataset, filters)
    except DataError as exc:
        raise RequestError(str(exc))


def _apply_scheme(
    entries: Sequence[ScoredSpec],
    scheme: str,
    columns: Sequence[str],
    table: CostTable,
    cluster_params: Optional[ClusterParams],
) -> List[ScoredSpec]:
    if scheme == "complexity":
        return rank_complexity(entries)
    if scheme == "reverse_complexity":
        return rank_reverse_complexity(entries, cluster_params, table)
    if scheme == "interest":
        return rank_interest(entries, columns)
    if scheme == "task_coverage":
        return rank_task_coverage(entries)
    raise RequestError("unknown scheme: %r" % scheme)


def recommend_individual(
    dataset: Dataset,
    columns: Sequence[str],
    tasks: Sequence[str],
    scheme: str = "default",
    max_charts: int = DEFAULT_MAX_CHARTS,
    display_by_task: bool = False,
    table: Optional[CostTable] = None,
    limits: Optional[EnumerationLimits] = None,
    extra_rules: Optional[RuleSet] = None,
    cluster_params: Optional[ClusterParams] = None,
) -> IndividualResult:
    if max_charts < 1:
        raise RequestError("max_charts must be at least 1")
    if table is None:
        table = load_cost_table()
    tasks = validate_tasks(tasks)
    columns = validate_columns(dataset, columns)
    selected = list(tasks) if tasks else list(ENUMERABLE_TASKS)
    if scheme == "interest" and not columns:
        raise RequestError("the interest scheme needs a non-empty column selection")

    per_task: Dict[str, List[ScoredSpec]] = {}
    partial = False
    for task in selected:
        ruleset = load_rules(task)
        if extra_rules is not None:
            ruleset = ruleset.merge(extra_rules)
        result = enumerate_candidates(dataset, columns, task, ruleset, limits)
        partial = partial or result.partial
        per_task[task] = score_specs(result.specs, task, table)

    if display_by_task:
        grouped: Dict[str, List[ScoredSpec]] = {}
        for task in selected:
            group_scheme = (
                default_scheme(task) if scheme == "default" else resolve_scheme(scheme, [task])
            )
            grouped[task] = _apply_scheme(
                per_task[task], group_scheme, columns, table, cluster_params
            )[:max_charts]
        flat: List[ScoredSpec] = []
        for task in selected:
            flat.extend(grouped[task])
        return IndividualResult(flat=flat[:max_charts], grouped=grouped, partial=partial)

    resolved = resolve_scheme(scheme, selected)
    if len(selected) > 1:
        entries = merge_dedup(per_task)
    else:
        entries = per_task[selected[0]]
    flat = _apply_scheme(entries, resolved, columns, table, cluster_params)[:max_charts]
    return IndividualResult(flat=flat, grouped=None, partial=partial)


def truncate_combination(result: CombinationResult, max_charts: int) -> CombinationResult:
    if len(result.charts) <= max_charts:
        return result
    charts = result.charts[:max_charts]
    covered: Set[str] = set()
    for c in charts:
        covered |= c.fields
    return CombinationResult(
        charts=charts,
        covered_columns=covered,
        complete=False,
        iterations=result.iterations,
        comparisons=result.comparisons,
        partial=result.partial,
    )


def chart_entries(
    scored: Sequence[ScoredSpec],
    dataset: Dataset,
    *,
    schema_version: str = "v5",
    data_url: Optional[str] = None,
    data_format: Optional[str] = None,
    map_url: Optional[str] = None,
) -> List[Dict[str, Any]]:
    out = []
    for s in scored:
        out.append(
            {
                "vegalite": to_vegalite(
                    s.spec,
                    dataset,
                    schema_version=schema_version,
                    data_url=data_url,
                    data_format=data_format,
                    map_url=map_url,
                ),
                "cost": s.cost,
                "covering_tasks": sorted(s.covering_tasks),
                "fields": sorted(s.fields),
                "task": s.spec.task,
                "canonical": canonicalize(s.spec),
            }
        )
    return out
