"""Cost scoring and the four ranking schemes.

Every candidate gets a component-additive cost: the mark's priority rank for
the task times a configurable unit, plus a cost per used channel, plus a cost
per applied transform. Absolute values are configuration (cost_model.json, or
TASKVIS_COST_FILE); code and tests rely on ordering properties only, so
multiplying the whole table by a positive constant never reorders anything.

Schemes:
  I   complexity          ascending cost
  II  reverse complexity  cluster similar charts, hardest cluster first,
                          within-cluster order kept from scheme I
  III interest            cost divided by the share of the user's columns
                          the chart covers
  IV  task coverage       charts useful for more tasks first (after
                          merge_dedup), then by averaged cost

Chart similarity for scheme II is the summed cost of differing components,
with an axis swap discounted to a flat swap cost; clustering is density
based (a from-scratch DBSCAN over that distance).
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter, deque
from dataclasses import dataclass, replace
from importlib import resources
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .enumerator import CHANNEL_ORDER, CandidateSpec, canonicalize, spec_fields
from .tasks import ALL_TASKS, MarkSpec, mark_priority

COST_FILE_ENV = "TASKVIS_COST_FILE"

TRANSFORM_TOKENS = (
    "sort",
    "bin",
    "stack_zero",
    "stack_normalize",
    "aggregate_count",
    "aggregate_sum",
    "aggregate_mean",
    "scale_log",
    "regression",
    "loess",
)


class RankingError(ValueError):
    pass


class CostConfigError(RankingError):
    pass


@dataclass(frozen=True)
class ComponentKey:
    kind: str  # mark | channel | transform
    name: str  # e.g. channel:x, transform:aggregate_sum, mark:bar@sort


@dataclass(frozen=True)
class CostTable:
    channel_costs: Mapping[str, float]
    transform_costs: Mapping[str, float]
    mark_unit: float = 1.0
    overlay_extra: float = 1.0
    swap_cost: float = 0.5

    def __post_init__(self) -> None:
        for where, table, known in (
            ("channels", self.channel_costs, set(CHANNEL_ORDER)),
            ("transforms", self.transform_costs, set(TRANSFORM_TOKENS)),
        ):
            for key, value in table.items():
                if key not in known:
                    raise CostConfigError("unknown %s cost key: %r" % (where, key))
                if not isinstance(value, (int, float)) or value < 0:
                    raise CostConfigError("cost for %r must be a non-negative number" % key)
        if self.mark_unit < 0 or self.overlay_extra < 0 or self.swap_cost < 0:
            raise CostConfigError("mark_unit, overlay_extra and swap_cost must be non-negative")
        c = self.channel_costs
        if "x" in c and "y" in c and c["x"] != c["y"]:
            raise CostConfigError("x and y must share one cost tier")
        tiers = [k for k in ("x", "color", "size", "shape", "text") if k in c]
        for a, b in zip(tiers, tiers[1:]):
            if not c[a] < c[b]:
                raise CostConfigError(
                    "channel tiers must be strictly ordered: %s before %s" % (a, b)
                )

    def channel(self, name: str) -> float:
        try:
            return float(self.channel_costs[name])
        except KeyError:
            raise CostConfigError("cost table has no channel cost for %r" % name)

    def transform(self, token: str) -> float:
        try:
            return float(self.transform_costs[token])
        except KeyError:
            raise CostConfigError("cost table has no transform cost for %r" % token)

    def mark_cost(self, task: str, mark: MarkSpec) -> float:
        rank = mark_priority(task, mark)
        if rank is None:
            raise RankingError("mark %s is not listed for task %s" % (mark.label(), task))
        return float(rank) * self.mark_unit + (self.overlay_extra if mark.overlay else 0.0)

    def scaled(self, factor: float) -> "CostTable":
        if factor <= 0:
            raise CostConfigError("scale factor must be positive")
        return CostTable(
            channel_costs={k: v * factor for k, v in self.channel_costs.items()},
            transform_costs={k: v * factor for k, v in self.transform_costs.items()},
            mark_unit=self.mark_unit * factor,
            overlay_extra=self.overlay_extra * factor,
            swap_cost=self.swap_cost * factor,
        )


@dataclass(frozen=True)
class ClusterParams:
    eps: Optional[float] = None  # None: twice the table's swap cost
    min_pts: int = 2

    def __post_init__(self) -> None:
        if self.eps is not None and self.eps < 0:
            raise RankingError("eps must be non-negative")
        if self.min_pts < 1:
            raise RankingError("min_pts must be at least 1")

    def resolve_eps(self, table: CostTable) -> float:
        return self.eps if self.eps is not None else 2.0 * table.swap_cost


@dataclass(frozen=True)
class ScoredSpec:
    spec: CandidateSpec
    cost: float
    fields: FrozenSet[str]
    covering_tasks: FrozenSet[str] = frozenset()


def load_cost_table(path: Optional[str] = None) -> CostTable:
    if path is None:
        path = os.environ.get(COST_FILE_ENV)
    if path is None:
        text = (
            resources.files("taskvis.resources").joinpath("cost_model.json").read_text("utf-8")
        )
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CostConfigError("cost model is not valid JSON: %s" % exc)
    if not isinstance(raw, dict):
        raise CostConfigError("cost model must be a JSON object")
    allowed = {"channels", "transforms", "mark_unit", "overlay_extra", "swap_cost"}
    unknown = set(raw) - allowed
    if unknown:
        raise CostConfigError("unknown cost model keys: %s" % ", ".join(sorted(unknown)))
    return CostTable(
        channel_costs=dict(raw.get("channels", {})),
        transform_costs=dict(raw.get("transforms", {})),
        mark_unit=float(raw.get("mark_unit", 1.0)),
        overlay_extra=float(raw.get("overlay_extra", 1.0)),
        swap_cost=float(raw.get("swap_cost", 0.5)),
    )


# ---------------------------------------------------------------------------
# Components and cost

_Component = Tuple[Tuple[str, str, Optional[str]], float]


def _encoding_transforms(e) -> Iterable[str]:
    if e.aggregate:
        yield "aggregate_%s" % e.aggregate
    if e.bin:
        yield "bin"
    if e.sort:
        yield "sort"
    if e.stack:
        yield "stack_%s" % e.stack
    if e.scale == "log":
        yield "scale_log"


def _components(spec: CandidateSpec, task: str, table: CostTable) -> List[_Component]:
    out: List[_Component] = [
        (
            ("mark", "mark:%s@%s" % (spec.mark.label(), task), None),
            table.mark_cost(task, spec.mark),
        )
    ]
    for e in spec.encodings:
        out.append((("channel", "channel:%s" % e.channel, e.field), table.channel(e.channel)))
        for token in _encoding_transforms(e):
            out.append((("transform", "transform:%s" % token, e.field), table.transform(token)))
    if spec.trend:
        out.append((("transform", "transform:%s" % spec.trend, None), table.transform(spec.trend)))
    return out


def components(spec: CandidateSpec, task: str, table: CostTable) -> List[ComponentKey]:
    return [ComponentKey(kind=k[0], name=k[1]) for k, _ in _components(spec, task, table)]


def cost_score(spec: CandidateSpec, task: str, table: CostTable) -> float:
    return sum(cost for _, cost in _components(spec, task, table))


def score_specs(
    specs: Sequence[CandidateSpec], task: str, table: CostTable
) -> List[ScoredSpec]:
    return [
        ScoredSpec(
            spec=s,
            cost=cost_score(s, task, table),
            fields=frozenset(spec_fields(s)),
            covering_tasks=frozenset([task]),
        )
        for s in specs
    ]


# ---------------------------------------------------------------------------
# Distance and clustering

def _swap_axes(spec: CandidateSpec) -> CandidateSpec:
    swapped = []
    for e in spec.encodings:
        if e.channel == "x":
            e = replace(e, channel="y", sort="x" if e.sort else None)
        elif e.channel == "y":
            e = replace(e, channel="x", sort="y" if e.sort else None)
        swapped.append(e)
    ordered = tuple(
        sorted(swapped, key=lambda e: (CHANNEL_ORDER.index(e.channel), e.field or ""))
    )
    return replace(spec, encodings=ordered)


def _symdiff_cost(a: List[_Component], b: List[_Component]) -> float:
    ca: Counter = Counter()
    costs: Dict[Tuple[str, str, Optional[str]], float] = {}
    for key, cost in a:
        ca[key] += 1
        costs[key] = cost
    cb: Counter = Counter()
    for key, cost in b:
        cb[key] += 1
        costs[key] = cost
    total = 0.0
    for key in set(ca) | set(cb):
        total += abs(ca[key] - cb[key]) * costs[key]
    return total


def spec_distance(a: CandidateSpec, b: CandidateSpec, table: CostTable) -> float:
    if canonicalize(a) == canonicalize(b):
        return 0.0
    comps_a = _components(a, a.task, table)
    comps_b = _components(b, b.task, table)
    plain = _symdiff_cost(comps_a, comps_b)
    swapped = table.swap_cost + _symdiff_cost(
        _components(_swap_axes(a), a.task, table), comps_b
    )
    return min(plain, swapped)


def cluster(
    scored: Sequence[ScoredSpec],
    params: Optional[ClusterParams] = None,
    table: Optional[CostTable] = None,
) -> List[int]:
    """Density-based cluster label per entry; noise points become singleton
    clusters so downstream ordering stays total."""
    if params is None:
        params = ClusterParams()
    if table is None:
        table = load_cost_table()
    n = len(scored)
    eps = params.resolve_eps(table)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = spec_distance(scored[i].spec, scored[j].spec, table)
            dist[i][j] = d
            dist[j][i] = d
    neighbors = [[j for j in range(n) if dist[i][j] <= eps] for i in range(n)]
    labels = [-1] * n
    next_label = 0
    for i in range(n):
        if labels[i] != -1 or len(neighbors[i]) < params.min_pts:
            continue
        labels[i] = next_label
        queue = deque(neighbors[i])
        while queue:
            j = queue.popleft()
            if labels[j] != -1:
                continue
            labels[j] = next_label
            if len(neighbors[j]) >= params.min_pts:
                queue.extend(k for k in neighbors[j] if labels[k] == -1)
        next_label += 1
    for i in range(n):
        if labels[i] == -1:
            labels[i] = next_label
            next_label += 1
    return labels


# ---------------------------------------------------------------------------
# Ranking schemes

def _scheme_one_key(s: ScoredSpec) -> Tuple[float, str]:
    return (s.cost, canonicalize(s.spec))


def rank_complexity(scored: Sequence[ScoredSpec]) -> List[ScoredSpec]:
    return sorted(scored, key=_scheme_one_key)


def rank_reverse_complexity(
    scored: Sequence[ScoredSpec],
    params: Optional[ClusterParams] = None,
    table: Optional[CostTable] = None,
) -> List[ScoredSpec]:
    if table is None:
        table = load_cost_table()
    ordered = rank_complexity(scored)
    labels = cluster(ordered, params, table)
    groups: Dict[int, List[ScoredSpec]] = {}
    for label, entry in zip(labels, ordered):
        groups.setdefault(label, []).append(entry)
    def group_key(item: Tuple[int, List[ScoredSpec]]) -> Tuple[float, str]:
        members = item[1]
        return (
            -max(m.cost for m in members),
            min(canonicalize(m.spec) for m in members),
        )
    out: List[ScoredSpec] = []
    for _, members in sorted(groups.items(), key=group_key):
        out.extend(members)
    return out


def rank_interest(
    scored: Sequence[ScoredSpec], interested: Iterable[str]
) -> List[ScoredSpec]:
    wanted = set(interested)
    if not wanted:
        raise RankingError("interest ranking needs a non-empty column set")
    n2 = len(wanted)

    def key(s: ScoredSpec) -> Tuple[float, float, str]:
        n1 = len(s.fields & wanted)
        adjusted = s.cost * n2 / n1 if n1 else math.inf
        return (adjusted, s.cost, canonicalize(s.spec))

    return sorted(scored, key=key)


def merge_dedup(per_task: Mapping[str, List[ScoredSpec]]) -> List[ScoredSpec]:
    """Union of per-task lists keyed by canonical identity: costs average,
    coverage sets union. Idempotent."""
    order = [t for t in ALL_TASKS if t in per_task]
    order += [t for t in per_task if t not in set(ALL_TASKS)]
    merged: Dict[str, List[ScoredSpec]] = {}
    coverage: Dict[str, Set[str]] = {}
    sequence: List[str] = []
    for task in order:
        for entry in per_task[task]:
            key = canonicalize(entry.spec)
            if key not in merged:
                merged[key] = []
                coverage[key] = set()
                sequence.append(key)
            merged[key].append(entry)
            coverage[key] |= entry.covering_tasks or {task}
    out: List[ScoredSpec] = []
    for key in sequence:
        entries = merged[key]
        out.append(
            ScoredSpec(
                spec=entries[0].spec,
                cost=sum(e.cost for e in entries) / len(entries),
                fields=entries[0].fields,
                covering_tasks=frozenset(coverage[key]),
            )
        )
    return out


def rank_task_coverage(scored: Sequence[ScoredSpec]) -> List[ScoredSpec]:
    return sorted(
        scored,
        key=lambda s: (-len(s.covering_tasks), s.cost, canonicalize(s.spec)),
    )
