"""Candidate chart enumeration: combinatorial search over marks, channel
assignments, and transforms, pruned by the rule base.

Structural well-formedness contract
-----------------------------------
Generation only builds candidates of the following shapes; everything else
is left to the rule base via check(). The brute-force oracle in the test
suite mirrors this contract independently.

Channel templates by base mark:
  arc        {theta, color} (both required; a pie needs a slice category)
  geoshape   {shape} or {shape, color}
  circle     {latitude, longitude} plus a subset of {color, size}
  all others {x} or {x, y}, plus a subset of {color, size, shape}, at most
             two legends

Field assignment:
  every encoding binds a distinct eligible column, except the synthetic
  count encoding (no column; channel y, or theta on arc). Legend typing:
  color takes any type, size only quantitative, shape only nominal.
  latitude/longitude/theta take quantitative columns; geoshape's shape
  channel takes nominal columns.

Transforms:
  aggregate in {sum, mean} on quantitative encodings on x/y (plus theta on
  arc; plus color on rect and geoshape where color is the measure); at most
  one aggregated encoding per candidate (a text mirror copy not counted);
  when an aggregate or count is present every other column-bearing encoding
  must be discrete (nominal/ordinal/temporal or binned). bin only on
  quantitative x/y encodings, never together with aggregate on the same
  encoding. sort (ascending, by the other axis) appears exactly under the
  sort task, on a nominal/ordinal axis whose opposite axis is quantitative;
  sort-task skeletons without such an axis yield no candidates. stack in
  {zero, normalize} exactly when the mark is bar/area, a color legend is
  present, and an aggregated x or y exists (the stack rides the aggregated
  axis). scale log only on raw quantitative axes whose column minimum is
  positive. trend in {regression, loess} exactly for the trend task.

Overlays are derived, never searched: a text overlay appends one text
encoding mirroring the measure encoding (first quantitative, unbinned
encoding among color, size, theta, y, x; candidates without a measure are
dropped); rule overlays add no encodings; line overlays add none either but
require raw (unbinned, unaggregated) quantitative x and y axes, because the
fitted curve needs two numeric coordinates.
"""

from __future__ import annotations

import itertools
import json
import re
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .data import DataError, Dataset, Field, FieldType
from .rules import Atom, RuleSet, atom, check, make_term
from .tasks import MarkSpec, TaskError, aggregation_allowed, descriptor, marks_for_task

CHANNEL_ORDER = ("x", "y", "color", "size", "shape", "theta", "latitude", "longitude", "text")
LEGEND_CHANNELS = ("color", "size", "shape")
AGG_FUNCS = ("sum", "mean")
TREND_METHODS = ("regression", "loess")
DISCRETE_TYPES = (FieldType.NOMINAL, FieldType.ORDINAL, FieldType.TEMPORAL)

DEFAULT_MAX_ENCODINGS = 4
DEFAULT_MAX_CANDIDATES = 500
DEFAULT_TIMEOUT_SECONDS = 5.0

_CLOCK_CHECK_EVERY = 128


@dataclass(frozen=True)
class Encoding:
    channel: str
    field: Optional[str] = None
    ftype: FieldType = FieldType.QUANTITATIVE
    aggregate: Optional[str] = None  # sum | count | mean
    bin: bool = False
    sort: Optional[str] = None  # name of the other axis, ascending
    stack: Optional[str] = None  # zero | normalize
    scale: Optional[str] = None  # log (linear stays None)


@dataclass(frozen=True)
class CandidateSpec:
    task: str
    mark: MarkSpec
    encodings: Tuple[Encoding, ...]
    trend: Optional[str] = None
    dataset_id: str = ""


@dataclass(frozen=True)
class EnumerationLimits:
    max_encodings: int = DEFAULT_MAX_ENCODINGS
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    timeout: float = DEFAULT_TIMEOUT_SECONDS

    def __post_init__(self) -> None:
        if self.max_encodings <= 0 or self.max_candidates <= 0 or self.timeout <= 0:
            raise ValueError("enumeration limits must be positive")


@dataclass
class EnumerationResult:
    specs: List[CandidateSpec]
    partial: bool = False


def spec_fields(spec: CandidateSpec) -> Set[str]:
    return {e.field for e in spec.encodings if e.field is not None}


def canonicalize(spec: CandidateSpec) -> str:
    """Total, deterministic identity string. The task is excluded: identity
    is the chart itself, not what it was enumerated for."""
    encs = sorted(
        spec.encodings,
        key=lambda e: (CHANNEL_ORDER.index(e.channel), e.field or ""),
    )
    doc = {
        "mark": spec.mark.base,
        "overlay": spec.mark.overlay,
        "trend": spec.trend,
        "encodings": [
            {
                "channel": e.channel,
                "field": e.field,
                "type": e.ftype.value,
                "aggregate": e.aggregate,
                "bin": e.bin,
                "sort": e.sort,
                "stack": e.stack,
                "scale": e.scale,
            }
            for e in encs
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def column_tokens(dataset: Dataset) -> Dict[str, str]:
    """Rule-language constants for column names, deduplicated; reverse the
    mapping to restore originals at emission."""
    out: Dict[str, str] = {}
    used: Set[str] = set()
    for f in dataset.fields:
        tok = re.sub(r"[^a-z0-9_]", "_", f.name.lower())
        if not tok or not re.match(r"[a-z_]", tok[0]):
            tok = "c_" + tok
        base, i = tok, 2
        while tok in used:
            tok = "%s_%d" % (base, i)
            i += 1
        used.add(tok)
        out[f.name] = tok
    return out


class _Grounder:
    def __init__(self, dataset: Dataset) -> None:
        self.tokens = column_tokens(dataset)
        self.field_atoms: Dict[str, List[Atom]] = {}
        for f in dataset.fields:
            tok = self.tokens[f.name]
            atoms = [atom("cardinality", tok, f.cardinality_bucket())]
            if f.geo_role:
                atoms.append(atom("geo_role", tok, f.geo_role))
            self.field_atoms[f.name] = atoms

    def ground(self, spec: CandidateSpec) -> FrozenSet[Atom]:
        atoms: List[Atom] = [
            atom("task", spec.task),
            atom("mark", spec.mark.base),
            atom("num_encodings", len(spec.encodings)),
        ]
        if spec.mark.overlay:
            atoms.append(atom("overlay", spec.mark.overlay))
        if spec.trend:
            atoms.append(atom("trend", spec.trend))
        seen_fields: Set[str] = set()
        for i, e in enumerate(spec.encodings):
            eid = "e%d" % (i + 1)
            atoms.append(atom("channel", eid, e.channel))
            atoms.append(atom("type", eid, e.ftype.value))
            if e.field is not None:
                atoms.append(atom("field", eid, self.tokens[e.field]))
                seen_fields.add(e.field)
            if e.aggregate:
                atoms.append(atom("aggregate", eid, e.aggregate))
            if e.bin:
                atoms.append(atom("bin", eid))
            if e.sort:
                atoms.append(atom("sort_enc", eid))
            if e.stack:
                atoms.append(atom("stack", eid, e.stack))
            if e.scale:
                atoms.append(atom("scale", eid, e.scale))
        for name in sorted(seen_fields):
            atoms.extend(self.field_atoms[name])
        return frozenset(atoms)


def ground_spec(spec: CandidateSpec, dataset: Dataset) -> FrozenSet[Atom]:
    return _Grounder(dataset).ground(spec)


# ---------------------------------------------------------------------------
# Structural generation

def _legend_ok(channel: str, f: Field) -> bool:
    if channel == "size":
        return f.ftype is FieldType.QUANTITATIVE
    if channel == "shape":
        return f.ftype is FieldType.NOMINAL
    return True


def _legend_assignments(
    channels: Sequence[str], pool: Sequence[Field], max_slots: int
) -> Iterator[Tuple[Tuple[str, Field], ...]]:
    yield ()
    if max_slots < 1:
        return
    for ch in channels:
        for f in pool:
            if _legend_ok(ch, f):
                yield ((ch, f),)
    if max_slots < 2 or len(channels) < 2:
        return
    for ch1, ch2 in itertools.combinations(channels, 2):
        for f1 in pool:
            if not _legend_ok(ch1, f1):
                continue
            for f2 in pool:
                if f2 is f1 or not _legend_ok(ch2, f2):
                    continue
                yield ((ch1, f1), (ch2, f2))


_COUNT = object()  # sentinel: synthetic count slot


def _is_discrete(f: Field, binned: bool) -> bool:
    return binned or f.ftype in DISCRETE_TYPES


def _measure_encoding(encodings: Sequence[Encoding]) -> Optional[Encoding]:
    by_channel = {e.channel: e for e in encodings}
    for ch in ("color", "size", "theta", "y", "x"):
        e = by_channel.get(ch)
        if e is not None and e.ftype is FieldType.QUANTITATIVE and not e.bin:
            return e
    return None


def _finish(
    task: str,
    mark: MarkSpec,
    dataset_id: str,
    encodings: List[Encoding],
    max_encodings: int,
) -> Iterator[CandidateSpec]:
    """Attach overlay mirrors and trend variants, enforce the size bound."""
    if mark.overlay == "line":
        axes = {e.channel: e for e in encodings if e.channel in ("x", "y")}
        for ch in ("x", "y"):
            e = axes.get(ch)
            if (
                e is None
                or e.ftype is not FieldType.QUANTITATIVE
                or e.bin
                or e.aggregate
            ):
                return
    if mark.overlay == "text":
        measure = _measure_encoding(encodings)
        if measure is None:
            return
        encodings = encodings + [
            Encoding(
                channel="text",
                field=measure.field,
                ftype=measure.ftype,
                aggregate=measure.aggregate,
            )
        ]
    if not encodings or len(encodings) > max_encodings:
        return
    ordered = tuple(
        sorted(encodings, key=lambda e: (CHANNEL_ORDER.index(e.channel), e.field or ""))
    )
    if task == "trend":
        for method in TREND_METHODS:
            yield CandidateSpec(task, mark, ordered, trend=method, dataset_id=dataset_id)
    else:
        yield CandidateSpec(task, mark, ordered, trend=None, dataset_id=dataset_id)


def _log_eligible(slots: Sequence[Tuple[str, object]], agg_slot: Optional[str], binned: FrozenSet[str]) -> List[str]:
    out = []
    for ch, f in slots:
        if ch not in ("x", "y") or f is _COUNT:
            continue
        fld: Field = f  # type: ignore[assignment]
        if fld.ftype is not FieldType.QUANTITATIVE or ch in binned or ch == agg_slot:
            continue
        minimum = fld.stats.minimum
        if isinstance(minimum, (int, float)) and minimum > 0:
            out.append(ch)
    return out


def _expand(
    task: str,
    mark: MarkSpec,
    dataset_id: str,
    slots: List[Tuple[str, object]],
    max_encodings: int,
    allow_aggregate: bool,
) -> Iterator[CandidateSpec]:
    """Expand one channel-field skeleton into transform variants."""
    base = mark.base
    count_present = any(f is _COUNT for _, f in slots)
    field_slots = [(ch, f) for ch, f in slots if f is not _COUNT]

    agg_channels = {"x", "y", "theta"}
    if base in ("rect", "geoshape"):
        agg_channels.add("color")

    agg_options: List[Optional[Tuple[str, str]]]
    if count_present:
        agg_options = [None]  # count is already the single aggregate
    elif allow_aggregate:
        agg_options = [None]
        for ch, f in field_slots:
            fld: Field = f  # type: ignore[assignment]
            if ch in agg_channels and fld.ftype is FieldType.QUANTITATIVE:
                for fn in AGG_FUNCS:
                    agg_options.append((ch, fn))
    else:
        agg_options = [None]

    binnable = [
        ch
        for ch, f in field_slots
        if ch in ("x", "y") and f.ftype is FieldType.QUANTITATIVE  # type: ignore[union-attr]
    ]

    for agg in agg_options:
        agg_ch = agg[0] if agg else None
        bin_pool = [ch for ch in binnable if ch != agg_ch]
        for r in range(len(bin_pool) + 1):
            for bin_combo in itertools.combinations(bin_pool, r):
                binned = frozenset(bin_combo)
                if agg or count_present:
                    ok = all(
                        _is_discrete(f, ch in binned)  # type: ignore[arg-type]
                        for ch, f in field_slots
                        if ch != agg_ch
                    )
                    if not ok:
                        continue

                sort_options: List[Optional[str]]
                if task == "sort":
                    sort_options = []
                    by_ch = dict(slots)
                    for axis, other in (("x", "y"), ("y", "x")):
                        f = by_ch.get(axis)
                        partner = by_ch.get(other)
                        if f is None or f is _COUNT or partner is None:
                            continue
                        if f.ftype not in (FieldType.NOMINAL, FieldType.ORDINAL):  # type: ignore[union-attr]
                            continue
                        partner_q = partner is _COUNT or (
                            partner.ftype is FieldType.QUANTITATIVE  # type: ignore[union-attr]
                        )
                        if partner_q:
                            sort_options.append(axis)
                    if not sort_options:
                        continue
                else:
                    sort_options = [None]

                stacked_axis = None
                if base in ("bar", "area") and any(ch == "color" for ch, _ in slots):
                    if count_present:
                        stacked_axis = "y"
                    elif agg_ch in ("x", "y"):
                        stacked_axis = agg_ch
                stack_options: List[Optional[str]] = (
                    ["zero", "normalize"] if stacked_axis else [None]
                )

                log_pool = _log_eligible(slots, agg_ch, binned)

                for sort_axis in sort_options:
                    for stack in stack_options:
                        for lr in range(len(log_pool) + 1):
                            for log_combo in itertools.combinations(log_pool, lr):
                                logs = frozenset(log_combo)
                                encodings: List[Encoding] = []
                                for ch, f in slots:
                                    if f is _COUNT:
                                        encodings.append(
                                            Encoding(
                                                channel=ch,
                                                field=None,
                                                ftype=FieldType.QUANTITATIVE,
                                                aggregate="count",
                                                stack=stack if ch == stacked_axis else None,
                                            )
                                        )
                                        continue
                                    fld = f  # type: ignore[assignment]
                                    encodings.append(
                                        Encoding(
                                            channel=ch,
                                            field=fld.name,
                                            ftype=fld.ftype,
                                            aggregate=agg[1] if agg and ch == agg_ch else None,
                                            bin=ch in binned,
                                            sort=(
                                                ("y" if ch == "x" else "x")
                                                if sort_axis == ch
                                                else None
                                            ),
                                            stack=stack if ch == stacked_axis else None,
                                            scale="log" if ch in logs else None,
                                        )
                                    )
                                yield from _finish(
                                    task, mark, dataset_id, encodings, max_encodings
                                )


def _plain_skeletons(
    fields: Sequence[Field], allow_count: bool, max_encodings: int, mark: MarkSpec
) -> Iterator[List[Tuple[str, object]]]:
    mirror_slot = 1 if mark.overlay == "text" else 0
    for xf in fields:
        axis_sets: List[List[Tuple[str, object]]] = [[("x", xf)]]
        for yf in fields:
            if yf is not xf:
                axis_sets.append([("x", xf), ("y", yf)])
        if allow_count:
            axis_sets.append([("x", xf), ("y", _COUNT)])
        for axes in axis_sets:
            used = {f for _, f in axes if f is not _COUNT}
            pool = [f for f in fields if f not in used]
            room = max_encodings - mirror_slot - len(axes)
            if room < 0:
                continue
            for legends in _legend_assignments(LEGEND_CHANNELS, pool, min(2, room)):
                yield axes + list(legends)


def _arc_skeletons(
    fields: Sequence[Field], allow_count: bool
) -> Iterator[List[Tuple[str, object]]]:
    theta_choices: List[object] = [
        f for f in fields if f.ftype is FieldType.QUANTITATIVE
    ]
    if allow_count:
        theta_choices.append(_COUNT)
    for tf in theta_choices:
        for cf in fields:
            if cf is tf:
                continue
            yield [("theta", tf), ("color", cf)]


def _geoshape_skeletons(fields: Sequence[Field]) -> Iterator[List[Tuple[str, object]]]:
    for rf in fields:
        if rf.ftype is not FieldType.NOMINAL:
            continue
        yield [("shape", rf)]
        for cf in fields:
            if cf is not rf:
                yield [("shape", rf), ("color", cf)]


def _circle_skeletons(
    fields: Sequence[Field], max_encodings: int
) -> Iterator[List[Tuple[str, object]]]:
    quant = [f for f in fields if f.ftype is FieldType.QUANTITATIVE]
    for lat in quant:
        for lon in quant:
            if lon is lat:
                continue
            axes: List[Tuple[str, object]] = [("latitude", lat), ("longitude", lon)]
            pool = [f for f in fields if f is not lat and f is not lon]
            room = max_encodings - 1 - len(axes)  # text mirror reserves a slot
            if room < 0:
                continue
            for legends in _legend_assignments(("color", "size"), pool, min(2, room)):
                yield axes + list(legends)


def _structural_candidates(
    task: str,
    mark: MarkSpec,
    fields: Sequence[Field],
    dataset_id: str,
    max_encodings: int,
) -> Iterator[CandidateSpec]:
    allow_agg = aggregation_allowed(task)
    base = mark.base
    if base == "arc":
        skeletons: Iterable[List[Tuple[str, object]]] = _arc_skeletons(fields, allow_agg)
    elif base == "geoshape":
        skeletons = _geoshape_skeletons(fields)
    elif base == "circle":
        skeletons = _circle_skeletons(fields, max_encodings)
    else:
        skeletons = _plain_skeletons(fields, allow_agg, max_encodings, mark)
    for slots in skeletons:
        yield from _expand(task, mark, dataset_id, slots, max_encodings, allow_agg)


# ---------------------------------------------------------------------------
# Rule filtering

def _constraint_applies(constraint, task: str, mark: MarkSpec) -> bool:
    """Drop constraints that can never fire for this task/mark combination.

    Sound because every candidate for the combination grounds exactly one
    task atom, one mark atom, and at most one overlay atom.
    """
    for lit in constraint.body:
        a = lit.atom
        holds: Optional[bool] = None
        if a.predicate == "task" and a.arity == 1 and a.is_ground():
            holds = a.args[0] == make_term(task)
        elif a.predicate == "mark" and a.arity == 1 and a.is_ground():
            holds = a.args[0] == make_term(mark.base)
        elif a.predicate == "overlay" and a.arity == 1:
            if a.is_ground():
                holds = mark.overlay is not None and a.args[0] == make_term(mark.overlay)
            elif not lit.negated:
                holds = mark.overlay is not None
                if holds:
                    continue  # variable binds but tells us nothing more
        if holds is None:
            continue
        if lit.negated and holds:
            return False
        if not lit.negated and not holds:
            return False
    return True


def enumerate_candidates(
    dataset: Dataset,
    columns: Sequence[str],
    task: str,
    ruleset: RuleSet,
    limits: Optional[EnumerationLimits] = None,
) -> EnumerationResult:
    """All admissible candidates for (dataset, columns, task), canonically
    ordered: marks in task-table priority order, canonical string within a
    mark. Truncation by any limit flags the result as partial."""
    if limits is None:
        limits = EnumerationLimits()
    if task == "filter":
        raise TaskError("the filter task is resolved during preprocessing, not enumerated")
    descriptor(task)  # validates the task name

    if columns:
        known = set(dataset.field_names)
        for c in columns:
            if c not in known:
                raise DataError("unknown column: %r" % c)
        wanted = set(columns)
        fields = [f for f in dataset.fields if f.name in wanted]
    else:
        fields = list(dataset.fields)
    if not fields:
        return EnumerationResult([], False)

    grounder = _Grounder(dataset)
    deadline = time.monotonic() + limits.timeout
    out: List[CandidateSpec] = []
    partial = False
    clock = 0

    for mark in marks_for_task(task):
        if partial or len(out) >= limits.max_candidates:
            if len(out) >= limits.max_candidates:
                partial = True
            break
        constraints = [
            c for c in ruleset.constraints if _constraint_applies(c, task, mark)
        ]
        pruned = RuleSet(ruleset.facts, tuple(constraints))
        admissible: List[CandidateSpec] = []
        for candidate in _structural_candidates(
            task, mark, fields, dataset.id, limits.max_encodings
        ):
            clock += 1
            if clock % _CLOCK_CHECK_EVERY == 0 and time.monotonic() > deadline:
                partial = True
                break
            if check(grounder.ground(candidate), pruned):
                continue
            admissible.append(candidate)
        admissible.sort(key=canonicalize)
        room = limits.max_candidates - len(out)
        if len(admissible) > room:
            partial = True
            admissible = admissible[:room]
        out.extend(admissible)

    return EnumerationResult(out, partial)
