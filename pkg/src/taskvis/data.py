"""Tabular data loading, field type inference, overrides, and filters."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

# Cells equal to one of these (case-insensitive, after strip) are nulls.
NULL_MARKERS = {"", "na", "null"}

# Inference ladder tuning.
TYPE_SHARE = 0.95
ORDINAL_MAX_DISTINCT = 12
ORDINAL_MIN_DISTINCT = 3  # a two-valued integer column reads as plain numbers
ORDINAL_MAX_SPAN = 50
# Bare 4-digit integers are years only inside this window; otherwise columns
# of 4-digit measures (weights, prices) would turn temporal.
YEAR_MIN = 1700
YEAR_MAX = 2199

DEFAULT_MAX_ROWS = 1_000_000

# Distinct-count buckets used by the rule vocabulary.
CARDINALITY_LOW_MAX = 10
CARDINALITY_MEDIUM_MAX = 50

_INT_RE = re.compile(r"[+-]?\d+$")
_NUM_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_YEAR_RE = re.compile(r"\d{4}$")

_LAT_NAMES = {"lat", "latitude"}
_LON_NAMES = {"lon", "lng", "longitude"}
_REGION_NAMES = {"state", "country", "region"}

Cell = Union[int, float, str, None]


class DataError(ValueError):
    """Invalid request against a dataset (bad field, bad conversion...)."""


class IngestionError(DataError):
    """Input bytes could not be turned into a dataset."""


class FieldType(str, Enum):
    QUANTITATIVE = "quantitative"
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    TEMPORAL = "temporal"


GEO_ROLES = ("latitude", "longitude", "region")


@dataclass(frozen=True)
class FieldStats:
    cardinality: int
    null_count: int
    minimum: Optional[Union[int, float, str]] = None
    maximum: Optional[Union[int, float, str]] = None


@dataclass(frozen=True)
class Field:
    name: str
    ftype: FieldType
    inferred: bool = True
    stats: FieldStats = field(default_factory=lambda: FieldStats(0, 0))
    geo_role: Optional[str] = None

    def cardinality_bucket(self) -> str:
        if self.stats.cardinality <= CARDINALITY_LOW_MAX:
            return "low"
        if self.stats.cardinality <= CARDINALITY_MEDIUM_MAX:
            return "medium"
        return "high"


@dataclass
class Dataset:
    """Immutable after construction; operations return new values."""

    id: str
    fields: List[Field]
    rows: List[Dict[str, Cell]]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def field_names(self) -> List[str]:
        return [f.name for f in self.fields]

    def field_named(self, name: str) -> Field:
        for f in self.fields:
            if f.name == name:
                return f
        raise DataError("unknown field: %r" % name)


@dataclass(frozen=True)
class FilterPredicate:
    field: str
    op: str  # eq | neq | lt | le | gt | ge | in | between
    operands: Tuple[Cell, ...]


_OP_ARITY = {"eq": 1, "neq": 1, "lt": 1, "le": 1, "gt": 1, "ge": 1, "between": 2}


def is_null(cell: object) -> bool:
    if cell is None:
        return True
    if isinstance(cell, str):
        return cell.strip().lower() in NULL_MARKERS
    return False


def parse_number(cell: str) -> Optional[Union[int, float]]:
    s = cell.strip()
    if _INT_RE.fullmatch(s):
        return int(s)
    if _NUM_RE.fullmatch(s):
        return float(s)
    return None


def parse_temporal(cell: str) -> Optional[datetime]:
    s = cell.strip()
    if _YEAR_RE.fullmatch(s):
        year = int(s)
        if YEAR_MIN <= year <= YEAR_MAX:
            return datetime(year, 1, 1)
        return None
    try:
        parsed = datetime.fromisoformat(s.replace("Z", "+00:00"))
        return parsed.replace(tzinfo=None)
    except ValueError:
        pass
    try:
        d = date.fromisoformat(s)
        return datetime(d.year, d.month, d.day)
    except ValueError:
        return None


def infer_field_type(values: Sequence[object]) -> FieldType:
    """Decision ladder: temporal, then quantitative/ordinal, else nominal.

    Ordinal is carved out of the numeric case: all-integer columns with few
    distinct values spanning a narrow range behave like ranked categories
    (cylinder counts, star ratings), not measures.
    """
    cells = [str(v).strip() for v in values if not is_null(v)]
    if not cells:
        raise DataError("cannot infer a type from all-null values")
    n = len(cells)

    temporal_hits = sum(1 for c in cells if parse_temporal(c) is not None)
    if temporal_hits / n >= TYPE_SHARE:
        return FieldType.TEMPORAL

    numbers = [parse_number(c) for c in cells]
    hits = [x for x in numbers if x is not None]
    if len(hits) / n >= TYPE_SHARE:
        all_ints = all(_INT_RE.fullmatch(c) for c, x in zip(cells, numbers) if x is not None)
        if all_ints and hits:
            distinct = set(hits)
            span = max(hits) - min(hits)
            if (
                ORDINAL_MIN_DISTINCT <= len(distinct) <= ORDINAL_MAX_DISTINCT
                and span <= ORDINAL_MAX_SPAN
            ):
                return FieldType.ORDINAL
        return FieldType.QUANTITATIVE

    return FieldType.NOMINAL


def _type_cell(raw: object, ftype: FieldType) -> Cell:
    """Coerce one raw cell to the field type; unparseable cells become null."""
    if is_null(raw):
        return None
    s = str(raw).strip()
    if ftype is FieldType.QUANTITATIVE:
        return parse_number(s)
    if ftype is FieldType.TEMPORAL:
        return s if parse_temporal(s) is not None else None
    if ftype is FieldType.ORDINAL:
        if _INT_RE.fullmatch(s):
            return int(s)
        return s
    return s


def _compute_stats(values: Sequence[Cell], ftype: FieldType) -> FieldStats:
    present = [v for v in values if v is not None]
    nulls = len(values) - len(present)
    cardinality = len(set(present))
    minimum: Optional[Union[int, float, str]] = None
    maximum: Optional[Union[int, float, str]] = None
    if present and ftype is FieldType.QUANTITATIVE:
        minimum = min(present)
        maximum = max(present)
    elif present and ftype is FieldType.TEMPORAL:
        parsed = [(parse_temporal(str(v)), v) for v in present]
        parsed = [(p, v) for p, v in parsed if p is not None]
        if parsed:
            minimum = min(parsed)[1]
            maximum = max(parsed)[1]
    return FieldStats(cardinality, nulls, minimum, maximum)


def _detect_geo_role(name: str, ftype: FieldType) -> Optional[str]:
    lowered = name.strip().lower()
    if lowered in _LAT_NAMES and ftype is FieldType.QUANTITATIVE:
        return "latitude"
    if lowered in _LON_NAMES and ftype is FieldType.QUANTITATIVE:
        return "longitude"
    if lowered in _REGION_NAMES and ftype is FieldType.NOMINAL:
        return "region"
    return None


def _parse_csv(text: str) -> Tuple[List[str], List[List[str]]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestionError("empty input: no header row")
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise IngestionError("blank column name in header")
    if len(set(header)) != len(header):
        raise IngestionError("duplicate column names in header")
    rows = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise IngestionError(
                "row %d has %d cells, expected %d" % (i, len(row), len(header))
            )
        rows.append(row)
    return header, rows


def _parse_records(doc: object) -> Tuple[List[str], List[List[object]]]:
    if not isinstance(doc, list):
        raise IngestionError("record-array document must be a top-level array")
    header: List[str] = []
    rows: List[List[object]] = []
    for i, record in enumerate(doc, start=1):
        if not isinstance(record, dict):
            raise IngestionError("record %d is not an object" % i)
        for key, value in record.items():
            if isinstance(value, (dict, list)):
                raise IngestionError("record %d has a nested value at %r" % (i, key))
            if key not in header:
                header.append(key)
        rows.append(record)  # type: ignore[arg-type]
    return header, [[rec.get(k) for k in header] for rec in rows]  # type: ignore[union-attr]


def load_dataset(
    source: Union[bytes, str],
    format_hint: Optional[str] = None,
    dataset_id: Optional[str] = None,
    max_rows: int = DEFAULT_MAX_ROWS,
) -> Dataset:
    """Build a typed Dataset from CSV bytes or a JSON array of flat records."""
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise IngestionError("undecodable bytes: %s" % exc)
    else:
        text = source

    fmt = format_hint
    if fmt is None:
        fmt = "json" if text.lstrip()[:1] in ("[",) else "csv"
    if fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestionError("invalid record-array document: %s" % exc)
        header, raw_rows = _parse_records(doc)
    elif fmt == "csv":
        header, raw_rows = _parse_csv(text)
    else:
        raise IngestionError("unknown format hint: %r" % fmt)

    if not raw_rows:
        raise IngestionError("empty dataset: no data rows")
    if len(raw_rows) > max_rows:
        raise IngestionError("too many rows: %d > %d" % (len(raw_rows), max_rows))

    columns = list(zip(*raw_rows))
    fields: List[Field] = []
    typed_columns: List[List[Cell]] = []
    for name, column in zip(header, columns):
        if all(is_null(c) for c in column):
            ftype = FieldType.NOMINAL
        else:
            ftype = infer_field_type(column)
        typed = [_type_cell(c, ftype) for c in column]
        stats = _compute_stats(typed, ftype)
        fields.append(
            Field(
                name=name,
                ftype=ftype,
                inferred=True,
                stats=stats,
                geo_role=_detect_geo_role(name, ftype),
            )
        )
        typed_columns.append(typed)

    rows = [
        {f.name: typed_columns[j][i] for j, f in enumerate(fields)}
        for i in range(len(raw_rows))
    ]
    if dataset_id is None:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        dataset_id = "ds-" + digest[:12]
    return Dataset(id=dataset_id, fields=fields, rows=rows)


def override_field_type(dataset: Dataset, field_name: str, ftype: FieldType) -> Dataset:
    """Retype one field; the new dataset carries inferred=False for it."""
    current = dataset.field_named(field_name)
    if current.ftype is ftype:
        return dataset

    converted: List[Cell] = []
    for i, row in enumerate(dataset.rows):
        raw = row[field_name]
        if raw is None:
            converted.append(None)
            continue
        cell = _type_cell(raw, ftype)
        if cell is None:
            raise DataError(
                "cannot convert %r (row %d) of field %r to %s"
                % (raw, i + 1, field_name, ftype.value)
            )
        converted.append(cell)

    geo_role = current.geo_role
    if geo_role in ("latitude", "longitude") and ftype is not FieldType.QUANTITATIVE:
        geo_role = None
    if geo_role == "region" and ftype is not FieldType.NOMINAL:
        geo_role = None

    new_field = Field(
        name=field_name,
        ftype=ftype,
        inferred=False,
        stats=_compute_stats(converted, ftype),
        geo_role=geo_role,
    )
    fields = [new_field if f.name == field_name else f for f in dataset.fields]
    rows = [
        {**row, field_name: converted[i]} for i, row in enumerate(dataset.rows)
    ]
    return Dataset(id=dataset.id, fields=fields, rows=rows)


def set_geo_role(dataset: Dataset, field_name: str, role: Optional[str]) -> Dataset:
    current = dataset.field_named(field_name)
    if role is not None:
        if role not in GEO_ROLES:
            raise DataError("unknown geo role: %r" % role)
        if role in ("latitude", "longitude") and current.ftype is not FieldType.QUANTITATIVE:
            raise DataError("%s role requires a quantitative field" % role)
        if role == "region" and current.ftype is not FieldType.NOMINAL:
            raise DataError("region role requires a nominal field")
    new_field = Field(
        name=current.name,
        ftype=current.ftype,
        inferred=current.inferred,
        stats=current.stats,
        geo_role=role,
    )
    fields = [new_field if f.name == field_name else f for f in dataset.fields]
    return Dataset(id=dataset.id, fields=fields, rows=dataset.rows)


def _coerce_operand(value: Cell, ftype: FieldType) -> Cell:
    if value is None:
        raise DataError("filter operands may not be null")
    if ftype is FieldType.QUANTITATIVE:
        if isinstance(value, (int, float)):
            return value
        parsed = parse_number(str(value))
        if parsed is None:
            raise DataError("operand %r does not match quantitative field" % (value,))
        return parsed
    if ftype is FieldType.TEMPORAL:
        if parse_temporal(str(value)) is None:
            raise DataError("operand %r does not match temporal field" % (value,))
        return str(value)
    if ftype is FieldType.ORDINAL:
        return _type_cell(value, FieldType.ORDINAL)
    return str(value)


def _comparison_key(cell: Cell, ftype: FieldType) -> object:
    if ftype is FieldType.TEMPORAL:
        return parse_temporal(str(cell))
    return cell


def _matches(cell: Cell, pred: FilterPredicate, ftype: FieldType, operands: Tuple[Cell, ...]) -> bool:
    if cell is None:
        return False
    key = _comparison_key(cell, ftype)
    ops = [_comparison_key(o, ftype) for o in operands]
    try:
        if pred.op == "eq":
            return key == ops[0]
        if pred.op == "neq":
            return key != ops[0]
        if pred.op == "lt":
            return key < ops[0]
        if pred.op == "le":
            return key <= ops[0]
        if pred.op == "gt":
            return key > ops[0]
        if pred.op == "ge":
            return key >= ops[0]
        if pred.op == "in":
            return key in ops
        if pred.op == "between":
            return ops[0] <= key <= ops[1]
    except TypeError:
        return False
    raise DataError("unknown filter op: %r" % pred.op)


def apply_filters(dataset: Dataset, predicates: Sequence[FilterPredicate]) -> Dataset:
    """Keep rows satisfying the conjunction of all predicates."""
    if not predicates:
        return dataset

    checked: List[Tuple[FilterPredicate, FieldType, Tuple[Cell, ...]]] = []
    for pred in predicates:
        f = dataset.field_named(pred.field)
        expected = _OP_ARITY.get(pred.op)
        if pred.op == "in":
            if len(pred.operands) < 1:
                raise DataError("in filter needs at least one operand")
        elif expected is None:
            raise DataError("unknown filter op: %r" % pred.op)
        elif len(pred.operands) != expected:
            raise DataError(
                "%s filter needs %d operand(s), got %d"
                % (pred.op, expected, len(pred.operands))
            )
        operands = tuple(_coerce_operand(v, f.ftype) for v in pred.operands)
        checked.append((pred, f.ftype, operands))

    rows = [
        row
        for row in dataset.rows
        if all(_matches(row[p.field], p, ft, ops) for p, ft, ops in checked)
    ]
    fields = [
        Field(
            name=f.name,
            ftype=f.ftype,
            inferred=f.inferred,
            stats=_compute_stats([r[f.name] for r in rows], f.ftype),
            geo_role=f.geo_role,
        )
        for f in dataset.fields
    ]
    return Dataset(id=dataset.id, fields=fields, rows=rows)
