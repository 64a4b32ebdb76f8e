import pytest

from taskvis.data import FieldType
from taskvis.enumerator import (
    CandidateSpec,
    Encoding,
    EnumerationLimits,
    enumerate_candidates,
)
from taskvis.rules import load_rules
from taskvis.tasks import marks_for_task
from taskvis.vegalite import (
    SCHEMA_V4,
    SCHEMA_V5,
    EmissionError,
    default_map_url,
    to_vegalite,
)

WIDE = EnumerationLimits(max_candidates=100000, timeout=120.0)


def _first_error(validator, doc):
    for err in validator.iter_errors(doc):
        return "%s: %s" % (list(err.absolute_path), err.message[:200])
    return None


def _emit_all(ds, cols, task, cap=40, **kw):
    specs = enumerate_candidates(ds, cols, task, load_rules(task), WIDE).specs[:cap]
    assert specs
    return [(s, to_vegalite(s, ds, **kw)) for s in specs]


# ---------------------------------------------------------------------------
# schema validity across mark families

SWEEPS = [
    ("cars", ["Cylinders", "Horsepower", "Origin"], "sort"),
    ("cars", ["Cylinders", "Horsepower", "Origin"], "comparison"),
    ("cars", ["Horsepower", "Miles_per_Gallon"], "trend"),
    ("cars", ["Cylinders", "Horsepower", "Origin"], "deviation"),
    ("cars", ["Cylinders", "Horsepower", "Origin"], "retrieve_value"),
    ("cars", ["Year", "Miles_per_Gallon", "Origin"], "change_over_time"),
    ("cars", ["Cylinders", "Horsepower"], "characterize_distribution"),
    ("covid", ["state", "latitude", "longitude"], "spatial"),
    ("covid", ["state", "confirmed"], "part_to_whole"),
    ("hollywood", ["Genre", "Worldwide_Gross", "Lead_Studio"], "error_range"),
]


@pytest.mark.parametrize("name,cols,task", SWEEPS, ids=lambda v: v if isinstance(v, str) else "-".join(v))
def test_emissions_validate_against_schema(name, cols, task, request, vl_validator):
    ds = request.getfixturevalue(name)
    for spec, doc in _emit_all(ds, cols, task, data_url="data.csv", data_format="csv"):
        problem = _first_error(vl_validator, doc)
        assert problem is None, "%s: %s" % (task, problem)


def test_inline_data_validates(hollywood, vl_validator):
    for spec, doc in _emit_all(hollywood, ["Genre", "Worldwide_Gross"], "magnitude", cap=10):
        assert _first_error(vl_validator, doc) is None
        assert doc["data"]["values"]
        assert len(doc["data"]["values"]) == hollywood.row_count


# ---------------------------------------------------------------------------
# document skeleton

def test_schema_version_strings(cars):
    specs = enumerate_candidates(
        cars, ["Origin"], "magnitude", load_rules("magnitude"), WIDE
    ).specs
    doc5 = to_vegalite(specs[0], cars)
    doc4 = to_vegalite(specs[0], cars, schema_version="v4")
    assert doc5["$schema"] == SCHEMA_V5 == "https://vega.github.io/schema/vega-lite/v5.json"
    assert doc4["$schema"] == SCHEMA_V4 == "./vega-lite/v4.json"
    with pytest.raises(EmissionError):
        to_vegalite(specs[0], cars, schema_version="v6")


def test_data_url_block(cars):
    spec = enumerate_candidates(
        cars, ["Origin"], "magnitude", load_rules("magnitude"), WIDE
    ).specs[0]
    doc = to_vegalite(spec, cars, data_url="data.csv", data_format="csv")
    assert doc["data"] == {"url": "data.csv", "format": {"type": "csv"}}
    bare = to_vegalite(spec, cars, data_url="table.json")
    assert bare["data"] == {"url": "table.json"}


def test_count_channel_has_no_field(cars):
    spec = CandidateSpec(
        task="magnitude",
        mark=marks_for_task("magnitude")[0],
        encodings=(
            Encoding("x", "Origin", FieldType.NOMINAL),
            Encoding("y", None, FieldType.QUANTITATIVE, aggregate="count"),
        ),
    )
    doc = to_vegalite(spec, cars, data_url="d.csv")
    y = doc["encoding"]["y"]
    assert y == {"aggregate": "count", "type": "quantitative"}


def test_transform_attributes_round_through(cars):
    spec = CandidateSpec(
        task="sort",
        mark=marks_for_task("sort")[0],
        encodings=(
            Encoding("x", "Cylinders", FieldType.ORDINAL, sort="y"),
            Encoding("y", "Horsepower", FieldType.QUANTITATIVE, aggregate="sum", stack="zero"),
            Encoding("color", "Origin", FieldType.NOMINAL),
        ),
    )
    doc = to_vegalite(spec, cars, data_url="d.csv")
    assert doc["mark"] == "bar"
    assert doc["encoding"]["x"] == {"field": "Cylinders", "type": "ordinal", "sort": "y"}
    assert doc["encoding"]["y"] == {
        "field": "Horsepower", "type": "quantitative", "aggregate": "sum", "stack": "zero",
    }
    assert doc["encoding"]["color"] == {"field": "Origin", "type": "nominal"}


def test_bin_and_log_blocks(cars):
    spec = CandidateSpec(
        task="characterize_distribution",
        mark=marks_for_task("characterize_distribution")[0],
        encodings=(
            Encoding("x", "Horsepower", FieldType.QUANTITATIVE, bin=True),
            Encoding("y", "Weight_in_lbs", FieldType.QUANTITATIVE, scale="log"),
        ),
    )
    doc = to_vegalite(spec, cars, data_url="d.csv")
    assert doc["encoding"]["x"]["bin"] is True
    assert doc["encoding"]["y"]["scale"] == {"type": "log"}


# ---------------------------------------------------------------------------
# maps

def test_geoshape_lookup_structure(covid, vl_validator):
    specs = [
        s
        for s in enumerate_candidates(
            covid, ["state", "confirmed"], "spatial", load_rules("spatial"), WIDE
        ).specs
        if s.mark.base == "geoshape"
    ]
    assert specs
    for spec in specs:
        doc = to_vegalite(spec, covid, data_url="data.csv", data_format="csv")
        assert doc["projection"] == {"type": "albersUsa"}
        assert doc["mark"] == "geoshape"
        (lookup,) = doc["transform"]
        assert lookup["lookup"] == "state"
        assert lookup["as"] == "geo"
        assert lookup["from"]["key"] == "properties.name"
        assert lookup["from"]["data"]["format"] == {"type": "topojson", "feature": "states"}
        assert doc["encoding"]["shape"] == {"field": "geo", "type": "geojson"}
        assert _first_error(vl_validator, doc) is None


def test_map_url_override(covid, monkeypatch):
    spec = next(
        s
        for s in enumerate_candidates(
            covid, ["state"], "spatial", load_rules("spatial"), WIDE
        ).specs
        if s.mark.base == "geoshape"
    )
    doc = to_vegalite(spec, covid, data_url="d.csv", map_url="https://example.com/us.json")
    assert doc["transform"][0]["from"]["data"]["url"] == "https://example.com/us.json"
    monkeypatch.setenv("TASKVIS_MAP_FILE", "/tmp/override.topo.json")
    assert default_map_url() == "/tmp/override.topo.json"
    doc = to_vegalite(spec, covid, data_url="d.csv")
    assert doc["transform"][0]["from"]["data"]["url"] == "/tmp/override.topo.json"


def test_packaged_map_is_topojson():
    import json

    path = default_map_url()
    with open(path, "r", encoding="utf-8") as fh:
        topo = json.load(fh)
    assert topo["type"] == "Topology"
    names = [
        g["properties"]["name"] for g in topo["objects"]["states"]["geometries"]
    ]
    assert "California" in names and len(names) >= 10


def test_circle_map_gets_projection(covid, vl_validator):
    specs = [
        s
        for s in enumerate_candidates(
            covid, ["latitude", "longitude", "deaths"], "spatial", load_rules("spatial"), WIDE
        ).specs
        if s.mark.base == "circle"
    ]
    assert specs
    for spec in specs:
        doc = to_vegalite(spec, covid, data_url="d.csv")
        assert doc["projection"] == {"type": "albersUsa"}
        encoding = doc["layer"][0]["encoding"] if "layer" in doc else doc["encoding"]
        assert set(encoding) >= {"latitude", "longitude"}
        assert _first_error(vl_validator, doc) is None


# ---------------------------------------------------------------------------
# overlays

def test_text_overlay_layers(cars, vl_validator):
    specs = [
        s
        for s in enumerate_candidates(
            cars, ["Cylinders", "Horsepower"], "retrieve_value",
            load_rules("retrieve_value"), WIDE,
        ).specs
        if s.mark.overlay == "text"
    ]
    assert specs
    for spec in specs:
        doc = to_vegalite(spec, cars, data_url="d.csv")
        assert len(doc["layer"]) == 2
        base, label = doc["layer"]
        assert label["mark"] == "text"
        assert "text" not in base["encoding"]
        assert "text" in label["encoding"]
        for ch in label["encoding"]:
            assert ch in ("x", "y", "theta", "latitude", "longitude", "text")
        assert _first_error(vl_validator, doc) is None


def test_text_overlay_requires_text_encoding(cars):
    mark = next(m for m in marks_for_task("retrieve_value") if m.overlay == "text")
    spec = CandidateSpec(
        task="retrieve_value",
        mark=mark,
        encodings=(Encoding("x", "Origin", FieldType.NOMINAL),),
    )
    with pytest.raises(EmissionError):
        to_vegalite(spec, cars, data_url="d.csv")


def test_rule_overlay_marks_zero(cars, vl_validator):
    specs = [
        s
        for s in enumerate_candidates(
            cars, ["Cylinders", "Horsepower"], "deviation", load_rules("deviation"), WIDE
        ).specs
        if s.mark.overlay == "rule"
    ]
    assert specs
    for spec in specs:
        doc = to_vegalite(spec, cars, data_url="d.csv")
        base, rule = doc["layer"]
        assert rule["mark"] == "rule"
        (axis, block), = rule["encoding"].items()
        assert axis in ("x", "y")
        assert block == {"datum": 0}
        by_ch = {e.channel: e for e in spec.encodings}
        if "y" in by_ch and by_ch["y"].ftype is FieldType.QUANTITATIVE:
            assert axis == "y"
        assert _first_error(vl_validator, doc) is None


def test_line_overlay_trend_transform(cars, vl_validator):
    specs = enumerate_candidates(
        cars, ["Horsepower", "Miles_per_Gallon", "Origin"], "trend", load_rules("trend"), WIDE
    ).specs
    assert specs
    for spec in specs:
        doc = to_vegalite(spec, cars, data_url="d.csv")
        base, line = doc["layer"]
        assert line["mark"] == "line"
        (transform,) = line["transform"]
        method = spec.trend
        by_ch = {e.channel: e for e in spec.encodings}
        assert transform[method] == by_ch["y"].field
        assert transform["on"] == by_ch["x"].field
        legends = [e.field for e in spec.encodings if e.channel in ("color", "size", "shape")]
        if legends:
            assert transform["groupby"] == legends
            assert "color" in line["encoding"] or "color" not in by_ch
        else:
            assert "groupby" not in transform
        assert set(line["encoding"]) <= {"x", "y", "color"}
        assert _first_error(vl_validator, doc) is None


def test_line_overlay_requires_trend(cars):
    mark = next(m for m in marks_for_task("trend") if m.overlay == "line")
    spec = CandidateSpec(
        task="trend",
        mark=mark,
        encodings=(
            Encoding("x", "Horsepower", FieldType.QUANTITATIVE),
            Encoding("y", "Miles_per_Gallon", FieldType.QUANTITATIVE),
        ),
        trend=None,
    )
    with pytest.raises(EmissionError):
        to_vegalite(spec, cars, data_url="d.csv")
