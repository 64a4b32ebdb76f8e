import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taskvis.data import (
    DataError,
    FieldType,
    FilterPredicate,
    apply_filters,
    infer_field_type,
    is_null,
    load_dataset,
    override_field_type,
    parse_number,
    parse_temporal,
    set_geo_role,
)
from oracles import naive_filter


# ---------------------------------------------------------------------------
# type inference ladder

def test_numeric_strings_are_quantitative():
    ds = load_dataset("a\n1\n2\n")
    assert ds.fields[0].ftype is FieldType.QUANTITATIVE


def test_small_int_domain_is_ordinal():
    assert infer_field_type(["3", "4", "6", "8"]) is FieldType.ORDINAL


def test_two_distinct_ints_stay_quantitative():
    # below the minimum distinct count for an ordinal reading
    assert infer_field_type(["1", "2", "1", "2"]) is FieldType.QUANTITATIVE


def test_wide_span_ints_are_quantitative():
    assert infer_field_type(["1", "30", "90", "200"]) is FieldType.QUANTITATIVE


def test_floats_never_ordinal():
    assert infer_field_type(["1.5", "2.5", "3.5"]) is FieldType.QUANTITATIVE


def test_iso_dates_are_temporal():
    assert infer_field_type(["2020-01-01", "2020-02-01", "2020-03-01"]) is FieldType.TEMPORAL


def test_bare_years_are_temporal():
    assert infer_field_type(["2007", "2008", "2010", "2011"]) is FieldType.TEMPORAL


def test_four_digit_measures_not_temporal():
    # car weights: four digits but outside a plausible year window
    values = ["3504", "3693", "4341", "2372", "1613", "5140"]
    assert infer_field_type(values) is FieldType.QUANTITATIVE


def test_text_is_nominal():
    assert infer_field_type(["USA", "Europe", "Japan"]) is FieldType.NOMINAL


def test_mixed_below_share_threshold_is_nominal():
    values = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10",
              "1", "2", "3", "4", "5", "6", "7", "8", "x", "y"]
    assert infer_field_type(values) is FieldType.NOMINAL


def test_nulls_ignored_for_inference():
    assert infer_field_type(["", "NA", "null", "1.5", "2.5"]) is FieldType.QUANTITATIVE


def test_all_null_column_nominal():
    ds = load_dataset("a,b\nNA,1\n,2\nnull,3\n")
    assert ds.fields[0].ftype is FieldType.NOMINAL
    assert ds.fields[0].stats.null_count == 3


def test_null_markers():
    assert is_null("")
    assert is_null("NA")
    assert is_null("na")
    assert is_null("NULL")
    assert is_null(None)
    assert not is_null("0")
    assert not is_null("none")


# ---------------------------------------------------------------------------
# parsing helpers

def test_parse_number_int_vs_float():
    assert parse_number("42") == 42
    assert isinstance(parse_number("42"), int)
    assert parse_number("42.5") == 42.5
    assert parse_number("-3e2") == -300.0
    assert parse_number("abc") is None
    assert parse_number("") is None


def test_parse_temporal_variants():
    assert parse_temporal("2020-03-01") is not None
    assert parse_temporal("2020-03-01T10:20:30") is not None
    assert parse_temporal("2020-03-01T10:20:30Z") is not None
    assert parse_temporal("1999") is not None
    assert parse_temporal("1492") is None  # outside the year window
    assert parse_temporal("nonsense") is None


# ---------------------------------------------------------------------------
# loading

def test_load_csv_basics(cars):
    assert cars.row_count == 406
    assert len(cars.fields) == 9
    by_type = {}
    for f in cars.fields:
        by_type[f.ftype.value] = by_type.get(f.ftype.value, 0) + 1
    assert by_type == {"quantitative": 5, "nominal": 2, "ordinal": 1, "temporal": 1}


def test_content_hash_id_stable():
    a = load_dataset("a,b\n1,x\n")
    b = load_dataset("a,b\n1,x\n")
    c = load_dataset("a,b\n2,x\n")
    assert a.id == b.id
    assert a.id != c.id
    assert a.id.startswith("ds-")


def test_explicit_id_wins():
    ds = load_dataset("a\n1\n", dataset_id="mine")
    assert ds.id == "mine"


def test_json_records():
    doc = json.dumps([{"a": 1, "b": "x"}, {"a": 2, "b": "y"}, {"a": 300}])
    ds = load_dataset(doc)
    assert ds.field_names == ["a", "b"]
    assert ds.rows[2]["b"] is None
    assert ds.fields[0].ftype is FieldType.QUANTITATIVE


def test_json_sniffing_without_hint():
    ds = load_dataset('  [{"a": 1}] ')
    assert ds.field_names == ["a"]


def test_format_hint_overrides_sniffing():
    with pytest.raises(DataError):
        load_dataset('[{"a": 1}]', format_hint="csv")


def test_duplicate_header_rejected():
    with pytest.raises(DataError):
        load_dataset("a,a\n1,2\n")


def test_blank_header_rejected():
    with pytest.raises(DataError):
        load_dataset("a,,c\n1,2,3\n")


def test_ragged_row_names_file_line():
    # numbering counts file lines, header included
    with pytest.raises(DataError) as err:
        load_dataset("a,b\n1,2\n3\n")
    assert "row 3" in str(err.value)


def test_empty_input_rejected():
    with pytest.raises(DataError):
        load_dataset("a,b\n")


def test_max_rows_cap():
    with pytest.raises(DataError):
        load_dataset("a\n1\n2\n3\n", max_rows=2)


def test_utf8_bom_tolerated():
    ds = load_dataset(b"\xef\xbb\xbfa,b\n1,x\n")
    assert ds.field_names == ["a", "b"]


def test_stats_minmax(cars):
    hp = cars.field_named("Horsepower")
    assert hp.stats.minimum == 46
    assert hp.stats.maximum == 230
    assert hp.stats.null_count == 6


def test_geo_role_detection(covid):
    assert covid.field_named("latitude").geo_role == "latitude"
    assert covid.field_named("longitude").geo_role == "longitude"
    assert covid.field_named("state").geo_role == "region"
    assert covid.field_named("confirmed").geo_role is None


# ---------------------------------------------------------------------------
# overrides

def test_override_to_nominal_always_possible(cars):
    ds = override_field_type(cars, "Cylinders", FieldType.NOMINAL)
    f = ds.field_named("Cylinders")
    assert f.ftype is FieldType.NOMINAL
    assert f.inferred is False
    assert cars.field_named("Cylinders").ftype is FieldType.ORDINAL  # original untouched


def test_override_same_type_identity(cars):
    ds = override_field_type(cars, "Origin", FieldType.NOMINAL)
    assert ds is cars


def test_override_unconvertible_cell_names_row():
    ds = load_dataset("a\nx\n1\n")
    with pytest.raises(DataError) as err:
        override_field_type(ds, "a", FieldType.QUANTITATIVE)
    assert "row 1" in str(err.value)


def test_override_drops_stale_geo_role(covid):
    ds = override_field_type(covid, "latitude", FieldType.NOMINAL)
    assert ds.field_named("latitude").geo_role is None


def test_set_geo_role_validates_type(covid):
    with pytest.raises(DataError):
        set_geo_role(covid, "state", "latitude")  # nominal cannot be a latitude
    ds = set_geo_role(covid, "region", None)
    assert ds.field_named("region").geo_role is None


def test_unknown_field_rejected(cars):
    with pytest.raises(DataError):
        override_field_type(cars, "nope", FieldType.NOMINAL)


# ---------------------------------------------------------------------------
# filters, against the linear-scan oracle

def _hp_key(v):
    if v is None:
        return None
    return float(v)


@pytest.mark.parametrize(
    "op,operands",
    [
        ("eq", (130,)),
        ("neq", (130,)),
        ("lt", (100,)),
        ("le", (100,)),
        ("gt", (200,)),
        ("ge", (200,)),
        ("in", (130, 150, 198)),
        ("between", (100, 150)),
    ],
)
def test_filter_ops_match_oracle(cars, op, operands):
    got = apply_filters(cars, [FilterPredicate("Horsepower", op, operands)])
    want = naive_filter(cars.rows, "Horsepower", op, operands, _hp_key)
    assert got.rows == want


def test_filter_conjunction(cars):
    got = apply_filters(
        cars,
        [
            FilterPredicate("Origin", "eq", ("USA",)),
            FilterPredicate("Horsepower", "gt", (150,)),
        ],
    )
    assert got.rows
    assert all(r["Origin"] == "USA" and r["Horsepower"] > 150 for r in got.rows)


def test_filter_nulls_never_match(cars):
    got = apply_filters(cars, [FilterPredicate("Horsepower", "lt", (10_000,))])
    assert all(r["Horsepower"] is not None for r in got.rows)
    assert got.row_count == 400


def test_filter_temporal_comparison(covid):
    got = apply_filters(covid, [FilterPredicate("date", "lt", ("2020-03-05",))])
    assert got.row_count == 4 * 12


def test_filter_recomputes_stats(cars):
    got = apply_filters(cars, [FilterPredicate("Horsepower", "ge", (200,))])
    assert got.field_named("Horsepower").stats.minimum >= 200


def test_filter_bad_arity():
    ds = load_dataset("a\n1\n2\n")
    with pytest.raises(DataError):
        apply_filters(ds, [FilterPredicate("a", "between", (1,))])
    with pytest.raises(DataError):
        apply_filters(ds, [FilterPredicate("a", "bogus", (1,))])
    with pytest.raises(DataError):
        apply_filters(ds, [FilterPredicate("nope", "eq", (1,))])


@settings(max_examples=60, deadline=None)
@given(
    op=st.sampled_from(["eq", "neq", "lt", "le", "gt", "ge"]),
    pivot=st.integers(min_value=40, max_value=240),
)
def test_filter_property_vs_oracle(op, pivot):
    csv_text = "v\n" + "\n".join(str(40 + (i * 13) % 200) for i in range(50)) + "\n"
    ds = load_dataset(csv_text)
    got = apply_filters(ds, [FilterPredicate("v", op, (pivot,))])
    want = naive_filter(ds.rows, "v", op, (pivot,), lambda x: None if x is None else float(x))
    assert got.rows == want
