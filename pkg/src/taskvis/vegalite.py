"""Vega-Lite document emission for candidate specs.

Single-view charts become unit specs; overlays become two-layer specs. Data
is inlined by default or referenced by URL when one is given. Spatial charts
bring a packaged US states TopoJSON unless an override map URL is supplied
(TASKVIS_MAP_FILE or the map_url argument).
"""

from __future__ import annotations

import os
from importlib import resources
from typing import Any, Dict, List, Optional, Sequence

from .data import Dataset, FieldType
from .enumerator import CandidateSpec, Encoding

SCHEMA_V5 = "https://vega.github.io/schema/vega-lite/v5.json"
SCHEMA_V4 = "./vega-lite/v4.json"
MAP_FILE_ENV = "TASKVIS_MAP_FILE"
MAP_FEATURE = "states"
MAP_KEY = "properties.name"

_POSITIONAL = ("x", "y", "theta", "latitude", "longitude")


class EmissionError(ValueError):
    pass


def default_map_url() -> str:
    env = os.environ.get(MAP_FILE_ENV)
    if env:
        return env
    with resources.as_file(
        resources.files("taskvis.resources.maps").joinpath("us_states.topo.json")
    ) as p:
        return str(p)


def _schema_url(version: str) -> str:
    if version == "v5":
        return SCHEMA_V5
    if version == "v4":
        return SCHEMA_V4
    raise EmissionError("unsupported schema version: %r" % version)


def _data_block(
    dataset: Dataset, data_url: Optional[str], data_format: Optional[str]
) -> Dict[str, Any]:
    if data_url is not None:
        block: Dict[str, Any] = {"url": data_url}
        if data_format:
            block["format"] = {"type": data_format}
        return block
    return {"values": [dict(r) for r in dataset.rows]}

def _channel_block(e: Encoding) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    if e.field is None:
        out["aggregate"] = "count"
        out["type"] = "quantitative"
    else:
        out["field"] = e.field
        out["type"] = e.ftype.value
        if e.aggregate:
            out["aggregate"] = e.aggregate
    if e.bin:
        out["bin"] = True
    if e.sort:
        out["sort"] = e.sort
    if e.stack:
        out["stack"] = e.stack
    if e.scale == "log":
        out["scale"] = {"type": "log"}
    return out


def _encoding_map(encodings: Sequence[Encoding]) -> Dict[str, Any]:
    return {e.channel: _channel_block(e) for e in encodings}


def _measure_axis(encodings: Sequence[Encoding]) -> str:
    for ch in ("y", "x"):
        for e in encodings:
            if e.channel == ch and e.ftype is FieldType.QUANTITATIVE:
                return ch
    return "y"


def _legend_fields(encodings: Sequence[Encoding]) -> List[str]:
    return [
        e.field
        for e in encodings
        if e.channel in ("color", "size", "shape") and e.field is not None
    ]


def to_vegalite(
    spec: CandidateSpec,
    dataset: Dataset,
    *,
    schema_version: str = "v5",
    data_url: Optional[str] = None,
    data_format: Optional[str] = None,
    map_url: Optional[str] = None,
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "$schema": _schema_url(schema_version),
        "data": _data_block(dataset, data_url, data_format),
    }
    base = spec.mark.base
    overlay = spec.mark.overlay
    body = [e for e in spec.encodings if e.channel != "text"]
    text = next((e for e in spec.encodings if e.channel == "text"), None)

    if base == "geoshape":
        shape = next(e for e in body if e.channel == "shape")
        others = [e for e in body if e.channel != "shape"]
        doc["transform"] = [
            {
                "lookup": shape.field,
                "from": {
                    "data": {
                        "url": map_url or default_map_url(),
                        "format": {"type": "topojson", "feature": MAP_FEATURE},
                    },
                    "key": MAP_KEY,
                },
                "as": "geo",
            }
        ]
        doc["projection"] = {"type": "albersUsa"}
        doc["mark"] = base
        enc = _encoding_map(others)
        enc["shape"] = {"field": "geo", "type": "geojson"}
        doc["encoding"] = enc
        return doc

    if base == "circle" and any(e.channel == "latitude" for e in body):
        doc["projection"] = {"type": "albersUsa"}

    if overlay is None:
        doc["mark"] = base
        doc["encoding"] = _encoding_map(body)
        return doc

    base_layer: Dict[str, Any] = {"mark": base, "encoding": _encoding_map(body)}

    if overlay == "text":
        if text is None:
            raise EmissionError("text overlay without a text encoding")
        positions = [e for e in body if e.channel in _POSITIONAL]
        enc = _encoding_map(positions)
        enc["text"] = _channel_block(text)
        doc["layer"] = [base_layer, {"mark": "text", "encoding": enc}]
        return doc

    if overlay == "rule":
        axis = _measure_axis(body)
        doc["layer"] = [base_layer, {"mark": "rule", "encoding": {axis: {"datum": 0}}}]
        return doc

    if overlay == "line":
        if spec.trend not in ("regression", "loess"):
            raise EmissionError("line overlay requires a trend method")
        xe = next(e for e in body if e.channel == "x")
        ye = next(e for e in body if e.channel == "y")
        transform: Dict[str, Any] = {spec.trend: ye.field, "on": xe.field}
        groupby = _legend_fields(body)
        if groupby:
            transform["groupby"] = groupby
        enc = _encoding_map([xe, ye])
        color = next((e for e in body if e.channel == "color"), None)
        if color is not None:
            enc["color"] = _channel_block(color)
        doc["layer"] = [
            base_layer,
            {"mark": "line", "transform": [transform], "encoding": enc},
        ]
        return doc

    raise EmissionError("unsupported overlay: %r" % overlay)
