"""HTTP service: dataset registry plus the recommendation endpoints.

Uploads get a fresh id for the server's lifetime; all engine work is pure
per request, so the registry lock is the only synchronization point.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import replace
from typing import Any, Dict, List, Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from . import engine
from .combiner import recommend_combination
from .data import (
    DataError,
    Dataset,
    FieldType,
    load_dataset,
    override_field_type,
    set_geo_role,
)
from .tasks import list_tasks
from .vegalite import default_map_url

PORT_ENV = "TASKVIS_PORT"
DEFAULT_PORT = 8765
MAX_UPLOAD_BYTES = 10 * 1024 * 1024
MAP_ROUTE = "/api/maps/us-states.json"


class DatasetRegistry:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._data: Dict[str, Dataset] = {}

    def add(self, dataset: Dataset) -> Dataset:
        ds = replace(dataset, id="ds-%s" % uuid.uuid4().hex[:12])
        with self._lock:
            self._data[ds.id] = ds
        return ds

    def get(self, dataset_id: str) -> Optional[Dataset]:
        with self._lock:
            return self._data.get(dataset_id)

    def put(self, dataset: Dataset) -> None:
        with self._lock:
            self._data[dataset.id] = dataset


def _field_report(dataset: Dataset) -> Dict[str, Any]:
    return {
        "dataset_id": dataset.id,
        "row_count": dataset.row_count,
        "fields": [
            {
                "name": f.name,
                "type": f.ftype.value,
                "inferred": f.inferred,
                "geo_role": f.geo_role,
                "cardinality": f.stats.cardinality,
                "null_count": f.stats.null_count,
                "min": f.stats.minimum,
                "max": f.stats.maximum,
            }
            for f in dataset.fields
        ],
    }


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


def create_app(registry: Optional[DatasetRegistry] = None) -> FastAPI:
    app = FastAPI(title="taskvis")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    reg = registry if registry is not None else DatasetRegistry()
    app.state.registry = reg

    @app.post("/api/datasets")
    async def upload(request: Request) -> Response:
        body = await request.body()
        if len(body) > MAX_UPLOAD_BYTES:
            return _error(413, "upload exceeds %d bytes" % MAX_UPLOAD_BYTES)
        if not body.strip():
            return _error(400, "empty upload")
        fmt = request.query_params.get("format")
        if fmt is not None and fmt not in ("csv", "json"):
            return _error(400, "format must be csv or json")
        try:
            ds = load_dataset(body, format_hint=fmt)
        except DataError as exc:
            return _error(400, str(exc))
        ds = reg.add(ds)
        return JSONResponse(_field_report(ds))

    @app.patch("/api/datasets/{dataset_id}/fields/{name}")
    async def patch_field(dataset_id: str, name: str, request: Request) -> Response:
        ds = reg.get(dataset_id)
        if ds is None:
            return _error(404, "unknown dataset: %s" % dataset_id)
        if name not in ds.field_names:
            return _error(404, "unknown field: %s" % name)
        try:
            payload = await request.json()
        except Exception:
            return _error(422, "body must be a JSON object")
        if not isinstance(payload, dict) or not payload:
            return _error(422, "body must name type or geo_role")
        unknown = set(payload) - {"type", "geo_role"}
        if unknown:
            return _error(422, "unknown keys: %s" % ", ".join(sorted(unknown)))
        try:
            if "type" in payload:
                try:
                    ftype = FieldType(payload["type"])
                except ValueError:
                    return _error(
                        422,
                        "type must be one of: %s" % ", ".join(t.value for t in FieldType),
                    )
                ds = override_field_type(ds, name, ftype)
            if "geo_role" in payload:
                ds = set_geo_role(ds, name, payload["geo_role"])
        except DataError as exc:
            return _error(422, str(exc))
        reg.put(ds)
        return JSONResponse(_field_report(ds))

    @app.get("/api/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str) -> Response:
        ds = reg.get(dataset_id)
        if ds is None:
            return _error(404, "unknown dataset: %s" % dataset_id)
        return JSONResponse(_field_report(ds))

    @app.get("/api/tasks")
    async def tasks() -> Response:
        return JSONResponse(
            [
                {
                    "name": t.task,
                    "description": t.description,
                    "marks": [m.label() for m in t.marks],
                    "default_scheme": t.default_scheme,
                    "aggregation_allowed": t.aggregation_allowed,
                }
                for t in list_tasks()
            ]
        )

    @app.get(MAP_ROUTE)
    async def us_states_map() -> Response:
        return FileResponse(default_map_url(), media_type="application/json")

    @app.post("/api/recommend")
    async def recommend(request: Request) -> Response:
        try:
            payload = await request.json()
        except Exception:
            return _error(422, "body must be a JSON object")
        if not isinstance(payload, dict):
            return _error(422, "body must be a JSON object")
        allowed = {
            "dataset_id",
            "columns",
            "tasks",
            "mode",
            "scheme",
            "max_charts",
            "filters",
            "display_by_task",
        }
        unknown = set(payload) - allowed
        if unknown:
            return _error(422, "unknown keys: %s" % ", ".join(sorted(unknown)))
        dataset_id = payload.get("dataset_id")
        if not isinstance(dataset_id, str):
            return _error(422, "dataset_id is required")
        ds = reg.get(dataset_id)
        if ds is None:
            return _error(404, "unknown dataset: %s" % dataset_id)

        mode = payload.get("mode", "individual")
        if mode not in engine.MODES:
            return _error(422, "mode must be one of: %s" % ", ".join(engine.MODES))
        scheme = payload.get("scheme", "default")
        columns = payload.get("columns") or []
        tasks_sel = payload.get("tasks") or []
        display_by_task = bool(payload.get("display_by_task", False))
        max_charts = payload.get("max_charts", engine.DEFAULT_MAX_CHARTS)
        if not isinstance(max_charts, int) or max_charts < 1:
            return _error(422, "max_charts must be a positive integer")
        if not isinstance(columns, list) or not isinstance(tasks_sel, list):
            return _error(422, "columns and tasks must be lists")

        try:
            filters = [engine.parse_filter_payload(f) for f in payload.get("filters") or []]
            working = engine.filtered_dataset(ds, filters)
            engine.validate_columns(working, [str(c) for c in columns])
            tasks_list = engine.validate_tasks([str(t) for t in tasks_sel])

            if mode == "combination":
                result = recommend_combination(
                    working,
                    interested=set(columns) if columns else None,
                    tasks=tasks_list or None,
                )
                result = engine.truncate_combination(result, max_charts)
                return JSONResponse(
                    {
                        "charts": engine.chart_entries(
                            result.charts, working, map_url=MAP_ROUTE
                        ),
                        "grouped_by_task": None,
                        "partial": result.partial,
                        "complete": result.complete,
                        "covered_columns": sorted(result.covered_columns),
                    }
                )

            res = engine.recommend_individual(
                working,
                columns=[str(c) for c in columns],
                tasks=tasks_list,
                scheme=str(scheme),
                max_charts=max_charts,
                display_by_task=display_by_task,
            )
        except engine.RequestError as exc:
            return _error(422, str(exc))

        grouped: Optional[Dict[str, List[Dict[str, Any]]]] = None
        if res.grouped is not None:
            grouped = {
                task: engine.chart_entries(entries, working, map_url=MAP_ROUTE)
                for task, entries in res.grouped.items()
            }
        return JSONResponse(
            {
                "charts": engine.chart_entries(res.flat, working, map_url=MAP_ROUTE),
                "grouped_by_task": grouped,
                "partial": res.partial,
            }
        )

    return app


def serve(host: str = "127.0.0.1", port: Optional[int] = None) -> None:
    import uvicorn

    if port is None:
        port = int(os.environ.get(PORT_ENV, DEFAULT_PORT))
    uvicorn.run(create_app(), host=host, port=port)
