"""Command line front end.

taskvis recommend --data cars.csv --tasks sort --columns Cylinders,Horsepower
writes one Vega-Lite document per chart plus an index manifest; outputs are
deterministic so reruns produce byte-identical files. taskvis serve starts
the HTTP service.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional, Sequence

from . import engine
from .combiner import recommend_combination
from .data import DataError, Dataset, FilterPredicate, load_dataset, parse_number
from .tasks import ENUMERABLE_TASKS

EXIT_OK = 0
EXIT_INPUT = 2

DATA_FILE_NAME = "data.csv"
MANIFEST_NAME = "index.json"


def _parse_filter(text: str) -> FilterPredicate:
    tokens = text.split()
    if len(tokens) < 3:
        raise engine.RequestError(
            "filter must look like 'field op value' (ops: eq neq lt le gt ge in between)"
        )
    ops = ("eq", "neq", "lt", "le", "gt", "ge", "in", "between")
    op_index = None
    for i in range(1, len(tokens)):
        if tokens[i] in ops:
            op_index = i
            break
    if op_index is None:
        raise engine.RequestError(
            "no filter operator found in %r (ops: %s)" % (text, " ".join(ops))
        )
    field = " ".join(tokens[:op_index])
    op = tokens[op_index]
    rest = " ".join(tokens[op_index + 1 :])
    parts = [p.strip() for p in rest.split(",")] if rest else []
    if not parts or parts == [""]:
        raise engine.RequestError("filter %r has no value" % text)
    operands = tuple(parse_number(p) if parse_number(p) is not None else p for p in parts)
    return FilterPredicate(field=field, op=op, operands=operands)


def _split_list(raw: Optional[str]) -> List[str]:
    if not raw:
        return []
    return [part.strip() for part in raw.split(",") if part.strip()]


def _write_json(path: str, doc: object) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_data_csv(path: str, dataset: Dataset) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(dataset.field_names)
    for row in dataset.rows:
        writer.writerow(["" if row[n] is None else row[n] for n in dataset.field_names])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _cmd_recommend(args: argparse.Namespace) -> int:
    try:
        with open(args.data, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        print("cannot read %s: %s" % (args.data, exc), file=sys.stderr)
        return EXIT_INPUT

    try:
        dataset = load_dataset(raw, format_hint=args.format)
        filters = [_parse_filter(f) for f in args.filter or []]
        working = engine.filtered_dataset(dataset, filters)
        columns = engine.validate_columns(working, _split_list(args.columns))
        tasks = engine.validate_tasks(_split_list(args.tasks))

        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        data_path = os.path.join(out_dir, DATA_FILE_NAME)
        _write_data_csv(data_path, working)

        if args.mode == "combination":
            result = recommend_combination(
                working,
                interested=set(columns) if columns else None,
                tasks=tasks or None,
            )
            result = engine.truncate_combination(result, args.max)
            scored = result.charts
            extra = {
                "complete": result.complete,
                "covered_columns": sorted(result.covered_columns),
            }
            partial = result.partial
        else:
            res = engine.recommend_individual(
                working,
                columns=columns,
                tasks=tasks,
                scheme=args.scheme,
                max_charts=args.max,
            )
            scored = res.flat
            extra = {}
            partial = res.partial
    except (DataError, engine.RequestError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT

    entries = engine.chart_entries(
        scored,
        working,
        schema_version=args.schema_version,
        data_url=DATA_FILE_NAME,
        data_format="csv",
    )
    manifest = {
        "dataset_id": working.id,
        "data_file": DATA_FILE_NAME,
        "columns": columns,
        "tasks": tasks,
        "mode": args.mode,
        "scheme": args.scheme,
        "partial": partial,
        "charts": [],
    }
    manifest.update(extra)
    for i, entry in enumerate(entries):
        name = "chart_%03d.vl.json" % (i + 1)
        _write_json(os.path.join(out_dir, name), entry["vegalite"])
        manifest["charts"].append(
            {
                "file": name,
                "task": entry["task"],
                "cost": entry["cost"],
                "covering_tasks": entry["covering_tasks"],
                "fields": entry["fields"],
                "canonical": entry["canonical"],
            }
        )
    _write_json(os.path.join(out_dir, MANIFEST_NAME), manifest)
    print("%d chart(s) written to %s" % (len(entries), out_dir))
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    serve(host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taskvis",
        description="task-oriented chart recommendation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recommend", help="write recommended charts for a data file")
    rec.add_argument("--data", required=True, help="CSV or JSON record file")
    rec.add_argument("--format", choices=("csv", "json"), help="override format sniffing")
    rec.add_argument("--columns", help="comma-separated columns of interest")
    rec.add_argument(
        "--tasks",
        help="comma-separated tasks (valid: %s)" % ", ".join(ENUMERABLE_TASKS),
    )
    rec.add_argument("--mode", choices=engine.MODES, default="individual")
    rec.add_argument("--scheme", choices=engine.SCHEMES, default="default")
    rec.add_argument("--max", type=int, default=engine.DEFAULT_MAX_CHARTS)
    rec.add_argument(
        "--filter",
        action="append",
        help="row filter 'field op value', repeatable; ops: eq neq lt le gt ge in between",
    )
    rec.add_argument("--out", default="taskvis_out", help="output directory")
    rec.add_argument("--schema-version", choices=("v5", "v4"), default="v5")
    rec.set_defaults(fn=_cmd_recommend)

    srv = sub.add_parser("serve", help="start the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=None)
    srv.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "recommend" and args.max < 1:
        print("--max must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
