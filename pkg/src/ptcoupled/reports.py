"""Versioned JSON and CSV serialisation of CLI reports."""

from __future__ import annotations

import csv
import enum
import io
import json
import math

import numpy as np

SCHEMA = "ptcoupled.report"
SCHEMA_VERSION = 1


class ReportFormatError(ValueError):
    pass


def _encode(obj):
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _encode(obj.real), "im": _encode(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        # JSON has no inf/nan
        return value if math.isfinite(value) else repr(value)
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            return complex(obj["re"], obj["im"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def make_report(command: str, **body) -> dict:
    report = {"schema": SCHEMA, "schema_version": SCHEMA_VERSION, "command": command}
    report.update(body)
    return report


def dumps(report: dict) -> str:
    return json.dumps(_encode(report), indent=2) + "\n"


def loads(text: str) -> dict:
    data = json.loads(text)
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ReportFormatError("not a ptcoupled report")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ReportFormatError(f"unsupported schema version {data.get('schema_version')!r}")
    return _decode(data)


def to_csv(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                         for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    return rows[0], rows[1:]
