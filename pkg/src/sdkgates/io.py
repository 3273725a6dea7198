"""Deterministic CSV / JSON writers for command outputs.

CSV files follow RFC 4180 (CRLF line ends, minimal quoting).  Floats use
'.' as decimal separator; non-zero magnitudes below 1e-3 are always
written in exponent notation.  JSON is UTF-8 with sorted keys.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "sdkgates/1"


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        if x != 0 and abs(x) < 1e-3:
            return f"{x:.16e}"
        return repr(x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(payload) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=False) + "\n"


def document(kind: str, config: dict, result) -> dict:
    """Wrap a result with the schema version and the resolved run config."""
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "config": config, "result": result}


def write_text(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def write_csv(path: Path, header, rows, config: dict | None = None) -> None:
    """Write a CSV table; the resolved config goes to a sidecar ``<name>.config.json``."""
    write_text(path, csv_text(header, rows))
    if config is not None:
        write_text(path.with_suffix(".config.json"), json_text(document("csv-config", config, path.name)))
