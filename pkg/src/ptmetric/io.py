"""Matrix files and row tables.

Matrix files are JSON: ``{"n": 2, "entries": [[[re, im], ...], ...]}``,
row-major with every complex scalar stored as a ``[re, im]`` pair.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from ptmetric.errors import NotSquare, ParseError, UsageError
from ptmetric.linalg import as_matrix

SWEEP_COLUMNS = ("p", "theta", "eta", "varA", "varB", "lhs", "rhs", "lambdaG", "mus", "state_class")
SCAN_COLUMNS = ("gamma", "kappa", "phase")
MUS_LINE_COLUMNS = ("kind", "value", "state_class", "symmetric_fraction", "rows")


def parse_matrix(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ParseError("matrix file needs an object with an 'entries' field")
    entries = doc["entries"]
    if not isinstance(entries, list) or not entries:
        raise NotSquare("'entries' must be a non-empty list of rows")
    n = doc.get("n", len(entries))
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    if len(entries) != n or any(not isinstance(r, list) or len(r) != n for r in entries):
        raise NotSquare(f"'entries' is not an {n}x{n} array of rows")
    M = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(entries):
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
                raise ParseError(f"entry [{i}][{j}] is not a [re, im] pair of numbers")
            M[i, j] = complex(float(z[0]), float(z[1]))
    try:
        return as_matrix(M)
    except UsageError as exc:
        raise ParseError(str(exc)) from exc


def parse_matrix_file(path) -> np.ndarray:
    """Read a square complex matrix from a JSON matrix file."""
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def matrix_to_json(M) -> str:
    M = as_matrix(M)
    doc = {
        "n": M.shape[0],
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }
    return json.dumps(doc)


def write_matrix_file(M, path) -> None:
    atomic_write(path, matrix_to_json(M) + "\n")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else format_value(v)
    return v


def _columns_for(rows, columns):
    if columns is not None:
        return tuple(columns)
    from ptmetric.sweep import MusLine, ScanRow, SweepRow

    first = rows[0]
    if isinstance(first, SweepRow):
        return SWEEP_COLUMNS
    if isinstance(first, ScanRow):
        return SCAN_COLUMNS
    if isinstance(first, MusLine):
        return MUS_LINE_COLUMNS
    if dataclasses.is_dataclass(first):
        return tuple(f.name for f in dataclasses.fields(first))
    return tuple(first)


def _get(row, col):
    return row[col] if isinstance(row, dict) else getattr(row, col)


def render_rows(rows, fmt: str = "csv", columns=None, metadata=None) -> str:
    rows = list(rows)
    if not rows and columns is None:
        raise UsageError("columns are required for an empty row set")
    cols = _columns_for(rows, columns)
    if fmt == "csv":
        buf = io.StringIO()
        if metadata is not None:
            buf.write("# " + json.dumps(metadata, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([format_value(_get(r, c)) for c in cols])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "metadata": metadata or {},
            "columns": list(cols),
            "rows": [{c: _json_value(_get(r, c)) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    raise UsageError(f"unknown output format {fmt!r}")


def write_rows(rows, path, fmt: str = "csv", columns=None, metadata=None) -> None:
    """Write rows as CSV (one ``# {json}`` metadata line, then a header) or JSON."""
    atomic_write(path, render_rows(rows, fmt, columns, metadata))


def read_csv_rows(path) -> tuple[dict, list[dict]]:
    """Inverse of the CSV branch of :func:`write_rows` (values stay strings)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    if lines and lines[0].startswith("# "):
        meta = json.loads(lines[0][2:])
        lines = lines[1:]
    return meta, list(csv.DictReader(lines))
