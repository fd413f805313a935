"""CSV/JSON emission and parsing for curves and spectral records.

CSV: one header row, reals written with 17 significant digits (exact
round-trip for doubles), ``inf`` for overflowed t, ``true``/``false`` for
flags, then footer metadata lines ``# key=value``.  The JSON form mirrors
the same table; non-finite reals are written as the strings ``"inf"``,
``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import io as _io
import json
import math
import sys
from pathlib import Path
from typing import Mapping

import numpy as np

from .empirics import Records

__all__ = [
    "ParseError",
    "RECORD_COLUMNS",
    "format_table",
    "parse_table",
    "write_table",
    "read_table",
    "records_to_columns",
    "columns_to_records",
]

RECORD_COLUMNS = ("matrix_index", "re_z", "im_z", "t", "residual", "defective")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _column_kind(arr: np.ndarray) -> str:
    if arr.dtype == bool:
        return "bool"
    if np.issubdtype(arr.dtype, np.integer):
        return "int"
    return "float"


def format_table(columns: Mapping[str, np.ndarray], meta: Mapping | None = None, fmt: str = "csv") -> str:
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    sizes = {a.size for a in arrays}
    if len(sizes) > 1:
        raise ValueError("columns differ in length")
    meta = dict(meta or {})
    if fmt == "json":
        rows = []
        for row in zip(*arrays):
            out = []
            for v in row:
                if isinstance(v, np.bool_):
                    out.append(bool(v))
                elif isinstance(v, np.integer):
                    out.append(int(v))
                else:
                    f = float(v)
                    out.append(f if math.isfinite(f) else repr(f))
            rows.append(out)
        kinds = {k: _column_kind(a) for k, a in zip(names, arrays)}
        return json.dumps({"columns": names, "kinds": kinds, "rows": rows, "meta": meta}, allow_nan=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = _io.StringIO()
    buf.write(",".join(names) + "\n")
    for row in zip(*arrays):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    return buf.getvalue()


def _parse_value(tok: str, kind: str):
    if kind == "bool":
        if tok == "true":
            return True
        if tok == "false":
            return False
        raise ValueError(f"expected true/false, got {tok!r}")
    if kind == "int":
        return int(tok)
    return float(tok)


def _infer_kind(name: str, tok: str) -> str:
    if tok in ("true", "false"):
        return "bool"
    if name == "matrix_index":
        return "int"
    return "float"


def parse_table(text: str, path=None) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
            names = doc["columns"]
            kinds = doc.get("kinds", {})
            rows = doc["rows"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"malformed JSON table ({exc})", path=path) from exc
        cols = {}
        for k, name in enumerate(names):
            kind = kinds.get(name, "float")
            vals = [float(r[k]) if isinstance(r[k], str) else r[k] for r in rows]
            dtype = {"bool": bool, "int": np.int64}.get(kind, float)
            cols[name] = np.array(vals, dtype=dtype)
        return cols, {k: str(v) for k, v in doc.get("meta", {}).items()}

    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("missing header row", 1, path)
    names = [h.strip() for h in lines[0].split(",")]
    data: list[list] = [[] for _ in names]
    kinds: list[str | None] = [None] * len(names)
    meta: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        toks = line.split(",")
        if len(toks) != len(names):
            raise ParseError(f"expected {len(names)} fields, found {len(toks)}", lineno, path)
        for c, tok in enumerate(toks):
            tok = tok.strip()
            if kinds[c] is None:
                kinds[c] = _infer_kind(names[c], tok)
            try:
                data[c].append(_parse_value(tok, kinds[c]))
            except ValueError as exc:
                raise ParseError(f"column {names[c]!r}: {exc}", lineno, path) from exc
    cols = {}
    for name, kind, vals in zip(names, kinds, data):
        dtype = {"bool": bool, "int": np.int64}.get(kind or "float", float)
        cols[name] = np.array(vals, dtype=dtype)
    return cols, meta


def write_table(target, columns, meta=None, fmt: str = "csv") -> None:
    """Write to a path (``-`` for stdout) or an open text stream."""
    text = format_table(columns, meta, fmt)
    if target == "-":
        target = sys.stdout
    if hasattr(target, "write"):
        target.write(text)
        return
    path = Path(target)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_table(source) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    if hasattr(source, "read"):
        return parse_table(source.read())
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_table(text, path)


def records_to_columns(records: Records) -> dict[str, np.ndarray]:
    return {
        "matrix_index": records.matrix_index,
        "re_z": records.z.real,
        "im_z": records.z.imag,
        "t": records.t,
        "residual": records.residual,
        "defective": records.defective,
    }


def columns_to_records(cols: Mapping[str, np.ndarray], meta: Mapping | None = None) -> Records:
    missing = [c for c in RECORD_COLUMNS if c not in cols]
    if missing:
        raise ParseError(f"record table lacks columns {missing}")
    z = np.empty(len(cols["re_z"]), dtype=complex)
    z.real = cols["re_z"]
    z.imag = cols["im_z"]
    return Records(
        np.asarray(cols["matrix_index"], dtype=np.int64),
        z,
        np.asarray(cols["t"], dtype=float),
        np.asarray(cols["residual"], dtype=float),
        np.asarray(cols["defective"], dtype=bool),
        dict(meta or {}),
    )
