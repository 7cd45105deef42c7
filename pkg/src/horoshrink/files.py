"""Curve CSV, events JSON and table CSV emission.

Curve files are plain CSV with ``# key=<json>`` metadata lines, a header
of column names and one sample per row, floats written with 17
significant digits so that every value reads back bit-for-bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .geometry import GeneratingCurve

ARC_COLUMNS = ("s", "x", "z", "theta")
SCHEMAS = {
    "grim": ARC_COLUMNS,
    "wing": ARC_COLUMNS,
    "horosphere": ARC_COLUMNS,
    "vertical-plane": ARC_COLUMNS,
    "bowl": ("r", "x", "z", "dz", "quad"),
}


class CurveFormatError(PreconditionError):
    """Malformed curve file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(v) -> str:
    return format(float(v), ".17g")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def curve_to_csv(curve: GeneratingCurve, meta: dict | None = None) -> str:
    schema = SCHEMAS.get(curve.family)
    if schema is None:
        raise PreconditionError(f"no file schema for family {curve.family!r}")
    cols = curve.columns()
    if tuple(cols) != schema:
        raise PreconditionError(f"curve columns {tuple(cols)} do not match schema {schema}")
    info = {"family": curve.family, **curve.meta, **(meta or {})}
    lines = [f"# {k}={json.dumps(_plain(info[k]), sort_keys=True)}" for k in sorted(info)]
    lines.append(",".join(schema))
    data = np.column_stack([cols[c] for c in schema])
    lines.extend(",".join(fmt(v) for v in row) for row in data)
    return "\n".join(lines) + "\n"


def write_curve(path, curve: GeneratingCurve, meta: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(curve_to_csv(curve, meta))
    return path


def parse_curve(text: str) -> GeneratingCurve:
    meta: dict = {}
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is not None:
                raise CurveFormatError("metadata after the header", lineno)
            key, sep, value = line[1:].strip().partition("=")
            if not sep or not key:
                raise CurveFormatError("metadata must read '# key=value'", lineno)
            try:
                meta[key.strip()] = json.loads(value)
            except json.JSONDecodeError as exc:
                raise CurveFormatError(f"bad metadata value ({exc.msg})", lineno) from None
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            header = tuple(fields)
            family = meta.get("family")
            if family not in SCHEMAS:
                raise CurveFormatError(f"unknown or missing family {family!r}", lineno)
            if header != SCHEMAS[family]:
                raise CurveFormatError(
                    f"header {','.join(header)} does not match {family} schema "
                    f"{','.join(SCHEMAS[family])}", lineno)
            continue
        if len(fields) != len(header):
            raise CurveFormatError(f"expected {len(header)} fields, found {len(fields)}", lineno)
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise CurveFormatError("non-numeric field", lineno) from None
    if header is None:
        raise CurveFormatError("missing header line")
    if not rows:
        raise CurveFormatError("no data rows")

    data = np.array(rows)
    cols = dict(zip(header, data.T))
    family = meta.pop("family")
    pname = header[0]
    extra = {k: cols[k] for k in header if k not in (pname, "x", "z", "theta")}
    return GeneratingCurve(
        family, cols[pname], cols["x"], cols["z"], cols.get("theta"),
        param_name=pname, extra=extra, meta=meta,
    )


def read_curve(path) -> GeneratingCurve:
    return parse_curve(Path(path).read_text())


def table_to_csv(columns, rows) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, str):
            return v
        if isinstance(v, float) and not math.isfinite(v):
            return str(v)
        return fmt(v)

    lines = [",".join(columns)]
    lines.extend(",".join(cell(v) for v in r) for r in rows)
    return "\n".join(lines) + "\n"
