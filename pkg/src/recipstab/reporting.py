"""Serialization helpers shared by the report types and the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

from .exact import is_exact, to_real


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_real(v) -> str:
    """17 significant digits in scientific notation; ``inf`` for unbounded values."""
    if v is None:
        return ""
    x = float(to_real(v)) if not isinstance(v, float) else v
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def json_real(v):
    """A float for JSON; ``None`` for infinities (JSON has no inf)."""
    if v is None:
        return None
    x = float(Fraction(v)) if is_exact(v) else float(to_real(v))
    return x if math.isfinite(x) else None


def write_csv(path: Path, header, rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload), encoding="utf-8")
    return path
