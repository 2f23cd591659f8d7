"""Canonical JSON serialization.

All user-facing JSON (CLI output, golden files, stored datasets) goes
through :func:`canonical_dumps` so that identical inputs produce
byte-identical output across runs and platforms: keys are sorted, floats
are formatted to 6 significant digits, and integral floats are emitted
as integers.
"""

from __future__ import annotations

import json
import math

SIGNIFICANT_DIGITS = 6


def canonical_number(x: float | int):
    """Round to 6 significant digits; collapse integral values to int."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    if not math.isfinite(x):
        raise ValueError(f"non-finite number not serializable: {x!r}")
    if x == int(x) and abs(x) < 1e15:
        return int(x)
    return float(format(x, f".{SIGNIFICANT_DIGITS}g"))


def _canonicalize(obj):
    if isinstance(obj, dict):
        return {str(k): _canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    if isinstance(obj, float):
        return canonical_number(obj)
    return obj


def canonical_dumps(obj, indent: int | None = 2) -> str:
    """Serialize ``obj`` deterministically; returns text without a trailing newline."""
    return json.dumps(
        _canonicalize(obj),
        sort_keys=True,
        ensure_ascii=False,
        allow_nan=False,
        indent=indent,
        separators=(",", ": ") if indent is not None else (",", ":"),
    )
