"""Shared CSV loading with schema validation for the figure scripts."""

from __future__ import annotations

import csv
from typing import Dict, List, Sequence

import numpy as np

__all__ = ["SchemaError", "load_columns"]


class SchemaError(Exception):
    """The input file does not match the declared CSV schema."""


def load_columns(
    path: str,
    required: Sequence[str],
    numeric: Sequence[str] | None = None,
) -> Dict[str, np.ndarray]:
    """Read ``path`` and return the ``required`` columns as arrays.

    Columns listed in ``numeric`` (default: all required columns) are
    parsed as floats; anything else is returned as an object array of
    strings.  Missing headers, missing files, empty bodies and
    unparseable numbers all raise :class:`SchemaError`.
    """
    if numeric is None:
        numeric = required
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    header, body = rows[0], rows[1:]
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; header is {header}")
    if not body:
        raise SchemaError(f"{path}: no data rows")
    idx = {name: header.index(name) for name in required}
    width = len(header)
    for k, row in enumerate(body, start=2):
        if len(row) != width:
            raise SchemaError(f"{path}: row {k} has {len(row)} fields, expected {width}")

    out: Dict[str, np.ndarray] = {}
    for name in required:
        cells: List[str] = [row[idx[name]] for row in body]
        if name in numeric:
            try:
                out[name] = np.array([float(c) for c in cells])
            except ValueError as exc:
                raise SchemaError(f"{path}: column {name!r} is not numeric: {exc}") from exc
        else:
            out[name] = np.array(cells, dtype=object)
    return out
