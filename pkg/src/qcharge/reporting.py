"""Deterministic serialization of reports.

Identical inputs must produce byte-identical output files, so floats are
printed with 17 significant digits (enough to round-trip a double exactly)
through a single formatter shared by JSON and CSV emission, and JSON objects
keep insertion order with a fixed layout.
"""

from __future__ import annotations

import json
import sys
from typing import IO, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


def format_float(value: float) -> str:
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"refusing to serialize non-finite value {value!r}")
    return f"{value:.17g}"


def _format_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}: {value!r}")


def _dump(value, lines: list[str], indent: str, level: int) -> None:
    pad = indent * level
    if isinstance(value, dict):
        if not value:
            lines.append("{}")
            return
        lines.append("{")
        items = list(value.items())
        for i, (key, item) in enumerate(items):
            lines.append(f"\n{pad}{indent}{json.dumps(str(key))}: ")
            _dump(item, lines, indent, level + 1)
            if i < len(items) - 1:
                lines.append(",")
        lines.append(f"\n{pad}}}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            lines.append("[]")
            return
        lines.append("[")
        for i, item in enumerate(seq):
            lines.append(f"\n{pad}{indent}")
            _dump(item, lines, indent, level + 1)
            if i < len(seq) - 1:
                lines.append(",")
        lines.append(f"\n{pad}]")
    else:
        lines.append(_format_scalar(value))


def dumps_json(obj, *, indent: int = 2) -> str:
    """Render JSON with ordered keys and 17-significant-digit floats."""
    lines: list[str] = []
    _dump(obj, lines, " " * indent, 0)
    lines.append("\n")
    return "".join(lines)


def with_schema(obj: dict) -> dict:
    return {"schema": SCHEMA_VERSION, **obj}


def csv_lines(header: Sequence[str], rows: Iterable[Sequence]) -> Iterable[str]:
    yield ",".join(header) + "\n"
    for row in rows:
        yield ",".join(_csv_cell(v) for v in row) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_text(path: str | None, text: str) -> None:
    """Write to a file, or to stdout when path is None or '-'."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    write_text(path, "".join(csv_lines(header, rows)))


def write_stream_json(stream: IO[str], obj) -> None:
    stream.write(dumps_json(obj))
