"""Deterministic CSV tables with a one-line comment header.

Layout::

    # config_hash=<hex> seed=<int> key=value ...
    col1,col2,...
    v11,v12,...

Numbers are written with 17 significant digits and LF line endings, so a
float survives the round trip exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ConfigError


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: tuple
    meta: dict = field(default_factory=dict)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) or hasattr(x, "__float__"):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def _meta_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def format_table(rows: Sequence[Sequence[float]], columns: Sequence[str],
                 meta: dict | None = None) -> str:
    """CSV text of ``rows`` under ``columns`` with the comment header."""
    columns = [str(c) for c in columns]
    if not columns or any("," in c or "\n" in c for c in columns):
        raise ValueError("column names must be non-empty and free of commas and newlines")
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise ValueError("row %d has %d entries, expected %d" % (i, len(row), len(columns)))
    meta = dict(meta or {})
    meta.setdefault("config_hash", "0" * 16)
    meta.setdefault("seed", 0)
    head = ["config_hash=%s" % meta.pop("config_hash"), "seed=%s" % _fmt(meta.pop("seed"))]
    for key in sorted(meta):
        value = _fmt(meta[key])
        if any(ch in value for ch in " \n=") or any(ch in key for ch in " \n="):
            raise ValueError("metadata %r=%r cannot be written on the header line" % (key, value))
        head.append("%s=%s" % (key, value))
    buf = io.StringIO()
    buf.write("# " + " ".join(head) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def emit_table(rows: Sequence[Sequence[float]], columns: Sequence[str], path,
               meta: dict | None = None) -> str:
    """Write the table to ``path`` (``-`` for none) and return the text.

    Raises:
        OSError: if the file cannot be written.
    """
    text = format_table(rows, columns, meta)
    if path not in (None, "-"):
        with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def parse_table(text: str, source: str = "<string>") -> Table:
    """Inverse of :func:`format_table`; numeric cells become floats."""
    lines = text.split("\n")
    if not lines or not lines[0].startswith("# "):
        raise ConfigError("%s:1:1: missing comment header" % source)
    meta = {}
    for token in lines[0][2:].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ConfigError("%s:1: malformed header token %r" % (source, token))
        meta[key] = value if key == "config_hash" else _meta_value(value)
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    try:
        columns = tuple(next(reader))
    except StopIteration:
        raise ConfigError("%s:2:1: missing column header" % source) from None
    rows = []
    for lineno, row in enumerate(reader, start=3):
        if not row:
            continue
        if len(row) != len(columns):
            raise ConfigError("%s:%d:1: expected %d cells" % (source, lineno, len(columns)))
        try:
            rows.append(tuple(float(x) for x in row))
        except ValueError as exc:
            raise ConfigError("%s:%d:1: %s" % (source, lineno, exc)) from None
    return Table(columns, tuple(rows), meta)


def read_table(path) -> Table:
    with open(Path(path), encoding="utf-8", newline="") as fh:
        return parse_table(fh.read(), str(path))
