"""One-dimensional series: CSV ingestion, emission, and reordering.

A series is a 1-D float64 numpy array of finite samples on an implicit
uniform integer grid 1..N. Reports and file formats index positions
1-based to match row numbers.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyInput, InvalidParams, NonFiniteValue, ParseError


def _split_lines(text: str) -> list[str]:
    # Accept LF or CRLF; drop blank lines (commonly a trailing newline).
    return [ln.rstrip("\r") for ln in text.split("\n") if ln.strip() != ""]


def _cell_to_float(cell: str, line_no: int) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        raise ParseError(line_no, f"{cell.strip()!r} is not a number")
    if not np.isfinite(value):
        raise NonFiniteValue(f"line {line_no}: non-finite value {cell.strip()!r}")
    return value


def parse_csv(text: str, column: int | str | None = None) -> np.ndarray:
    """Parse a one- or two-column CSV into a series.

    A single header line is auto-detected: if the first line does not parse
    as a number but every following line does, it is skipped. Two-column
    files are read as (index, value) and the index column is ignored, since
    samples are assumed uniformly spaced. ``column`` selects a different
    column by 0-based position, or by header name when a header is present.
    """
    lines = _split_lines(text)
    if not lines:
        raise EmptyInput("no data rows in input")

    rows = [ln.split(",") for ln in lines]
    width = len(rows[0])

    col: int
    header_names = None
    if isinstance(column, str):
        header_names = [c.strip() for c in rows[0]]
        if column not in header_names:
            raise InvalidParams(f"column {column!r} not found in header {header_names}")
        col = header_names.index(column)
    elif isinstance(column, int):
        if not 0 <= column < width:
            raise InvalidParams(f"column {column} out of range for {width}-column file")
        col = column
    elif width == 1:
        col = 0
    elif width == 2:
        col = 1
    else:
        raise InvalidParams(
            f"{width}-column file needs an explicit column selector"
        )

    start = 0
    if header_names is not None:
        start = 1
    else:
        # Header auto-detection from the selected cell of the first line.
        try:
            float(rows[0][col].strip())
        except (ValueError, IndexError):
            start = 1

    values = []
    for i in range(start, len(rows)):
        row = rows[i]
        if len(row) <= col:
            raise ParseError(i + 1, f"row has {len(row)} columns, expected at least {col + 1}")
        values.append(_cell_to_float(row[col], i + 1))

    if not values:
        raise EmptyInput("no data rows in input")
    return np.array(values, dtype=np.float64)


def emit_csv(values: np.ndarray) -> str:
    """Format a series as a single-column CSV that round-trips exactly.

    repr() of a Python float is the shortest digit string that parses back
    to the identical double, so parse(emit(parse(text))) == parse(text).
    """
    return "\n".join(repr(float(v)) for v in np.asarray(values)) + "\n"


def reverse(values: np.ndarray) -> np.ndarray:
    """Return the series in reverse order: output[i] = input[N+1-i]."""
    return np.asarray(values, dtype=np.float64)[::-1].copy()
