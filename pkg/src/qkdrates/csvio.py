"""CSV dialect: comma separated, header row, shortest round-trip float repr,
empty cell for "not applicable".
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Optional

import numpy as np


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def parse_cell(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def dumps(header: list[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_cell(row.get(c)) for c in header])
    return buf.getvalue()


def write_csv(path: str, header: list[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(dumps(header, rows))


def loads(text: str) -> tuple[list[str], list[dict]]:
    """Raw string cells; use :func:`parse_cell` for numbers."""
    reader = csv.DictReader(io.StringIO(text))
    rows = list(reader)
    return list(reader.fieldnames or []), rows


def read_csv(path: str) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        return loads(fh.read())
