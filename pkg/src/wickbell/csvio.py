"""Small CSV helpers.

All experiment output goes through format_float so that reruns under a fixed
seed are byte-identical: 17 significant digits round-trip any float64 exactly,
and the formatting never depends on locale or platform line endings.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows of str/float cells. Floats are formatted, strings passed through."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [c if isinstance(c, str) else format_float(c) for c in row]
            fh.write(",".join(cells) + "\n")


def read_csv(path: str | os.PathLike, expected_header: Sequence[str]) -> list[list[str]]:
    """Read a CSV written by write_csv. Checks the header, returns raw cells."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    if header != list(expected_header):
        raise ValueError(f"{path}: expected header {','.join(expected_header)}, got {lines[0]}")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != len(header):
            raise ValueError(f"{path}: line {i}: expected {len(header)} cells, got {len(cells)}")
        rows.append(cells)
    return rows
