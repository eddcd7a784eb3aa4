"""Numeric CSV ingestion with an optional, auto-detected header row."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np


class CSVFormatError(ValueError):
    """The file is not a rectangular table of numbers."""


@dataclass(frozen=True)
class Table:
    values: np.ndarray
    header: Optional[tuple] = None

    def column_names(self) -> tuple:
        if self.header is not None:
            return self.header
        return tuple(f"V{j + 1}" for j in range(self.values.shape[1]))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_numeric_csv(path) -> Table:
    """Comma-separated numbers; the first row is a header iff any cell in it
    is non-numeric. Blank lines are ignored."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise CSVFormatError(f"{path}: no data")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = tuple(c.strip() for c in rows[0])
        rows = rows[1:]
    if not rows:
        raise CSVFormatError(f"{path}: header but no data rows")
    width = len(header) if header is not None else len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise CSVFormatError(
                f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise CSVFormatError(
                    f"{path}: non-numeric cell {cell.strip()!r} in row {i + 1}") from None
    return Table(values=out, header=header)


def split_response(table: Table, response: Optional[str] = None):
    """(X, y, predictor names); the response is the last column unless named."""
    names = table.column_names()
    if response is None:
        k = len(names) - 1
    elif table.header is None:
        raise CSVFormatError("--response needs a header row")
    elif response not in names:
        raise CSVFormatError(f"no column named {response!r}")
    else:
        k = names.index(response)
    if len(names) < 2:
        raise CSVFormatError("need at least one predictor column and a response")
    keep = [j for j in range(len(names)) if j != k]
    return table.values[:, keep], table.values[:, k].copy(), tuple(names[j] for j in keep)


def format_float(x: float) -> str:
    """Shortest text that round-trips to the same double."""
    return repr(float(x))


def write_matrix_csv(path, M: np.ndarray, header=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in np.asarray(M, dtype=float):
            w.writerow([format_float(v) for v in row])
