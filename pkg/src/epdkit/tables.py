"""Species tables: threat categories or explicit extinction probabilities.

Comma-separated text with a header row, either ``species,category`` or
``species,p1,p2``. Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .tree import Phylogeny

CATEGORY_HEADER = ("species", "category")
PROBABILITY_HEADER = ("species", "p1", "p2")


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class SpeciesTable:
    labels: tuple[str, ...]
    categories: np.ndarray | None = None
    p1: np.ndarray | None = None
    p2: np.ndarray | None = None

    @property
    def variant(self) -> str:
        return "category" if self.categories is not None else "probability"

    def aligned(self, tree: Phylogeny) -> SpeciesTable:
        """Rows reordered to the tree's species order; labels must match."""
        check_labels(self, tree)
        order = [self.labels.index(s) for s in tree.labels]

        def pick(a):
            return None if a is None else a[order]

        return SpeciesTable(tuple(tree.labels), pick(self.categories), pick(self.p1), pick(self.p2))


def check_labels(table: SpeciesTable, tree: Phylogeny) -> None:
    have = set(tree.labels)
    for s in table.labels:
        if s not in have:
            raise TableError(f"species {s!r} in the table is not a leaf of the tree")
    listed = set(table.labels)
    for s in tree.labels:
        if s not in listed:
            raise TableError(f"tree leaf {s!r} is missing from the table")


def _rows(text: str):
    lines = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip() and not line.lstrip().startswith("#"):
            lines.append((lineno, line))
    reader = csv.reader(io.StringIO("\n".join(line for _, line in lines)))
    for (lineno, _), row in zip(lines, reader):
        yield lineno, [c.strip() for c in row]


def read_species_table(source, tree: Phylogeny | None = None) -> SpeciesTable:
    """Read a species table from a path, an open file, or its text.

    When ``tree`` is given the labels are cross-checked against its leaves
    and the result is put in the tree's species order.
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source

    rows = _rows(text)
    try:
        _, header = next(rows)
    except StopIteration:
        raise TableError("empty species table") from None
    header = tuple(h.lower() for h in header)
    if header not in (CATEGORY_HEADER, PROBABILITY_HEADER):
        raise TableError(f"unrecognised header {','.join(header)!r}")

    labels: list[str] = []
    values: list[list[float]] = []
    seen: set[str] = set()
    for lineno, row in rows:
        if len(row) != len(header):
            raise TableError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        label = row[0]
        if label in seen:
            raise TableError(f"line {lineno}: duplicate species {label!r}")
        seen.add(label)
        try:
            vals = [float(x) for x in row[1:]]
        except ValueError:
            raise TableError(f"line {lineno}: non-numeric value in {row!r}") from None
        if header == CATEGORY_HEADER:
            c = vals[0]
            if c != int(c) or not 1 <= c <= 5:
                raise TableError(f"line {lineno}: category {row[1]!r} not in 1..5")
        else:
            for x in vals:
                if not 0.0 <= x <= 1.0:
                    raise TableError(f"line {lineno}: probability {x!r} outside [0, 1]")
        labels.append(label)
        values.append(vals)

    arr = np.array(values, dtype=np.float64).reshape(len(values), len(header) - 1)
    if header == CATEGORY_HEADER:
        table = SpeciesTable(tuple(labels), categories=arr[:, 0].astype(np.int64))
    else:
        table = SpeciesTable(tuple(labels), p1=arr[:, 0].copy(), p2=arr[:, 1].copy())
    return table if tree is None else table.aligned(tree)


def format_species_table(table: SpeciesTable) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    if table.categories is not None:
        w.writerow(CATEGORY_HEADER)
        for s, c in zip(table.labels, table.categories):
            w.writerow((s, int(c)))
    else:
        w.writerow(PROBABILITY_HEADER)
        for s, a, b in zip(table.labels, table.p1, table.p2):
            w.writerow((s, repr(float(a)), repr(float(b))))
    return out.getvalue()
