"""Deterministic CSV tables and the run manifest."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np


@dataclass
class Table:
    filename: str
    columns: list[tuple[str, str]]
    rows: list[Sequence[Any]]

    @property
    def header(self) -> list[str]:
        return [f"{name} [{unit}]" if unit else name for name, unit in self.columns]

    def column(self, name: str) -> np.ndarray:
        i = [c[0] for c in self.columns].index(name)
        return np.array([row[i] for row in self.rows])


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class FigureSpec:
    filename: str
    table: str
    x: str
    ys: list[str]
    title: str
    xlabel: str
    ylabel: str
    style: str = "step"


@dataclass
class Outcome:
    tables: list[Table] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    figures: list[FigureSpec] = field(default_factory=list)

    def table(self, filename: str) -> Table:
        for t in self.tables:
            if t.filename == filename:
                return t
        raise KeyError(filename)


def format_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0"  # drop the sign of -0.0
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, table: Table) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])


def write_manifest(path: Path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
