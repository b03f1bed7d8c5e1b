"""Time-series records and their CSV form.

Every run emits rows (t, observable, value, stderr, method). stderr is empty
for deterministic pipelines. Floats are written with repr-level precision so
identical runs produce byte-identical files.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class Record:
    t: float
    observable: str
    value: float
    stderr: float | None
    method: str


@dataclass
class TimeSeries:
    records: list = field(default_factory=list)

    def add(self, t, observable, value, method, stderr=None):
        self.records.append(Record(float(t), observable, float(value),
                                   None if stderr is None else float(stderr), method))

    def extend(self, other: "TimeSeries"):
        self.records.extend(other.records)

    def observables(self):
        return sorted({r.observable for r in self.records})

    def methods(self):
        return sorted({r.method for r in self.records})

    def column(self, observable: str, method: str):
        """(times, values, stderrs) arrays for one (observable, method) pair, in
        t order. stderrs use nan where a record carries none."""
        rows = [r for r in self.records if r.observable == observable and r.method == method]
        if not rows:
            raise DimensionError(f"no records for ({observable!r}, {method!r})")
        rows.sort(key=lambda r: r.t)
        t = np.array([r.t for r in rows])
        v = np.array([r.value for r in rows])
        e = np.array([math.nan if r.stderr is None else r.stderr for r in rows])
        return t, v, e

    def validate(self):
        """t must be strictly increasing within each (observable, method) pair."""
        seen = {}
        for r in self.records:
            key = (r.observable, r.method)
            if key in seen and r.t <= seen[key]:
                raise ValueError(f"time not strictly increasing for {key} at t={r.t}")
            seen[key] = r.t

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "observable", "value", "stderr", "method"])
            for r in self.records:
                writer.writerow([
                    format(r.t, ".17g"),
                    r.observable,
                    format(r.value, ".17g"),
                    "" if r.stderr is None else format(r.stderr, ".17g"),
                    r.method,
                ])

    @staticmethod
    def from_csv(path) -> "TimeSeries":
        out = TimeSeries()
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                out.add(
                    float(row["t"]),
                    row["observable"],
                    float(row["value"]),
                    row["method"],
                    stderr=float(row["stderr"]) if row["stderr"] else None,
                )
        return out
