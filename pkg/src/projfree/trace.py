"""Per-iteration run records and their CSV serialization.

The on-disk format is a fixed-header CSV; optional fields (perturbed loss,
batch size, timings) are written as empty cells when absent, never as zeros,
so a parsed trace reproduces the written one exactly.
"""

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

CSV_HEADER = [
    "t",
    "loss_f",
    "loss_h",
    "fw_gap",
    "gamma",
    "batch",
    "grad_norm",
    "step_ms",
    "oracle_ms",
    "proj_ms",
]


@dataclass
class Trace:
    """Columnar per-iteration records of a single optimizer run."""

    t: list = field(default_factory=list)
    loss_f: list = field(default_factory=list)
    loss_h: list = field(default_factory=list)
    fw_gap: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    batch: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    step_ms: list = field(default_factory=list)
    oracle_ms: list = field(default_factory=list)
    proj_ms: list = field(default_factory=list)
    #: final iterate of the run; not serialized
    final_point: Optional[np.ndarray] = None

    def append(
        self,
        t: int,
        loss_f: float,
        loss_h: Optional[float],
        fw_gap: float,
        gamma: float,
        batch: Optional[int],
        grad_norm: float,
        step_ms: Optional[float] = None,
        oracle_ms: Optional[float] = None,
        proj_ms: Optional[float] = None,
    ) -> None:
        self.t.append(int(t))
        self.loss_f.append(float(loss_f))
        self.loss_h.append(None if loss_h is None else float(loss_h))
        self.fw_gap.append(float(fw_gap))
        self.gamma.append(float(gamma))
        self.batch.append(None if batch is None else int(batch))
        self.grad_norm.append(float(grad_norm))
        self.step_ms.append(None if step_ms is None else float(step_ms))
        self.oracle_ms.append(None if oracle_ms is None else float(oracle_ms))
        self.proj_ms.append(None if proj_ms is None else float(proj_ms))

    def __len__(self) -> int:
        return len(self.t)

    def rows(self):
        for i in range(len(self.t)):
            yield (
                self.t[i],
                self.loss_f[i],
                self.loss_h[i],
                self.fw_gap[i],
                self.gamma[i],
                self.batch[i],
                self.grad_norm[i],
                self.step_ms[i],
                self.oracle_ms[i],
                self.proj_ms[i],
            )

    def records_equal(self, other: "Trace") -> bool:
        return list(self.rows()) == list(other.rows())


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in trace.rows():
            writer.writerow([_cell(v) for v in row])


def _parse(cell: str, kind):
    if cell == "":
        return None
    return kind(cell)


def read_trace(path) -> Trace:
    trace = Trace()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(
                f"unexpected trace header {header!r}; expected {CSV_HEADER!r}"
            )
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"malformed trace row: {row!r}")
            trace.append(
                int(row[0]),
                float(row[1]),
                _parse(row[2], float),
                float(row[3]),
                float(row[4]),
                _parse(row[5], int),
                float(row[6]),
                _parse(row[7], float),
                _parse(row[8], float),
                _parse(row[9], float),
            )
    return trace
