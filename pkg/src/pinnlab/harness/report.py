"""CSV reporting with pinned schemas.

Headers are part of the external contract:
  report.csv   -> seed,variant,case,rel_l2,wall_clock_s,n_active_fourier,n_active_nn
  history csv  -> iter,phase,loss_total,loss_boundary,loss_residual,rel_l2
  spectrum csv -> k,amp_truth,amp_model,abs_err
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

REPORT_HEADER = ["seed", "variant", "case", "rel_l2", "wall_clock_s",
                 "n_active_fourier", "n_active_nn"]
HISTORY_HEADER = ["iter", "phase", "loss_total", "loss_boundary",
                  "loss_residual", "rel_l2"]
SPECTRUM_HEADER = ["k", "amp_truth", "amp_model", "abs_err"]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) or isinstance(x, str):
        return str(x)
    return f"{float(x):.17g}"


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    """Round-trip reader: returns (header, rows as string lists)."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_report(path, rows) -> None:
    write_csv(path, REPORT_HEADER, rows)


def write_history(path, history) -> None:
    write_csv(path, HISTORY_HEADER, history.records)


def write_spectrum(path, ks, amp_truth, amp_model) -> None:
    rows = [(int(k), at, am, abs(at - am))
            for k, at, am in zip(ks, amp_truth, amp_model)]
    write_csv(path, SPECTRUM_HEADER, rows)


@dataclass
class RunReport:
    """Per-variant summary across seeds; statistics recomputable by design."""

    variant: str
    case: str
    rel_l2_per_seed: dict       # seed -> final relative l2

    def five_number(self):
        vals = np.sort(np.array(list(self.rel_l2_per_seed.values())))
        q = np.quantile(vals, [0.0, 0.25, 0.5, 0.75, 1.0])
        assert q[0] == vals[0] and q[-1] == vals[-1]
        return tuple(float(v) for v in q)

    def median(self) -> float:
        return self.five_number()[2]


def write_summary(path, reports) -> None:
    header = ["variant", "case", "min", "q1", "median", "q3", "max"]
    rows = []
    for rep in reports:
        rows.append((rep.variant, rep.case, *rep.five_number()))
    write_csv(path, header, rows)
