"""Error norms, convergence orders and conservation audits on network states."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

MASS_AUDIT_RTOL = 1e-11


def _fields(state, which: str) -> list[np.ndarray]:
    arrays = state.u if which == "u" else state.v
    if arrays is None:
        raise ValueError(f"state carries no {which!r} field")
    return arrays


def l1_error(state_a, state_b, dx: Optional[float] = None, field: str = "u") -> float:
    """dx-weighted L1 distance summed over all edges.

    Grids must match cell for cell. ``dx`` defaults to 1/m of the first edge.
    """
    a = _fields(state_a, field)
    b = _fields(state_b, field)
    if len(a) != len(b) or any(x.shape != y.shape for x, y in zip(a, b)):
        raise ValueError("l1_error needs states on identical grids")
    if dx is None:
        dx = 1.0 / a[0].size
    return dx * float(sum(np.abs(x - y).sum() for x, y in zip(a, b)))


def eoc(errors: Sequence[float]) -> list[float]:
    """Orders log10(E_{k-1}/E_k) for errors on decade-spaced parameters.

    Entry k belongs to error k; the first entry and any entry touching a
    non-positive error are NaN.
    """
    out = [math.nan]
    for prev, cur in zip(errors[:-1], errors[1:]):
        if prev > 0 and cur > 0:
            out.append(math.log10(prev / cur))
        else:
            out.append(math.nan)
    return out


@dataclass(frozen=True)
class ErrorRow:
    parameter: object
    l1_error: float
    eoc: float


@dataclass
class ErrorTable:
    rows: list[ErrorRow] = field(default_factory=list)

    @classmethod
    def from_errors(cls, parameters: Sequence, errors: Sequence[float]) -> "ErrorTable":
        if len(parameters) != len(errors):
            raise ValueError("one parameter per error is required")
        orders = eoc(errors)
        return cls([ErrorRow(p, float(e), o) for p, e, o in zip(parameters, errors, orders)])

    @property
    def errors(self) -> list[float]:
        return [r.l1_error for r in self.rows]

    @property
    def orders(self) -> list[float]:
        return [r.eoc for r in self.rows]

    def write(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["parameter", "l1_error", "eoc"])
        for i, r in enumerate(self.rows):
            param = f"{r.parameter:.17e}" if isinstance(r.parameter, float) else str(r.parameter)
            # undefined orders past the first row are written as nan
            order = "" if i == 0 else f"{r.eoc:.17e}"
            w.writerow([param, f"{r.l1_error:.17e}", order])

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            self.write(fh)
        return path


@dataclass(frozen=True)
class MassAudit:
    max_defect: float
    max_node_defect: float
    tolerance: float
    steps: int

    @property
    def ok(self) -> bool:
        return self.max_defect <= self.tolerance and self.max_node_defect <= self.tolerance


def mass_balance_audit(reports: Iterable, initial_mass: Optional[float] = None) -> MassAudit:
    """Largest per-step violation of the discrete mass balance.

    Each step must satisfy mass_after = mass_before + dt * (inflow - outflow),
    and the fluxes through the node must sum to zero.
    """
    reports = list(reports)
    if initial_mass is None:
        initial_mass = reports[0].mass_before if reports else 0.0
    tol = MASS_AUDIT_RTOL * (abs(initial_mass) + 1.0)
    defect = max((r.mass_defect for r in reports), default=0.0)
    node = max((r.node_defect for r in reports), default=0.0)
    return MassAudit(max_defect=defect, max_node_defect=node, tolerance=tol, steps=len(reports))
