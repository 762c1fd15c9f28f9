"""Junction coupling: trace data from linear node systems and node fluxes.

The central coupling determines, for every edge, a state trace and a flux
trace at the node. For an incoming edge the pair (u_R, v_R) and for an
outgoing edge the pair (u_L, v_L) satisfy

* the characteristic invariant carried into the node, v + lam*u for incoming
  edges and v - lam*u for outgoing edges,
* conservation of the flux trace, sum v_R = sum v_L,
* conservation of the lam^2 u trace, sum lam^2 u_R = sum lam^2 u_L,
* and on 1-to-2 nodes the distribution rule v_L(edge 2) = alpha * v_R.

Written in increments against the adjacent cell values these are two small
linear systems, one for the state traces and one for the flux traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .flux import FluxModel, demand, supply

SINGULAR_RTOL = 1e-14


class CouplingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NodeInput:
    """Cell values adjacent to the node, one entry per edge (incoming first).

    In the limit scheme ``v`` holds f_k of the adjacent cell average; in the
    relaxation scheme it holds the evolved auxiliary average.
    """

    u: tuple[float, ...]
    v: tuple[float, ...]

    def __post_init__(self):
        if len(self.u) != len(self.v):
            raise ValueError("u and v must have one entry per edge")
        if not all(math.isfinite(x) for x in (*self.u, *self.v)):
            raise ValueError(f"non-finite node input u={self.u}, v={self.v}")


@dataclass(frozen=True)
class CouplingData:
    """State traces ``u`` and flux traces ``v`` at the node, one per edge.

    Entry 0 belongs to the incoming edge (u_R, v_R); the remaining entries
    to the outgoing edges (u_L, v_L).
    """

    u: tuple[float, ...]
    v: tuple[float, ...]

    @property
    def u_R(self) -> float:
        return self.u[0]

    @property
    def v_R(self) -> float:
        return self.v[0]

    @property
    def u_L(self) -> tuple[float, ...]:
        return self.u[1:]

    @property
    def v_L(self) -> tuple[float, ...]:
        return self.v[1:]

    def residuals(self, lams: Sequence[float], alpha: Optional[float] = None) -> dict[str, float]:
        """Defects of the conservation and distribution identities."""
        lams = list(lams)
        out = {
            "flux_trace": abs(self.v[0] - sum(self.v[1:])),
            "state_trace": abs(lams[0] ** 2 * self.u[0] - sum(l * l * u for l, u in zip(lams[1:], self.u[1:]))),
        }
        if alpha is not None:
            out["distribution"] = abs(self.v[1] - alpha * self.v[0])
        return out


def solve_linear(a, b) -> list[float]:
    """Gaussian elimination with partial pivoting for small dense systems."""
    n = len(b)
    m = [list(map(float, row)) + [float(bi)] for row, bi in zip(a, b)]
    scale = max(abs(x) for row in m for x in row[:n]) or 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) < SINGULAR_RTOL * scale:
            raise CouplingError(f"singular node system (pivot {m[piv][col]:.3e} in column {col})")
        m[col], m[piv] = m[piv], m[col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            if factor:
                for c in range(col, n + 1):
                    m[r][c] -= factor * m[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n] - sum(m[r][c] * x[c] for c in range(r + 1, n))
        x[r] = acc / m[r][r]
    return x


def solve_coupling_1to1(inp: NodeInput, lam1: float, lam2: float) -> CouplingData:
    if not (lam1 > 0 and lam2 > 0):
        raise ValueError(f"relaxation speeds must be positive, got {lam1}, {lam2}")
    (u1, u2), (v1, v2) = inp.u, inp.v
    r1 = v1 - v2
    r2 = lam1 * lam1 * u1 - lam2 * lam2 * u2

    # [[lam1, lam2], [-lam1^2, lam2^2]] (du1, du2) = (r1, r2)
    det_u = lam1 * lam2 * (lam1 + lam2)
    du1 = (lam2 * lam2 * r1 - lam2 * r2) / det_u
    du2 = (lam1 * r2 + lam1 * lam1 * r1) / det_u

    # [[-1, 1], [lam1, lam2]] (dv1, dv2) = (r1, r2)
    det_v = -(lam1 + lam2)
    dv1 = (lam2 * r1 - r2) / det_v
    dv2 = (-r2 - lam1 * r1) / det_v

    return CouplingData(u=(u1 + du1, u2 + du2), v=(v1 + dv1, v2 + dv2))


def coupling_matrices_1to2(lam1: float, lam2: float, lam3: float, alpha: float):
    """Matrices of the state-increment and flux-increment systems of a 1-to-2 node."""
    a_u = [
        [lam1, lam2, lam3],
        [-lam1 * lam1, lam2 * lam2, lam3 * lam3],
        [-alpha * lam1, -lam2, 0.0],
    ]
    a_v = [
        [-1.0, 1.0, 1.0],
        [lam1, lam2, lam3],
        [alpha, -1.0, 0.0],
    ]
    return a_u, a_v


def coupling_rhs_1to2(inp: NodeInput, lam1: float, lam2: float, lam3: float, alpha: float) -> list[float]:
    (u1, u2, u3), (v1, v2, v3) = inp.u, inp.v
    return [
        v1 - v2 - v3,
        lam1 * lam1 * u1 - lam2 * lam2 * u2 - lam3 * lam3 * u3,
        -alpha * v1 + v2,
    ]


def solve_coupling_1to2(inp: NodeInput, lam1: float, lam2: float, lam3: float, alpha: float) -> CouplingData:
    if not (lam1 > 0 and lam2 > 0 and lam3 > 0):
        raise ValueError(f"relaxation speeds must be positive, got {lam1}, {lam2}, {lam3}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    a_u, a_v = coupling_matrices_1to2(lam1, lam2, lam3, alpha)
    rhs = coupling_rhs_1to2(inp, lam1, lam2, lam3, alpha)
    try:
        du = solve_linear(a_u, rhs)
        dv = solve_linear(a_v, rhs)
    except CouplingError as exc:
        raise CouplingError(f"{exc} for lambda=({lam1}, {lam2}, {lam3}), alpha={alpha}") from None
    return CouplingData(
        u=tuple(x + d for x, d in zip(inp.u, du)),
        v=tuple(x + d for x, d in zip(inp.v, dv)),
    )


def solve_coupling(inp: NodeInput, lams: Sequence[float], alpha: Optional[float] = None) -> CouplingData:
    if len(lams) == 2:
        return solve_coupling_1to1(inp, *lams)
    if len(lams) == 3:
        if alpha is None:
            raise ValueError("1-to-2 coupling needs alpha")
        return solve_coupling_1to2(inp, *lams, alpha)
    raise ValueError(f"no coupling rule for {len(lams)} edges")


def node_fluxes_central(data: CouplingData, inp: NodeInput, lams: Sequence[float]) -> np.ndarray:
    """Numerical fluxes through the node interface of every edge."""
    out = np.empty(len(lams))
    out[0] = 0.5 * (data.v[0] + inp.v[0]) - 0.5 * lams[0] * (data.u[0] - inp.u[0])
    for k in range(1, len(lams)):
        out[k] = 0.5 * (inp.v[k] + data.v[k]) - 0.5 * lams[k] * (inp.u[k] - data.u[k])
    return out


def node_fluxes_flowmax(
    u: Sequence[float],
    models: Sequence[FluxModel],
    alpha: float,
    edge_ids: Sequence[int] = (1, 2, 3),
    tol: float = 0.0,
) -> np.ndarray:
    """Flow-maximising node fluxes on a 1-to-2 junction.

    The incoming flux is the largest value permitted by the upstream demand
    and by both downstream supplies after distribution by ``alpha``. An
    outgoing edge receiving no share (alpha in {0, 1}) imposes no constraint.
    """
    if len(u) != 3 or len(models) != 3:
        raise ValueError("flow maximization needs exactly one incoming and two outgoing edges")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    bounds = [demand(models[0], u[0], edge_ids[0], tol)]
    s2 = supply(models[1], u[1], edge_ids[1], tol)
    s3 = supply(models[2], u[2], edge_ids[2], tol)
    if alpha > 0.0:
        bounds.append(s2 / alpha)
    if alpha < 1.0:
        bounds.append(s3 / (1.0 - alpha))
    f_in = min(bounds)
    return np.array([f_in, alpha * f_in, (1.0 - alpha) * f_in])
