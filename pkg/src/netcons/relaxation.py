"""Relaxation scheme with finite relaxation parameter epsilon.

On each edge the pair (u, v) solves

    u_t + v_x = 0,
    v_t + lam^2 u_x = (f(u) - v) / epsilon.

The u-update is the conservative update of the limit scheme with every
f_k(u_j) replaced by v_j, including the right-hand sides of the node systems.
The v-update uses the fluxes

    G_{j-1/2} = lam^2/2 (u_j + u_{j-1}) - lam/2 (v_j - v_{j-1})

and treats the stiff source implicitly. Because u^{n+1} is known before v is
updated, the implicit step has the closed form

    v^{n+1} = (v^n - dt/dx (G_{j+1/2} - G_{j-1/2}) + dt/eps f(u^{n+1})) / (1 + dt/eps).

As epsilon -> 0 this reduces to the first-order limit scheme.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .coupling import CouplingData, NodeInput
from .network import LeftBoundary, NetworkState, NetworkTopology
from .scheme import RunConfig, StepReport, _conservative_update, _report, compute_dt, network_fluxes


def g_flux(edge, left: tuple[float, float], right: tuple[float, float]) -> float:
    (u_l, v_l), (u_r, v_r) = left, right
    lam = edge.lam
    return 0.5 * lam * lam * (u_r + u_l) - 0.5 * lam * (v_r - v_l)


def init_auxiliary(u: Sequence[np.ndarray], models) -> list[np.ndarray]:
    """Equilibrium initial data v = f(u) on every edge."""
    return [np.asarray(f(np.asarray(uk, dtype=float)), dtype=float) for uk, f in zip(u, models)]


def node_g_fluxes(data: CouplingData, inp: NodeInput, lams: Sequence[float]) -> np.ndarray:
    out = np.empty(len(lams))
    lam = lams[0]
    out[0] = 0.5 * lam * lam * (data.u[0] + inp.u[0]) - 0.5 * lam * (data.v[0] - inp.v[0])
    for k in range(1, len(lams)):
        lam = lams[k]
        out[k] = 0.5 * lam * lam * (inp.u[k] + data.u[k]) - 0.5 * lam * (inp.v[k] - data.v[k])
    return out


def relaxation_step(
    state: NetworkState,
    topology: NetworkTopology,
    config: RunConfig,
    dt: Optional[float] = None,
) -> tuple[NetworkState, StepReport]:
    """One step of the epsilon > 0 scheme; a single node solve serves both updates."""
    eps = config.epsilon
    if eps is None or not eps > 0:
        raise ValueError(f"relaxation step needs epsilon > 0, got {eps}")
    if state.v is None:
        raise ValueError("relaxation state has no auxiliary variable")
    if dt is None:
        dt = compute_dt(topology, config.cfl)
    ratio = dt / topology.dx
    edges = topology.edges
    n_in = len(topology.incoming)

    field = network_fluxes(topology, state.u, state.v, 1, config.left_boundary)
    node_G = node_g_fluxes(field.coupling, field.node, topology.lams)

    G = []
    for k, (e, uk, vk) in enumerate(zip(edges, state.u, state.v)):
        lam = e.lam
        Gk = np.empty(e.m + 1)
        Gk[1:-1] = 0.5 * lam * lam * (uk[1:] + uk[:-1]) - 0.5 * lam * (vk[1:] - vk[:-1])
        if k < n_in:
            if config.left_boundary is LeftBoundary.NOFLUX:
                Gk[0] = 0.0
            else:
                Gk[0] = lam * lam * uk[0]
            Gk[-1] = node_G[k]
        else:
            Gk[0] = node_G[k]
            Gk[-1] = lam * lam * uk[-1]
        G.append(Gk)

    new_u = _conservative_update(state.u, field.F, ratio)
    stiff = dt / eps
    new_v = [
        (vk - ratio * (Gk[1:] - Gk[:-1]) + stiff * e.flux(uk)) / (1.0 + stiff)
        for e, vk, Gk, uk in zip(edges, state.v, G, new_u)
    ]
    report = _report(topology, state, new_u, field.F, dt)
    return NetworkState(u=new_u, v=new_v, t=state.t + dt), report
